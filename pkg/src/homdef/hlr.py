"""Hom-Lie-Rinehart structures and their left modules.

A structure on a module (L, alpha_L) over (A, phi) is stored as

* ``bracket``: full alternating array, ``bracket[i, j]`` = [e_i, e_j] in L;
* ``anchor``: ``anchor[i]`` is the dim A x dim A matrix of rho(e_i).

The twist alpha_L is the module's ``beta`` and phi is the algebra's ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from homdef.algebra import (
    AlgebraSpec,
    ModuleSpec,
    ValidationReport,
    ground_field,
    is_phi_derivation,
    phi_derivations_basis,
    regular_module,
    validate_algebra,
    validate_module,
    vector_space,
)
from homdef.linalg import Q, SubspaceBasis, nullspace_basis, solve
from homdef.tensors import contract, eye, is_zero, matpow, unit, zeros


@dataclass(frozen=True, eq=False)
class HLRStructure:
    module: ModuleSpec
    bracket: np.ndarray
    anchor: np.ndarray

    def __post_init__(self):
        m, k = self.module.dim, self.module.algebra.dim
        if self.bracket.shape != (m, m, m):
            raise ValueError(f"bracket must have shape ({m},{m},{m})")
        if self.anchor.shape != (m, k, k):
            raise ValueError(f"anchor must have shape ({m},{k},{k})")

    @property
    def algebra(self) -> AlgebraSpec:
        return self.module.algebra

    @property
    def alpha(self) -> np.ndarray:
        return self.module.beta

    @property
    def phi(self) -> np.ndarray:
        return self.module.algebra.phi

    @property
    def dim(self) -> int:
        return self.module.dim

    def br(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return contract(self.bracket, [x, y])

    def rho(self, x: np.ndarray) -> np.ndarray:
        return contract(self.anchor, [x])

    def same_as(self, other: "HLRStructure") -> bool:
        return (self.bracket.shape == other.bracket.shape
                and self.anchor.shape == other.anchor.shape
                and is_zero(self.bracket - other.bracket)
                and is_zero(self.anchor - other.anchor)
                and is_zero(self.alpha - other.alpha)
                and self.algebra.same_as(other.algebra))


@dataclass(frozen=True, eq=False)
class HLRModule:
    """Left module (M, beta) over a hom-Lie-Rinehart algebra.

    ``action[x, y]`` is the coordinate vector of {e_x, f_y} in M.
    """

    base: HLRStructure
    carrier: ModuleSpec
    action: np.ndarray

    def theta(self, x: np.ndarray) -> np.ndarray:
        """Matrix of m -> {x, m}."""
        return contract(self.action, [x]).T.copy()


class MorphismError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(f"not a Lie-Rinehart endomorphism: {report.identities()}")
        self.report = report


class FiberedProductError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(f"fibered product kernel is not stable: {report.identities()}")
        self.report = report


def _mat_eq(a, b) -> bool:
    return is_zero(np.asarray(a - b))


# --------------------------------------------------------------------------
# validation


def validate_hlr(s: HLRStructure) -> ValidationReport:
    """Check every hom-Lie-Rinehart axiom on basis tuples."""
    rep = ValidationReport("hlr")
    M = s.module
    A = s.algebra
    rep.extend(validate_module(M))
    m, k = M.dim, A.dim
    ln, an = M.names, A.names
    E = [unit(m, i) for i in range(m)]
    alpha, phi = s.alpha, s.phi
    for i in range(m):
        if not is_zero(s.bracket[i, i]):
            rep.add("skew-symmetry", (ln[i], ln[i]))
        for j in range(i + 1, m):
            if not _mat_eq(s.bracket[i, j], -s.bracket[j, i]):
                rep.add("skew-symmetry", (ln[i], ln[j]))
    for i in range(m):
        for j in range(i + 1, m):
            lhs = alpha.dot(s.bracket[i, j])
            rhs = s.br(alpha[:, i], alpha[:, j])
            if not _mat_eq(lhs, rhs):
                rep.add("alpha preserves bracket", (ln[i], ln[j]))
    for i in range(m):
        for j in range(i + 1, m):
            for l in range(j + 1, m):
                jac = (s.br(alpha[:, i], s.bracket[j, l])
                       + s.br(alpha[:, j], s.bracket[l, i])
                       + s.br(alpha[:, l], s.bracket[i, j]))
                if not is_zero(jac):
                    rep.add("(ii) hom-Jacobi", (ln[i], ln[j], ln[l]),
                            "jacobiator = [" + ", ".join(map(str, jac)) + "]")
    for i in range(m):
        if not is_phi_derivation(A, 1, s.anchor[i]):
            rep.add("anchor is a phi-derivation", (ln[i],))
    for i in range(m):
        if not _mat_eq(s.rho(alpha[:, i]).dot(phi), phi.dot(s.anchor[i])):
            rep.add("(iii) representation: rho(alpha x) phi = phi rho(x)", (ln[i],))
        for j in range(i + 1, m):
            lhs = s.rho(s.bracket[i, j]).dot(phi)
            rhs = s.rho(alpha[:, i]).dot(s.anchor[j]) - s.rho(alpha[:, j]).dot(s.anchor[i])
            if not _mat_eq(lhs, rhs):
                rep.add("(iii) representation: rho([x,y]) phi", (ln[i], ln[j]))
    for a in range(k):
        pa = A.mul_op(phi[:, a])
        for i in range(m):
            if not _mat_eq(s.rho(M.action[a, i]), pa.dot(s.anchor[i])):
                rep.add("(iv) rho(a.x) = phi(a).rho(x)", (an[a], ln[i]))
    for a in range(k):
        ea = unit(k, a)
        for i in range(m):
            for j in range(m):
                lhs = s.br(E[i], M.action[a, j])
                rhs = (M.act(phi[:, a], s.bracket[i, j])
                       + M.act(s.anchor[i].dot(ea), alpha[:, j]))
                if not is_zero(lhs - rhs):
                    rep.add("(v) hom-Leibniz", (ln[i], an[a], ln[j]))
    return rep


def validate_hlr_module(mod: HLRModule) -> ValidationReport:
    rep = ValidationReport("hlr-module")
    s, M = mod.base, mod.carrier
    A = s.algebra
    rep.extend(validate_module(M))
    m, n, k = s.dim, M.dim, A.dim
    ln, mn, an = s.module.names, M.names, A.names
    beta, alpha, phi = M.beta, s.alpha, s.phi
    for i in range(m):
        if not _mat_eq(mod.theta(alpha[:, i]).dot(beta), beta.dot(mod.theta(unit(m, i)))):
            rep.add("(i) representation: theta(alpha x) beta = beta theta(x)", (ln[i],))
        for j in range(i + 1, m):
            lhs = mod.theta(s.bracket[i, j]).dot(beta)
            rhs = (mod.theta(alpha[:, i]).dot(mod.theta(unit(m, j)))
                   - mod.theta(alpha[:, j]).dot(mod.theta(unit(m, i))))
            if not _mat_eq(lhs, rhs):
                rep.add("(i) representation: theta([x,y]) beta", (ln[i], ln[j]))
    for a in range(k):
        pa = M.act_op(phi[:, a])
        for i in range(m):
            lhs = mod.theta(s.module.action[a, i])
            if not _mat_eq(lhs, pa.dot(mod.theta(unit(m, i)))):
                rep.add("(iii) {a.X, m} = phi(a){X, m}", (an[a], ln[i]))
    for a in range(k):
        ea = unit(k, a)
        for i in range(m):
            th = mod.theta(unit(m, i))
            ra = s.anchor[i].dot(ea)
            for y in range(n):
                lhs = th.dot(M.action[a, y])
                rhs = M.act(phi[:, a], th[:, y]) + M.act(ra, beta[:, y])
                if not is_zero(lhs - rhs):
                    rep.add("(iv) {X, a.m} = phi(a){X,m} + rho(X)(a).beta(m)", (ln[i], an[a], mn[y]))
    return rep


# --------------------------------------------------------------------------
# builders


def lie_algebra(brackets: dict, names, alpha: Optional[np.ndarray] = None) -> HLRStructure:
    """A (hom-)Lie algebra over Q with zero anchor.

    ``brackets`` maps a pair of basis names to ``{name: coefficient}``.
    """
    names = tuple(names)
    m = len(names)
    idx = {n: i for i, n in enumerate(names)}
    A = ground_field()
    M = vector_space(A, m, alpha, names)
    b = zeros((m, m, m))
    for (x, y), val in brackets.items():
        v = zeros((m,))
        for name, c in val.items():
            v[idx[name]] = Q(c)
        b[idx[x], idx[y]] = v
        b[idx[y], idx[x]] = -v
    return HLRStructure(M, b, zeros((m, 1, 1)))


def abelian(M: ModuleSpec) -> HLRStructure:
    m, k = M.dim, M.algebra.dim
    return HLRStructure(M, zeros((m, m, m)), zeros((m, k, k)))


def action_algebroid(A: AlgebraSpec, X: np.ndarray) -> HLRStructure:
    """L = A with anchor rho(a) = a X and bracket [a, b] = a X(b) - b X(a).

    Requires phi = id on A; the twist is the identity.
    """
    k = A.dim
    M = regular_module(A, eye(k))
    b = zeros((k, k, k))
    anchor = zeros((k, k, k))
    E = [unit(k, i) for i in range(k)]
    for i in range(k):
        anchor[i] = A.mul_op(E[i]).dot(X)
        for j in range(k):
            b[i, j] = A.mul(E[i], X.dot(E[j])) - A.mul(E[j], X.dot(E[i]))
    return HLRStructure(M, b, anchor)


def _express(basis_mats: list[np.ndarray], target: np.ndarray) -> np.ndarray:
    cols = [list(b.flat) for b in basis_mats]
    rows = [list(r) for r in zip(*cols)] if cols else []
    x = solve(rows, list(target.flat), ncols=len(cols))
    if x is None:
        raise ValueError("element lies outside the span")
    return np.array(x, dtype=object)


def ad_phi(A: AlgebraSpec, D: np.ndarray, phi_inv: Optional[np.ndarray] = None) -> np.ndarray:
    """Ad_phi(D) = phi o D o phi^{-1}."""
    pinv = A.phi_inverse() if phi_inv is None else phi_inv
    return A.phi.dot(D).dot(pinv)


def der_phi_structure(A: AlgebraSpec) -> HLRStructure:
    """(Der_phi(A), Ad_phi) with bracket Ad_phi(D1) D2 phi^{-1} - Ad_phi(D2) D1 phi^{-1}.

    The bracket and the twist are the adopted closed forms; ``validate_hlr``
    on the result is what certifies them.
    """
    pinv = A.phi_inverse()
    basis = [d.matrix for d in phi_derivations_basis(A, 1)]
    r, k = len(basis), A.dim
    action = zeros((k, r, r))
    for a in range(k):
        La = A.mul_op(unit(k, a))
        for j in range(r):
            action[a, j] = _express(basis, La.dot(basis[j]))
    adj = [ad_phi(A, D, pinv) for D in basis]
    beta = zeros((r, r))
    for j in range(r):
        beta[:, j] = _express(basis, adj[j])
    br = zeros((r, r, r))
    for i in range(r):
        for j in range(r):
            val = adj[i].dot(basis[j]).dot(pinv) - adj[j].dot(basis[i]).dot(pinv)
            br[i, j] = _express(basis, val)
    anchor = np.empty((r, k, k), dtype=object)
    for i in range(r):
        anchor[i] = adj[i]
    M = ModuleSpec(A, action, beta, tuple(f"D{i + 1}" for i in range(r)))
    return HLRStructure(M, br, anchor)


def der_phi_basis_matrices(s: HLRStructure) -> list[np.ndarray]:
    """The phi-derivation each basis element of a ``der_phi_structure`` stands for."""
    return [d.matrix for d in phi_derivations_basis(s.algebra, 1)]


# --------------------------------------------------------------------------
# constructions


def twist_by_morphism(s: HLRStructure, phi_p: np.ndarray, alpha_p: np.ndarray) -> HLRStructure:
    """Hom-Lie-Rinehart algebra obtained by composing with (phi', alpha')."""
    A, M = s.algebra, s.module
    m, k = M.dim, A.dim
    if not (_mat_eq(s.alpha, eye(m)) and _mat_eq(s.phi, eye(k))):
        raise ValueError("twist_by_morphism expects a Lie-Rinehart algebra (identity twists)")
    rep = ValidationReport("morphism")
    for v in validate_algebra(A.with_phi(phi_p)).violations:
        rep.add("phi' algebra endomorphism: " + v.identity, v.witness, v.detail)
    ln, an = M.names, A.names
    for i in range(m):
        for j in range(i + 1, m):
            if not _mat_eq(alpha_p.dot(s.bracket[i, j]), s.br(alpha_p[:, i], alpha_p[:, j])):
                rep.add("alpha'[x,y] = [alpha'x, alpha'y]", (ln[i], ln[j]))
    for a in range(k):
        for i in range(m):
            if not _mat_eq(alpha_p.dot(M.action[a, i]), M.act(phi_p[:, a], alpha_p[:, i])):
                rep.add("alpha'(a.x) = phi'(a).alpha'(x)", (an[a], ln[i]))
    for i in range(m):
        if not _mat_eq(s.rho(alpha_p[:, i]).dot(phi_p), phi_p.dot(s.anchor[i])):
            rep.add("rho(alpha'x)(phi'a) = phi'(rho(x)(a))", (ln[i],))
    if not rep.ok:
        raise MorphismError(rep)
    A2 = A.with_phi(phi_p)
    M2 = ModuleSpec(A2, M.action, alpha_p, M.names, M.free_rank)
    br = zeros((m, m, m))
    for i in range(m):
        for j in range(m):
            br[i, j] = alpha_p.dot(s.bracket[i, j])
    anchor = np.empty((m, k, k), dtype=object)
    for i in range(m):
        anchor[i] = phi_p.dot(s.anchor[i])
    return HLRStructure(M2, br, anchor)


def fibered_product(s1: HLRStructure, s2: HLRStructure) -> HLRStructure:
    """The pairs (l, m) with rho_1(l) = rho_2(m), with componentwise structure."""
    A = s1.algebra
    if not A.same_as(s2.algebra):
        raise ValueError("fibered product needs both structures over the same (A, phi)")
    m1, m2, k = s1.dim, s2.dim, A.dim
    n = m1 + m2
    rows = []
    for r in range(k):
        for c in range(k):
            rows.append([s1.anchor[i][r, c] for i in range(m1)]
                        + [-s2.anchor[j][r, c] for j in range(m2)])
    K = nullspace_basis(rows, n)
    basis = [np.array(v, dtype=object) for v in K.vectors]
    d = len(basis)

    def split(v):
        return v[:m1], v[m1:]

    def join(a, b):
        return np.concatenate([a, b])

    rep = ValidationReport("fibered-product")

    def coords(v, what, witness):
        x = K.coordinates(v) if K.contains(v) else None
        if x is None:
            rep.add(what, witness)
            return zeros((d,))
        return np.array(x, dtype=object)

    action = zeros((k, d, d))
    for a in range(k):
        for j, v in enumerate(basis):
            l, mm = split(v)
            w = join(s1.module.act(unit(k, a), l), s2.module.act(unit(k, a), mm))
            action[a, j] = coords(w, "kernel not A-stable", (A.names[a], j))
    beta = zeros((d, d))
    for j, v in enumerate(basis):
        l, mm = split(v)
        beta[:, j] = coords(join(s1.alpha.dot(l), s2.alpha.dot(mm)), "kernel not alpha-stable", (j,))
    br = zeros((d, d, d))
    for i, v in enumerate(basis):
        for j, w in enumerate(basis):
            if j <= i:
                continue
            (l1, n1), (l2, n2) = split(v), split(w)
            val = coords(join(s1.br(l1, l2), s2.br(n1, n2)), "kernel not closed under bracket", (i, j))
            br[i, j] = val
            br[j, i] = -val
    if not rep.ok:
        raise FiberedProductError(rep)
    anchor = np.empty((d, k, k), dtype=object)
    for j, v in enumerate(basis):
        anchor[j] = s1.rho(split(v)[0])
    M = ModuleSpec(A, action, beta, tuple(f"p{j + 1}" for j in range(d)))
    return HLRStructure(M, br, anchor)


def canonical_module(s: HLRStructure) -> HLRModule:
    """(A, phi) with L acting through the anchor."""
    A = s.algebra
    carrier = regular_module(A, A.phi.copy())
    m, k = s.dim, A.dim
    action = zeros((m, k, k))
    for i in range(m):
        for a in range(k):
            action[i, a] = s.anchor[i][:, a]
    return HLRModule(s, carrier, action)


def adjoint_representation(s: HLRStructure, power: int) -> HLRModule:
    """The alpha^s-adjoint representation {g, h} = [alpha^s(g), h] of a hom-Lie algebra over Q."""
    if s.algebra.dim != 1:
        raise ValueError("adjoint representation is defined here for A = Q only")
    m = s.dim
    if power >= 0:
        a_s = matpow(s.alpha, power)
    else:
        rows = [list(r) for r in s.alpha]
        cols = []
        for j in range(m):
            x = solve(rows, list(unit(m, j)))
            if x is None:
                raise ValueError("alpha is not invertible; negative powers are undefined")
            cols.append(x)
        inv = np.array(cols, dtype=object).T.copy()
        a_s = matpow(inv, -power)
    action = zeros((m, m, m))
    for g in range(m):
        for h in range(m):
            action[g, h] = s.br(a_s[:, g], unit(m, h))
    return HLRModule(s, s.module, action)


def anchor_space(s: HLRStructure) -> SubspaceBasis:
    """Span of the anchor values, flattened."""
    from homdef.linalg import independent_columns
    vecs = [list(s.anchor[i].flat) for i in range(s.dim)]
    if not vecs:
        return SubspaceBasis(s.algebra.dim ** 2, ())
    cols = independent_columns([list(r) for r in zip(*vecs)])
    return SubspaceBasis(s.algebra.dim ** 2, tuple(tuple(vecs[c]) for c in cols))
