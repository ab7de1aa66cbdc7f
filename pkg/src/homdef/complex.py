"""The deformation complex C^n_def = Der^{n-1}, delta = [m, -], and its cohomology.

Also the cochain complex with coefficients in a left module and the
Koszul-connection splitting of multiderivations of a free module.

Sign table for the explicit coboundary (D of degree n-1, arguments x_0..x_n)::

    delta(D)(x_0..x_n) = sum_{i=0..n}  (-1)^i     m(alpha^{n-1} x_i, D(.. ^x_i ..))
                       + sum_{i<j}     (-1)^{i+j} D(m(x_i, x_j), alpha x_0 .. ^ .. ^ .. alpha x_n)

This is what [m, D] expands to; the first sum starts at i = 0 and the second
is over strictly increasing pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from homdef.algebra import ModuleSpec
from homdef.hlr import HLRModule, HLRStructure, validate_hlr
from homdef.linalg import (
    SubspaceBasis,
    ZERO,
    complement_representatives,
    nullspace_basis,
    rank,
    transpose,
)
from homdef.mder import (
    MaurerCartanError,
    MderSpace,
    Multiderivation,
    bracket,
    from_structure,
    maurer_cartan_witness,
    mder_space,
)
from homdef.tensors import (
    alternating_coords,
    alternating_from_coords,
    alternating_size,
    contract,
    eye,
    fill_alternating,
    increasing,
    is_zero,
    matpow,
    unit,
    zeros,
)


def delta(m: Multiderivation, D: Multiderivation, check: bool = False) -> Multiderivation:
    """delta(D) = [m, D]."""
    if m.degree != 1:
        raise ValueError("the structure element must have degree 1")
    if check:
        w = maurer_cartan_witness(m)
        if w is not None:
            raise MaurerCartanError(*w)
    return bracket(m, D)


def delta_explicit(m: Multiderivation, D: Multiderivation, first: int = 0) -> np.ndarray:
    """Value part of delta(D) from the explicit alternating-sum formula.

    ``first=1`` starts the first sum at i = 1, as the formula is sometimes
    printed; that variant disagrees with [m, D] and exists to show it.
    """
    M = D.module
    mdim = M.dim
    q = D.degree
    arity = q + 2
    alpha = M.beta
    Aq = M.beta_power(q)
    values = {}
    for idx in increasing(mdim, arity):
        acc = zeros((mdim,))
        for i in range(first, arity):
            rest = [unit(mdim, idx[j]) for j in range(arity) if j != i]
            val = contract(m.d, [Aq[:, idx[i]], contract(D.d, rest)])
            acc = acc + val if i % 2 == 0 else acc - val
        for i, j in combinations(range(arity), 2):
            inner = m.d[idx[i], idx[j]]
            rest = [alpha[:, idx[l]] for l in range(arity) if l not in (i, j)]
            val = contract(D.d, [inner] + rest)
            acc = acc + val if (i + j) % 2 == 0 else acc - val
        values[idx] = acc
    return fill_alternating(values, mdim, arity, (mdim,))


def has_degree_zero(s: HLRStructure) -> bool:
    """C^0 = L is part of the complex only for identity twists."""
    return is_zero(s.alpha - eye(s.dim)) and is_zero(s.phi - eye(s.algebra.dim))


def inner(s: HLRStructure, x: np.ndarray) -> Multiderivation:
    """delta_0(x): the degree-0 element y -> [x, y] with symbol rho(x)."""
    return Multiderivation(s.module, 0, contract(s.bracket, [x]), contract(s.anchor, [x]))


@dataclass
class CohomologyReport:
    degree: int
    dim_cochains: int
    dim_cocycles: int
    dim_coboundaries: int
    representatives: SubspaceBasis
    representative_elements: tuple = ()

    @property
    def betti(self) -> int:
        return self.dim_cocycles - self.dim_coboundaries

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dim_cochains": self.dim_cochains,
            "dim_cocycles": self.dim_cocycles,
            "dim_coboundaries": self.dim_coboundaries,
            "betti": self.betti,
            "representatives": [[str(c) for c in v] for v in self.representatives.vectors],
        }


class DeformationComplex:
    """Cochain spaces, coboundary matrices and cohomology of one structure.

    Matrices are in the bases returned by ``mder_space``; column j of
    ``delta_matrix(n)`` holds the coordinates of delta(basis_j of C^n).
    """

    def __init__(self, s: HLRStructure, check: bool = True):
        if check:
            rep = validate_hlr(s)
            if not rep.ok:
                raise ValueError(f"not a hom-Lie-Rinehart structure: {rep.identities()}")
        self.structure = s
        self.m = from_structure(s, check=False)
        self.with_c0 = has_degree_zero(s)
        self._delta: dict[int, list] = {}

    @property
    def lowest(self) -> int:
        return 0 if self.with_c0 else 1

    def space(self, n: int) -> MderSpace:
        if n < 1:
            raise ValueError("C^n_def as multiderivations needs n >= 1")
        return mder_space(self.structure.module, n - 1)

    def dim(self, n: int) -> int:
        if n < self.lowest:
            return 0
        if n == 0:
            return self.structure.dim
        return self.space(n).dim

    def cochain(self, n: int, coeffs) -> Multiderivation:
        return self.space(n).element(coeffs)

    def apply(self, D: Multiderivation) -> Multiderivation:
        return bracket(self.m, D)

    def delta_matrix(self, n: int) -> list:
        """Matrix of delta: C^n -> C^{n+1} (rows = dim C^{n+1})."""
        if n in self._delta:
            return self._delta[n]
        target = self.space(n + 1)
        cols = []
        if n < self.lowest:
            mat = [[] for _ in range(target.dim)]
            self._delta[n] = mat
            return mat
        if n == 0:
            images = [inner(self.structure, unit(self.structure.dim, i)) for i in range(self.structure.dim)]
        else:
            images = [self.apply(e) for e in self.space(n).elements]
        for img in images:
            cols.append(target.coordinates(img))
        mat = transpose(cols) if cols else [[] for _ in range(target.dim)]
        self._delta[n] = mat
        return mat

    def rank_delta(self, n: int) -> int:
        if n < self.lowest:
            return 0
        mat = self.delta_matrix(n)
        return rank(mat) if mat and mat[0] else 0

    def cohomology(self, n: int) -> CohomologyReport:
        if n < self.lowest:
            raise ValueError(f"the complex starts in degree {self.lowest}")
        dim_c = self.dim(n)
        mat = self.delta_matrix(n)
        Z = nullspace_basis(mat, dim_c) if mat else nullspace_basis([], dim_c)
        dim_b = self.rank_delta(n - 1) if n - 1 >= self.lowest else 0
        B_vecs = []
        if dim_b:
            prev = self.delta_matrix(n - 1)
            B_vecs = [list(c) for c in zip(*prev)] if prev else []
        picks = complement_representatives(B_vecs, [list(v) for v in Z.vectors])
        reps = SubspaceBasis(dim_c, tuple(Z.vectors[i] for i in picks))
        elems = ()
        if n >= 1:
            elems = tuple(self.space(n).element(v) for v in reps.vectors)
        return CohomologyReport(n, dim_c, Z.dim, dim_b, reps, elems)

    def is_coboundary(self, n: int, D: Multiderivation) -> Optional[list]:
        """Coordinates of a primitive E with delta(E) = D, or None."""
        from homdef.linalg import solve
        target = self.space(n).coordinates(D)
        mat = self.delta_matrix(n - 1)
        return solve(mat, target, ncols=self.dim(n - 1))


@lru_cache(maxsize=None)
def deformation_complex(s: HLRStructure) -> DeformationComplex:
    return DeformationComplex(s)


def cohomology(s: HLRStructure, n: int) -> CohomologyReport:
    return deformation_complex(s).cohomology(n)


# --------------------------------------------------------------------------
# cochains with coefficients in a left module


class CochainError(ValueError):
    pass


def check_module_cochain(base: HLRStructure, mod: HLRModule, f: np.ndarray, n: int) -> list:
    """Violated cochain conditions of f: wedge^n L -> M (empty list when f is a cochain)."""
    A = base.algebra
    m, k = base.dim, A.dim
    M = mod.carrier
    bad = []
    alpha = base.alpha
    Pn = A.phi_power(max(n - 1, 0))
    for idx in increasing(m, n):
        lhs = contract(f, [alpha[:, i] for i in idx])
        if not is_zero(np.asarray(lhs - M.beta.dot(f[idx]))):
            bad.append(("f(alpha..) = beta f(..)", idx))
    for idx in increasing(m, n - 1):
        head = [unit(m, i) for i in idx]
        for x in range(m):
            for a in range(k):
                lhs = contract(f, head + [base.module.action[a, x]])
                rhs = M.act(Pn[:, a], contract(f, head + [unit(m, x)]))
                if not is_zero(np.asarray(lhs - rhs)):
                    bad.append(("phi^{n-1}-linearity", idx + (x, a)))
    return bad


def module_cochain_delta(base: HLRStructure, mod: HLRModule, f: np.ndarray, n: int,
                         check: bool = True) -> np.ndarray:
    """Coboundary of an n-cochain with values in a left module.

    delta f(x_0..x_n) = sum_i (-1)^i {alpha^{n-1} x_i, f(.. ^x_i ..)}
                      + sum_{i<j} (-1)^{i+j} f([x_i, x_j], alpha x_0 .. ^ .. ^ ..)
    """
    if n < 1:
        raise ValueError("cochains start in degree 1")
    if check:
        bad = check_module_cochain(base, mod, f, n)
        if bad:
            raise CochainError(f"not a cochain: {bad[0]}")
    m = base.dim
    dm = mod.carrier.dim
    alpha = base.alpha
    An = matpow(alpha, n - 1)
    values = {}
    for idx in increasing(m, n + 1):
        acc = zeros((dm,))
        for i in range(n + 1):
            rest = [unit(m, idx[j]) for j in range(n + 1) if j != i]
            val = mod.theta(An[:, idx[i]]).dot(contract(f, rest))
            acc = acc + val if i % 2 == 0 else acc - val
        for i, j in combinations(range(n + 1), 2):
            rest = [alpha[:, idx[l]] for l in range(n + 1) if l not in (i, j)]
            val = contract(f, [base.bracket[idx[i], idx[j]]] + rest)
            acc = acc + val if (i + j) % 2 == 0 else acc - val
        values[idx] = acc
    return fill_alternating(values, m, n + 1, (dm,))


def module_cochain_space(base: HLRStructure, mod: HLRModule, n: int) -> SubspaceBasis:
    """Basis (flattened alternating coordinates) of C^n(L; M)."""
    m, dm = base.dim, mod.carrier.dim
    size = alternating_size(m, n, (dm,))
    cols = []
    for c in range(size):
        e = [ZERO] * size
        e[c] = 1
        f = alternating_from_coords(e, m, n, (dm,))
        cols.append(_cochain_residual(base, mod, f, n))
    rows = transpose(cols) if cols and cols[0] else []
    return nullspace_basis(rows, size)


def _cochain_residual(base, mod, f, n) -> list:
    A = base.algebra
    m, k = base.dim, A.dim
    M = mod.carrier
    alpha = base.alpha
    Pn = A.phi_power(max(n - 1, 0))
    out = []
    for idx in increasing(m, n):
        out.extend(np.asarray(contract(f, [alpha[:, i] for i in idx]) - M.beta.dot(f[idx])).flat)
    for idx in increasing(m, n - 1):
        head = [unit(m, i) for i in idx]
        for x in range(m):
            for a in range(k):
                lhs = contract(f, head + [base.module.action[a, x]])
                rhs = M.act(Pn[:, a], contract(f, head + [unit(m, x)]))
                out.extend(np.asarray(lhs - rhs).flat)
    return out


def module_cohomology_dims(base: HLRStructure, mod: HLRModule, n: int) -> tuple[int, int, int]:
    """(dim C^n, dim Z^n, dim B^n) of the module-coefficient complex (starting at n = 1)."""
    m, dm = base.dim, mod.carrier.dim

    def dmat(k):
        C = module_cochain_space(base, mod, k)
        cols = []
        for v in C.vectors:
            f = alternating_from_coords(list(v), m, k, (dm,))
            cols.append(alternating_coords(module_cochain_delta(base, mod, f, k, check=False), m, k + 1))
        return C, cols

    C, cols = dmat(n)
    r = rank(transpose(cols)) if cols else 0
    b = 0
    if n > 1:
        _, prev = dmat(n - 1)
        b = rank(transpose(prev)) if prev else 0
    return C.dim, C.dim - r, b


# --------------------------------------------------------------------------
# Koszul splitting for free modules (identity twists)


@dataclass
class SplittingAudit:
    degree: int
    dim_der: int
    dim_hom_wedge: int
    dim_hom_der: int
    injective: bool
    f_is_a_multilinear: bool
    notes: list = field(default_factory=list)

    @property
    def additive(self) -> bool:
        return self.dim_der == self.dim_hom_wedge + self.dim_hom_der

    @property
    def ok(self) -> bool:
        return self.additive and self.injective and self.f_is_a_multilinear

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dim_der": self.dim_der,
            "dim_hom_wedge": self.dim_hom_wedge,
            "dim_hom_der": self.dim_hom_der,
            "additive": self.additive,
            "injective": self.injective,
            "f_is_a_multilinear": self.f_is_a_multilinear,
        }


def koszul_connection(L: ModuleSpec, X: np.ndarray, v: np.ndarray) -> np.ndarray:
    """nabla_X(sum_g a_g g) = sum_g X(a_g) g on a free module."""
    k = L.algebra.dim
    out = zeros((L.dim,))
    for g in range(L.free_rank):
        out[g * k:(g + 1) * k] = X.dot(v[g * k:(g + 1) * k])
    return out


def connection_split(D: Multiderivation) -> np.ndarray:
    """F_D = D + (-1)^n sum_i (-1)^{i+1} nabla_{sigma(.. ^x_i ..)}(x_i)."""
    L = D.module
    m, n = L.dim, D.degree
    values = {}
    for idx in increasing(m, n + 1):
        acc = D.d[idx]
        for i in range(n + 1):
            rest = tuple(idx[j] for j in range(n + 1) if j != i)
            term = koszul_connection(L, D.sigma[rest], unit(m, idx[i]))
            sgn = (-1) ** n * (-1) ** (i + 1)
            acc = acc + term if sgn > 0 else acc - term
        values[idx] = acc
    return fill_alternating(values, m, n + 1, (m,))


def _a_multilinear_space(L: ModuleSpec, arity: int, tail: tuple, derivations: bool) -> SubspaceBasis:
    m = L.dim
    size = alternating_size(m, arity, tail)
    cols = []
    for c in range(size):
        e = [ZERO] * size
        e[c] = 1
        cols.append(_a_linear_residual(L, alternating_from_coords(e, m, arity, tail), arity, derivations))
    rows = transpose(cols) if cols and cols[0] else []
    return nullspace_basis(rows, size)


def _a_linear_residual(L, f, arity, derivations) -> list:
    A = L.algebra
    m, k = L.dim, A.dim
    out = []
    for idx in increasing(m, arity - 1) if arity else []:
        head = [unit(m, i) for i in idx]
        for x in range(m):
            base = contract(f, head + [unit(m, x)])
            for a in range(k):
                lhs = contract(f, head + [L.action[a, x]])
                rhs = A.mul_op(unit(k, a)).dot(base) if derivations else L.act(unit(k, a), base)
                out.extend(np.asarray(lhs - rhs).flat)
    if derivations:
        for idx in increasing(m, arity):
            s = f[idx]
            for i in range(k):
                for j in range(i, k):
                    val = s.dot(A.mu[i, j]) - A.mul(unit(k, i), s[:, j]) - A.mul(unit(k, j), s[:, i])
                    out.extend(val.flat)
    return out


def splitting_audit(L: ModuleSpec, n: int) -> SplittingAudit:
    """Check Der^n(L) = Hom_A(wedge^{n+1} L, L) + Hom_A(wedge^n L, Der A) on a free module."""
    if L.free_rank is None:
        raise ValueError("splitting audit needs a free module with a designated basis")
    if not (is_zero(L.beta - eye(L.dim)) and is_zero(L.algebra.phi - eye(L.algebra.dim))):
        raise ValueError("splitting audit is for phi = id and beta = id")
    m, k = L.dim, L.algebra.dim
    S = mder_space(L, n)
    hom_wedge = _a_multilinear_space(L, n + 1, (m,), derivations=False)
    hom_der = _a_multilinear_space(L, n, (k, k), derivations=True)
    cols = []
    f_ok = True
    for D in S.elements:
        F = connection_split(D)
        fc = alternating_coords(F, m, n + 1)
        if not hom_wedge.contains(fc):
            f_ok = False
        cols.append(fc + alternating_coords(D.sigma, m, n))
    injective = (rank(transpose(cols)) == S.dim) if cols else True
    return SplittingAudit(n, S.dim, hom_wedge.dim, hom_der.dim, injective, f_ok)
