"""The graded Lie algebra of (phi, beta)-multiderivations of a module (M, beta).

A degree-n multiderivation is kept together with its symbol, as the pair

* ``d``: alternating map of n+1 arguments, array shape ``(m,)*(n+1) + (m,)``;
* ``sigma``: alternating map of n arguments into phi^n-derivations of A,
  array shape ``(m,)*n + (k, k)`` (each value a matrix acting on A).

The bracket consumes the symbol, and the symbol is not determined by ``d`` on
non-faithful modules, so the pair is the unit of computation throughout.
Shuffle sums index arguments ``0..p+q`` and use ``tensors.shuffles``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from homdef.algebra import ModuleSpec, ValidationReport
from homdef.linalg import ZERO, ONE, SubspaceBasis, nullspace_basis, rank, solve, transpose
from homdef.tensors import (
    alternating_coords,
    alternating_from_coords,
    alternating_size,
    contract,
    fill_alternating,
    increasing,
    is_zero,
    shuffles,
    unit,
    zeros,
)


@dataclass(frozen=True, eq=False)
class Multiderivation:
    module: ModuleSpec
    degree: int
    d: np.ndarray
    sigma: np.ndarray

    @classmethod
    def zero(cls, module: ModuleSpec, degree: int) -> "Multiderivation":
        m, k = module.dim, module.algebra.dim
        return cls(module, degree, zeros((m,) * (degree + 1) + (m,)), zeros((m,) * degree + (k, k)))

    @classmethod
    def from_coords(cls, module: ModuleSpec, degree: int, coords: Sequence) -> "Multiderivation":
        m, k = module.dim, module.algebra.dim
        nd = alternating_size(m, degree + 1, (m,))
        d = alternating_from_coords(list(coords[:nd]), m, degree + 1, (m,))
        s = alternating_from_coords(list(coords[nd:]), m, degree, (k, k))
        return cls(module, degree, d, s)

    def coords(self) -> list:
        m = self.module.dim
        return alternating_coords(self.d, m, self.degree + 1) + alternating_coords(self.sigma, m, self.degree)

    @property
    def n_d_coords(self) -> int:
        return alternating_size(self.module.dim, self.degree + 1, (self.module.dim,))

    def __add__(self, other: "Multiderivation") -> "Multiderivation":
        _same_carrier(self, other)
        if self.degree != other.degree:
            raise ValueError("cannot add multiderivations of different degree")
        return Multiderivation(self.module, self.degree, self.d + other.d, self.sigma + other.sigma)

    def __sub__(self, other: "Multiderivation") -> "Multiderivation":
        return self + (-other)

    def __neg__(self) -> "Multiderivation":
        return Multiderivation(self.module, self.degree, -self.d, -self.sigma)

    def scale(self, c) -> "Multiderivation":
        return Multiderivation(self.module, self.degree, self.d * c, self.sigma * c)

    def is_zero(self) -> bool:
        return is_zero(self.d) and is_zero(self.sigma)

    def equals(self, other: "Multiderivation") -> bool:
        return (self.module is other.module and self.degree == other.degree
                and is_zero(self.d - other.d) and is_zero(self.sigma - other.sigma))

    def __call__(self, *vecs):
        return contract(self.d, list(vecs))

    def symbol(self, *vecs) -> np.ndarray:
        return contract(self.sigma, list(vecs))


class CarrierMismatch(ValueError):
    pass


class MaurerCartanError(ValueError):
    def __init__(self, witness, value):
        super().__init__(f"[m, m] does not vanish at {witness}")
        self.witness = witness
        self.value = value


def _same_carrier(a: Multiderivation, b: Multiderivation) -> None:
    if a.module is not b.module:
        raise CarrierMismatch("multiderivations live on different modules")


def linear_combination(module: ModuleSpec, degree: int, coeffs, elements) -> Multiderivation:
    out = Multiderivation.zero(module, degree)
    for c, e in zip(coeffs, elements):
        if c:
            out = out + e.scale(c)
    return out


# --------------------------------------------------------------------------
# the defining constraints


def residuals(md: Multiderivation):
    """Yield ``(label, witness, value)`` for every defining identity of a multiderivation.

    ``value`` is zero exactly when the identity holds at that witness.  The
    enumeration order is fixed, so the flattened residual is a deterministic
    linear function of the pair (d, sigma).
    """
    M = md.module
    A = M.algebra
    m, k, n = M.dim, A.dim, md.degree
    beta, phi = M.beta, A.phi
    Pn = A.phi_power(n)
    Bn = M.beta_power(n)
    E = [unit(m, i) for i in range(m)]
    for idx in increasing(m, n + 1):
        lhs = contract(md.d, [beta[:, i] for i in idx])
        yield "(i) D(beta..) = beta D(..)", idx, lhs - beta.dot(md.d[idx])
    for idx in increasing(m, n):
        s = md.sigma[idx]
        yield "(ii) sigma(beta..) phi = phi sigma(..)", idx, \
            contract(md.sigma, [beta[:, i] for i in idx]).dot(phi) - phi.dot(s)
        for i in range(k):
            for j in range(i, k):
                val = (s.dot(A.mu[i, j]) - A.mul(Pn[:, i], s[:, j]) - A.mul(Pn[:, j], s[:, i]))
                yield "sigma value is a phi^n-derivation", idx + (("a", i, j),), val
    if n >= 1:
        for idx in increasing(m, n - 1):
            head = [E[i] for i in idx]
            for x in range(m):
                base = contract(md.sigma, head + [E[x]])
                for a in range(k):
                    lhs = contract(md.sigma, head + [M.action[a, x]])
                    yield "(iii) sigma(.., a.x) = phi^n(a) sigma(.., x)", idx + (x, ("a", a)), \
                        lhs - A.mul_op(Pn[:, a]).dot(base)
    for idx in increasing(m, n):
        head = [E[i] for i in idx]
        s = md.sigma[idx]
        for x in range(m):
            base = md.d[idx + (x,)]
            for a in range(k):
                lhs = contract(md.d, head + [M.action[a, x]])
                rhs = M.act(Pn[:, a], base) + M.act(s[:, a], Bn[:, x])
                yield "(iv) Leibniz rule", idx + (x, ("a", a)), lhs - rhs


def residual_vector(md: Multiderivation) -> list:
    out = []
    for _, _, val in residuals(md):
        if isinstance(val, np.ndarray):
            out.extend(val.flat)
        else:
            out.append(val)
    return out


def check_multiderivation(md: Multiderivation) -> ValidationReport:
    rep = ValidationReport(f"multiderivation of degree {md.degree}")
    names = md.module.names
    anames = md.module.algebra.names
    for label, witness, val in residuals(md):
        if not is_zero(np.asarray(val)):
            w = tuple(names[i] if isinstance(i, int) else
                      (anames[i[1]] if len(i) == 2 else f"{anames[i[1]]}*{anames[i[2]]}")
                      for i in witness)
            rep.add(label, w)
    return rep


def _constraint_matrix(module: ModuleSpec, degree: int, cols: range):
    """Residual map restricted to the given unknown coordinates, as rows."""
    size = _total_size(module, degree)
    columns = []
    for c in cols:
        e = [ZERO] * size
        e[c] = ONE
        columns.append(residual_vector(Multiderivation.from_coords(module, degree, e)))
    nrows = len(residual_vector(Multiderivation.zero(module, degree)))
    if not columns:
        return [[] for _ in range(nrows)]
    return transpose(columns)


def _total_size(module: ModuleSpec, degree: int) -> int:
    m, k = module.dim, module.algebra.dim
    return alternating_size(m, degree + 1, (m,)) + alternating_size(m, degree, (k, k))


# --------------------------------------------------------------------------
# the space of multiderivations


@dataclass(frozen=True, eq=False)
class MderSpace:
    module: ModuleSpec
    degree: int
    basis: SubspaceBasis
    elements: tuple[Multiderivation, ...]

    @property
    def dim(self) -> int:
        return len(self.elements)

    def coordinates(self, md: Multiderivation) -> list:
        if md.degree != self.degree:
            raise ValueError("degree mismatch")
        return self.basis.coordinates(md.coords())

    def contains(self, md: Multiderivation) -> bool:
        return md.degree == self.degree and self.basis.contains(md.coords())

    def element(self, coeffs) -> Multiderivation:
        return linear_combination(self.module, self.degree, coeffs, self.elements)

    def projection_injective(self) -> bool:
        """Whether (D, sigma) -> D is injective on this space."""
        if not self.elements:
            return True
        nd = self.elements[0].n_d_coords
        rows = [list(v[:nd]) for v in self.basis.vectors]
        return rank(rows) == self.dim if nd else self.dim == 0


@lru_cache(maxsize=None)
def mder_space(module: ModuleSpec, degree: int) -> MderSpace:
    """Basis of the degree-n (phi, beta)-multiderivations, as (D, sigma) pairs."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    size = _total_size(module, degree)
    rows = _constraint_matrix(module, degree, range(size))
    basis = nullspace_basis(rows, size)
    elems = tuple(Multiderivation.from_coords(module, degree, v) for v in basis.vectors)
    return MderSpace(module, degree, basis, elems)


def recompute_symbol(module: ModuleSpec, degree: int, d: np.ndarray) -> Optional[np.ndarray]:
    """A symbol making (d, sigma) a multiderivation, or None if none exists."""
    size = _total_size(module, degree)
    nd = alternating_size(module.dim, degree + 1, (module.dim,))
    rows = _constraint_matrix(module, degree, range(nd, size))
    k = module.algebra.dim
    base = residual_vector(Multiderivation(module, degree, d, zeros((module.dim,) * degree + (k, k))))
    x = solve(rows, [-v for v in base], ncols=size - nd)
    if x is None:
        return None
    return Multiderivation.from_coords(module, degree, [ZERO] * nd + list(x)).sigma


# --------------------------------------------------------------------------
# circle product, symbol terms, bracket


def _beta_cols(module: ModuleSpec, power: int) -> np.ndarray:
    return module.beta_power(power)


def circ_tensor(D1: Multiderivation, D2: Multiderivation) -> np.ndarray:
    """(D1 o D2)(x_0..x_{p+q}) as a full alternating array.

    Sum over (q+1, p)-shuffles of D1(D2(x_S), beta^q(x_R)) with the shuffle sign.
    """
    _same_carrier(D1, D2)
    M = D1.module
    m = M.dim
    p, q = D1.degree, D2.degree
    arity = p + q + 1
    Bq = _beta_cols(M, q)
    sh = shuffles(q + 1, p)
    values = {}
    for idx in increasing(m, arity):
        acc = zeros((m,))
        for head, tail, sgn in sh:
            inner = D2.d[tuple(idx[h] for h in head)]
            if is_zero(inner):
                continue
            val = contract(D1.d, [inner] + [Bq[:, idx[t]] for t in tail])
            acc = acc + val if sgn > 0 else acc - val
        values[idx] = acc
    return fill_alternating(values, m, arity, (m,))


def circ(D1: Multiderivation, D2: Multiderivation) -> np.ndarray:
    return circ_tensor(D1, D2)


def symbol_odot(D1: Multiderivation, D2: Multiderivation) -> np.ndarray:
    """(sigma_{D1} . D2)(x_1..x_{p+q})(a): sum over (q+1, p-1)-shuffles.

    Zero when D1 has degree 0 (there are no such shuffles).
    """
    _same_carrier(D1, D2)
    M = D1.module
    A = M.algebra
    m, k = M.dim, A.dim
    p, q = D1.degree, D2.degree
    arity = p + q
    if p == 0:
        return zeros((m,) * arity + (k, k))
    Bq = _beta_cols(M, q)
    Pq = A.phi_power(q)
    sh = shuffles(q + 1, p - 1)
    values = {}
    for idx in increasing(m, arity):
        acc = zeros((k, k))
        for head, tail, sgn in sh:
            inner = D2.d[tuple(idx[h] for h in head)]
            if is_zero(inner):
                continue
            val = contract(D1.sigma, [inner] + [Bq[:, idx[t]] for t in tail]).dot(Pq)
            acc = acc + val if sgn > 0 else acc - val
        values[idx] = acc
    return fill_alternating(values, m, arity, (k, k))


def symbol_curly(D1: Multiderivation, D2: Multiderivation) -> np.ndarray:
    """{sigma_{D1}, sigma_{D2}}(x_1..x_{p+q}) over (p, q)-shuffles.

    Each term is sigma1(beta^q x_S) sigma2(x_R) - sigma2(beta^p x_R) sigma1(x_S),
    composed as operators on A.
    """
    _same_carrier(D1, D2)
    M = D1.module
    m, k = M.dim, M.algebra.dim
    p, q = D1.degree, D2.degree
    arity = p + q
    Bp, Bq = _beta_cols(M, p), _beta_cols(M, q)
    sh = shuffles(p, q)
    values = {}
    for idx in increasing(m, arity):
        acc = zeros((k, k))
        for head, tail, sgn in sh:
            xs = [idx[h] for h in head]
            xr = [idx[t] for t in tail]
            s1b = contract(D1.sigma, [Bq[:, i] for i in xs])
            s2 = D2.sigma[tuple(xr)]
            s2b = contract(D2.sigma, [Bp[:, i] for i in xr])
            s1 = D1.sigma[tuple(xs)]
            val = s1b.dot(s2) - s2b.dot(s1)
            acc = acc + val if sgn > 0 else acc - val
        values[idx] = acc
    return fill_alternating(values, m, arity, (k, k))


def bracket(D1: Multiderivation, D2: Multiderivation) -> Multiderivation:
    """[D1, D2] = (-1)^{pq} D1 o D2 - D2 o D1, with its symbol.

    The symbol is (-1)^{pq} sigma1 . D2 - sigma2 . D1 + {sigma1, sigma2}.
    """
    _same_carrier(D1, D2)
    p, q = D1.degree, D2.degree
    sign = -1 if (p * q) % 2 else 1
    d = circ_tensor(D1, D2) * sign - circ_tensor(D2, D1)
    s = symbol_odot(D1, D2) * sign - symbol_odot(D2, D1) + symbol_curly(D1, D2)
    return Multiderivation(D1.module, p + q, d, s)


# --------------------------------------------------------------------------
# Maurer-Cartan elements <-> hom-Lie-Rinehart structures


def from_structure(s, check: bool = True) -> Multiderivation:
    """The degree-1 element whose value is the bracket and whose symbol is the anchor."""
    if check:
        from homdef.hlr import validate_hlr
        rep = validate_hlr(s)
        if not rep.ok:
            raise ValueError(f"not a hom-Lie-Rinehart structure: {rep.identities()}")
    return Multiderivation(s.module, 1, s.bracket.copy(), s.anchor.copy())


def maurer_cartan_witness(md: Multiderivation):
    """First basis triple (or symbol pair) where [m, m] is nonzero, else None."""
    mm = bracket(md, md)
    names = md.module.names
    for idx in increasing(md.module.dim, 3):
        if not is_zero(mm.d[idx]):
            return ("value",) + tuple(names[i] for i in idx), mm.d[idx]
    for idx in increasing(md.module.dim, 2):
        if not is_zero(mm.sigma[idx]):
            return ("symbol",) + tuple(names[i] for i in idx), mm.sigma[idx]
    return None


def to_structure(md: Multiderivation):
    from homdef.hlr import HLRStructure
    if md.degree != 1:
        raise ValueError("a hom-Lie-Rinehart structure is a degree-1 element")
    w = maurer_cartan_witness(md)
    if w is not None:
        raise MaurerCartanError(*w)
    return HLRStructure(md.module, md.d.copy(), md.sigma.copy())
