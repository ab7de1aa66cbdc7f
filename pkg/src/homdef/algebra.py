"""Commutative algebras with an endomorphism, modules over them, phi-derivations.

Conventions: vectors are coordinate columns in the fixed ordered basis, and a
linear map is stored as the matrix whose column ``j`` is the image of basis
element ``j``.  So ``phi @ a`` is phi(a) and ``beta @ x`` is beta(x).

Structure constants:

* ``mu[i, j]`` is the coordinate vector of ``e_i * e_j`` in A;
* ``action[i, x]`` is the coordinate vector of ``e_i . f_x`` in M.

Every identity is checked on basis tuples only, which suffices by
multilinearity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from homdef.linalg import ONE, ZERO, SubspaceBasis, nullspace_basis
from homdef.tensors import eye, is_zero, matpow, unit, zeros


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    identity: str
    witness: tuple
    detail: str = ""

    def as_dict(self) -> dict:
        return {"identity": self.identity, "witness": list(self.witness), "detail": self.detail}


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, identity: str, witness, detail: str = "") -> None:
        self.violations.append(Violation(identity, tuple(witness), detail))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def identities(self) -> list[str]:
        return [v.identity for v in self.violations]

    def as_dict(self) -> dict:
        return {"subject": self.subject, "ok": self.ok,
                "violations": [v.as_dict() for v in self.violations]}

    def __bool__(self) -> bool:
        return self.ok


def _fmt(v) -> str:
    return "[" + ", ".join(str(x) for x in np.asarray(v).flat) + "]"


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Commutative unital algebra over Q with a designated endomorphism phi."""

    mu: np.ndarray
    unit_vector: np.ndarray
    phi: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        k = self.mu.shape[0]
        if self.mu.shape != (k, k, k):
            raise ShapeError(f"structure constants must have shape (k,k,k), got {self.mu.shape}")
        if self.unit_vector.shape != (k,):
            raise ShapeError("unit vector has the wrong length")
        if self.phi.shape != (k, k):
            raise ShapeError("phi must be a k x k matrix")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"a{i}" for i in range(k)))
        elif len(self.names) != k:
            raise ShapeError("wrong number of basis names")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = zeros((self.dim,))
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    out = out + self.mu[i, j] * (ai * bj)
        return out

    def mul_op(self, a: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by ``a``."""
        m = zeros((self.dim, self.dim))
        for j in range(self.dim):
            m[:, j] = self.mul(a, unit(self.dim, j))
        return m

    def phi_power(self, n: int) -> np.ndarray:
        return matpow(self.phi, n)

    def phi_inverse(self) -> np.ndarray:
        from homdef.linalg import solve
        cols = []
        rows = [list(r) for r in self.phi]
        for j in range(self.dim):
            x = solve(rows, list(unit(self.dim, j)))
            if x is None:
                raise ValueError("phi is not invertible")
            cols.append(x)
        return np.array(cols, dtype=object).T.copy()

    def with_phi(self, phi: np.ndarray) -> "AlgebraSpec":
        return AlgebraSpec(self.mu, self.unit_vector, phi, self.names)

    def same_as(self, other: "AlgebraSpec") -> bool:
        return (self is other) or (
            self.mu.shape == other.mu.shape
            and is_zero(self.mu - other.mu)
            and is_zero(self.unit_vector - other.unit_vector)
            and is_zero(self.phi - other.phi))


@dataclass(frozen=True, eq=False)
class ModuleSpec:
    """Finite-dimensional A-module with a phi-function-linear map beta.

    ``free_rank`` is set when the module is A^r in the basis ``e_b . g_i``
    (index ``i * dim A + b``); only then is a Koszul connection available.
    """

    algebra: AlgebraSpec
    action: np.ndarray
    beta: np.ndarray
    names: tuple[str, ...] = ()
    free_rank: Optional[int] = None

    def __post_init__(self):
        k = self.algebra.dim
        m = self.beta.shape[0]
        if self.beta.shape != (m, m):
            raise ShapeError("beta must be square")
        if self.action.shape != (k, m, m):
            raise ShapeError(f"action must have shape ({k},{m},{m}), got {self.action.shape}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(m)))
        elif len(self.names) != m:
            raise ShapeError("wrong number of basis names")

    @property
    def dim(self) -> int:
        return self.beta.shape[0]

    def act(self, a: np.ndarray, x: np.ndarray) -> np.ndarray:
        out = zeros((self.dim,))
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, xj in enumerate(x):
                if xj:
                    out = out + self.action[i, j] * (ai * xj)
        return out

    def act_op(self, a: np.ndarray) -> np.ndarray:
        m = zeros((self.dim, self.dim))
        for j in range(self.dim):
            m[:, j] = self.act(a, unit(self.dim, j))
        return m

    def beta_power(self, n: int) -> np.ndarray:
        return matpow(self.beta, n)

    def with_beta(self, beta: np.ndarray, algebra: Optional[AlgebraSpec] = None) -> "ModuleSpec":
        return ModuleSpec(algebra or self.algebra, self.action, beta, self.names, self.free_rank)


@dataclass(frozen=True, eq=False)
class PhiDerivation:
    """A phi^n-derivation of A, as a dim A x dim A matrix."""

    degree_power: int
    matrix: np.ndarray


# --------------------------------------------------------------------------
# constructors


def ground_field() -> AlgebraSpec:
    mu = zeros((1, 1, 1))
    mu[0, 0, 0] = ONE
    return AlgebraSpec(mu, unit(1, 0), eye(1), ("1",))


def truncated_polynomial_algebra(n: int, phi_x: Optional[Sequence] = None) -> AlgebraSpec:
    """Q[x]/(x^n) in the basis 1, x, ..., x^(n-1).

    ``phi_x`` gives the coordinates of phi(x); phi is extended multiplicatively.
    Defaults to the identity.
    """
    mu = zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            if i + j < n:
                mu[i, j, i + j] = ONE
    names = tuple("1" if i == 0 else ("x" if i == 1 else f"x^{i}") for i in range(n))
    base = AlgebraSpec(mu, unit(n, 0), eye(n), names)
    if phi_x is None or n == 1:
        return base
    from homdef.linalg import Q
    px = np.array([Q(c) for c in phi_x], dtype=object)
    phi = zeros((n, n))
    power = unit(n, 0)
    for j in range(n):
        phi[:, j] = power
        power = base.mul(power, px)
    return base.with_phi(phi)


def regular_module(A: AlgebraSpec, beta: Optional[np.ndarray] = None) -> ModuleSpec:
    """A as a module over itself; beta defaults to phi."""
    return ModuleSpec(A, A.mu.copy(), A.phi.copy() if beta is None else beta, A.names)


def free_module(A: AlgebraSpec, r: int, beta: Optional[np.ndarray] = None) -> ModuleSpec:
    """A^r with basis ``e_b . g_i``; beta defaults to phi on every coordinate."""
    k = A.dim
    m = k * r
    action = zeros((k, m, m))
    for i in range(k):
        for g in range(r):
            for b in range(k):
                prod = A.mu[i, b]
                for c in range(k):
                    action[i, g * k + b, g * k + c] = prod[c]
    if beta is None:
        beta = zeros((m, m))
        for g in range(r):
            beta[g * k:(g + 1) * k, g * k:(g + 1) * k] = A.phi
    names = tuple(f"{A.names[b]}*g{g + 1}" for g in range(r) for b in range(k))
    return ModuleSpec(A, action, beta, names, free_rank=r)


def vector_space(A: AlgebraSpec, m: int, beta: Optional[np.ndarray] = None,
                 names: Sequence[str] = ()) -> ModuleSpec:
    """Q^m as a module over the ground field A = Q."""
    if A.dim != 1:
        raise ShapeError("vector_space needs the ground field as algebra")
    action = zeros((1, m, m))
    c = A.unit_vector[0]
    for x in range(m):
        action[0, x, x] = 1 / c
    return ModuleSpec(A, action, eye(m) if beta is None else beta, tuple(names))


# --------------------------------------------------------------------------
# validation


def validate_algebra(spec: AlgebraSpec) -> ValidationReport:
    rep = ValidationReport("algebra")
    k = spec.dim
    nm = spec.names
    E = [unit(k, i) for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            if not is_zero(spec.mu[i, j] - spec.mu[j, i]):
                rep.add("commutativity", (nm[i], nm[j]))
    for i in range(k):
        for j in range(k):
            for l in range(k):
                lhs = spec.mul(spec.mu[i, j], E[l])
                rhs = spec.mul(E[i], spec.mu[j, l])
                if not is_zero(lhs - rhs):
                    rep.add("associativity", (nm[i], nm[j], nm[l]), f"{_fmt(lhs)} != {_fmt(rhs)}")
    for i in range(k):
        if not is_zero(spec.mul(spec.unit_vector, E[i]) - E[i]):
            rep.add("unit", (nm[i],))
    if not is_zero(spec.phi.dot(spec.unit_vector) - spec.unit_vector):
        rep.add("phi(1)=1", ())
    for i in range(k):
        for j in range(i, k):
            lhs = spec.phi.dot(spec.mu[i, j])
            rhs = spec.mul(spec.phi[:, i], spec.phi[:, j])
            if not is_zero(lhs - rhs):
                rep.add("phi multiplicative", (nm[i], nm[j]), f"phi(ab)={_fmt(lhs)} but phi(a)phi(b)={_fmt(rhs)}")
    return rep


def validate_module(spec: ModuleSpec) -> ValidationReport:
    rep = ValidationReport("module")
    A = spec.algebra
    k, m = A.dim, spec.dim
    an, mn = A.names, spec.names
    F = [unit(m, x) for x in range(m)]
    for i in range(k):
        for j in range(k):
            for x in range(m):
                lhs = spec.act(A.mu[i, j], F[x])
                rhs = spec.act(unit(k, i), spec.action[j, x])
                if not is_zero(lhs - rhs):
                    rep.add("module associativity", (an[i], an[j], mn[x]))
    for x in range(m):
        if not is_zero(spec.act(A.unit_vector, F[x]) - F[x]):
            rep.add("module unit", (mn[x],))
    for i in range(k):
        for x in range(m):
            lhs = spec.beta.dot(spec.action[i, x])
            rhs = spec.act(A.phi[:, i], spec.beta[:, x])
            if not is_zero(lhs - rhs):
                rep.add("beta phi-linear", (an[i], mn[x]),
                        f"beta(a.x)={_fmt(lhs)} but phi(a).beta(x)={_fmt(rhs)}")
    return rep


# --------------------------------------------------------------------------
# phi-derivations


def derivation_constraint_rows(A: AlgebraSpec, n: int) -> list[list]:
    """Rows of the linear system ``delta(ab) = phi^n(a) delta(b) + phi^n(b) delta(a)``.

    Unknowns are the entries of the k x k matrix of delta, row-major.
    """
    k = A.dim
    P = A.phi_power(n)
    rows = []
    for i in range(k):
        for j in range(i, k):
            Li = A.mul_op(P[:, i])
            Lj = A.mul_op(P[:, j])
            for l in range(k):
                row = [ZERO] * (k * k)
                for c in range(k):
                    row[l * k + c] += A.mu[i, j][c]
                    row[c * k + j] -= Li[l, c]
                    row[c * k + i] -= Lj[l, c]
                rows.append(row)
    return rows


def phi_derivation_space(A: AlgebraSpec, n: int) -> SubspaceBasis:
    return nullspace_basis(derivation_constraint_rows(A, n), A.dim * A.dim)


def phi_derivations_basis(A: AlgebraSpec, n: int) -> list[PhiDerivation]:
    k = A.dim
    out = []
    for v in phi_derivation_space(A, n).vectors:
        mat = np.array(v, dtype=object).reshape(k, k)
        if not is_zero(mat.dot(A.unit_vector)):
            raise AssertionError("phi-derivation does not kill the unit; inconsistent algebra spec")
        out.append(PhiDerivation(n, mat))
    return out


def is_phi_derivation(A: AlgebraSpec, n: int, mat: np.ndarray) -> bool:
    P = A.phi_power(n)
    k = A.dim
    for i in range(k):
        for j in range(i, k):
            lhs = mat.dot(A.mu[i, j])
            rhs = A.mul(P[:, i], mat[:, j]) + A.mul(P[:, j], mat[:, i])
            if not is_zero(lhs - rhs):
                return False
    return True
