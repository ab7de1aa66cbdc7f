"""Exact linear algebra over the rationals.

Matrices are plain row-major lists of lists of ``Fraction``.  Elimination is
Gauss-Jordan with the first nonzero entry of each column as pivot, so every
result depends only on the input entries and never on timing or hashing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Optional, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def Q(x) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ints, Fractions and strings like ``"3"`` or ``"-2/5"``.  Floats are
    refused: a float has already lost the exactness this package relies on.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (Integral, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(c in s for c in ".eE"):
            raise ValueError(f"not an exact rational literal: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def as_matrix(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[list[Fraction]]:
    m = [[Q(v) for v in row] for row in rows]
    widths = {len(r) for r in m}
    if len(widths) > 1:
        raise ValueError("ragged matrix")
    if ncols is not None and m and widths != {ncols}:
        raise ValueError(f"expected {ncols} columns")
    return m


def zeros(rows: int, cols: int) -> list[list[Fraction]]:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> list[list[Fraction]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> list[list[Fraction]]:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in bt] for row in a]


def matvec(m, v) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in m]


@dataclass(frozen=True)
class SubspaceBasis:
    """A linearly independent list of vectors in ``Q^ambient_dim``."""

    ambient_dim: int
    vectors: tuple[tuple[Fraction, ...], ...]

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def matrix(self) -> list[list[Fraction]]:
        """Vectors as the columns of an ``ambient_dim x dim`` matrix."""
        return transpose([list(v) for v in self.vectors], self.ambient_dim) if self.vectors \
            else [[] for _ in range(self.ambient_dim)]

    def coordinates(self, v: Sequence[Fraction]) -> list[Fraction]:
        """Coordinates of ``v`` in this basis; raises if ``v`` is outside the span."""
        x = solve(self.matrix(), list(v))
        if x is None:
            raise ValueError("vector is not in the span of the basis")
        return x

    def contains(self, v: Sequence[Fraction]) -> bool:
        return solve(self.matrix(), list(v)) is not None


def rref(m: Sequence[Sequence[Fraction]], ncols: Optional[int] = None):
    """Reduced row echelon form.  Returns ``(R, pivot_columns)``."""
    a = [list(row) for row in m]
    cols = len(a[0]) if a else (ncols or 0)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == len(a):
            break
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        if piv != 1:
            inv = 1 / piv
            a[r] = [x * inv for x in a[r]]
        prow = a[r]
        nz = [j for j in range(c, cols) if prow[j]]
        for i in range(len(a)):
            if i != r:
                f = a[i][c]
                if f:
                    row = a[i]
                    for j in nz:
                        row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m or not len(m[0]):
        return 0
    return len(rref(m)[1])


def nullspace_basis(m: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> SubspaceBasis:
    """Basis of ``ker m``, one vector per free column (that entry set to 1).

    ``ncols`` is needed only when ``m`` has no rows.
    """
    cols = len(m[0]) if m else (ncols or 0)
    if not m:
        return SubspaceBasis(cols, tuple(tuple(ONE if i == j else ZERO for i in range(cols))
                                         for j in range(cols)))
    r, pivots = rref(m)
    pivset = set(pivots)
    out = []
    for f in range(cols):
        if f in pivset:
            continue
        v = [ZERO] * cols
        v[f] = ONE
        for row, pc in zip(r, pivots):
            if row[f]:
                v[pc] = -row[f]
        out.append(tuple(v))
    return SubspaceBasis(cols, tuple(out))


def solve(m: Sequence[Sequence[Fraction]], b: Sequence[Fraction],
          ncols: Optional[int] = None) -> Optional[list[Fraction]]:
    """One exact solution of ``m x = b`` (free variables set to 0), or None."""
    if len(m) != len(b):
        raise ValueError(f"dimension mismatch: {len(m)} rows but rhs of length {len(b)}")
    cols = len(m[0]) if m else (ncols or 0)
    if not m:
        return [ZERO] * cols
    aug = [list(row) + [Q(x)] for row, x in zip(m, b)]
    r, pivots = rref(aug)
    if pivots and pivots[-1] == cols:
        return None
    x = [ZERO] * cols
    for row, pc in zip(r, pivots):
        x[pc] = row[cols]
    return x


def independent_columns(m: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of the first maximal independent set of columns (left to right)."""
    if not m:
        return []
    return rref(m)[1]


def complement_representatives(sub: Sequence[Sequence[Fraction]],
                               candidates: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of ``candidates`` that extend ``sub`` to a basis of their joint span.

    Scans left to right, so the choice is reproducible.
    """
    vecs = [list(v) for v in sub] + [list(v) for v in candidates]
    if not vecs:
        return []
    piv = independent_columns(transpose(vecs))
    k = len(sub)
    return [p - k for p in piv if p >= k]
