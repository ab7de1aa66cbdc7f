"""Dense rational tensors, alternating maps and shuffles.

An alternating map of arity ``r`` on ``Q^m`` with values of shape ``tail`` is
held as a full numpy object array of shape ``(m,)*r + tail``.  Only the values
on strictly increasing index tuples are independent; ``fill_alternating``
rebuilds the rest by the sign of the sorting permutation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from homdef.linalg import ZERO, ONE


def zeros(shape: Sequence[int]) -> np.ndarray:
    a = np.empty(tuple(shape), dtype=object)
    a.fill(ZERO)
    return a


def eye(n: int) -> np.ndarray:
    a = zeros((n, n))
    for i in range(n):
        a[i, i] = ONE
    return a


def unit(n: int, i: int) -> np.ndarray:
    v = zeros((n,))
    v[i] = ONE
    return v


def qarray(rows) -> np.ndarray:
    """Object array of Fractions from nested lists (already rational)."""
    a = np.array(rows, dtype=object)
    return a


def is_zero(a: np.ndarray) -> bool:
    return not any(x != 0 for x in a.flat)


def matpow(m: np.ndarray, k: int) -> np.ndarray:
    out = eye(m.shape[0])
    for _ in range(k):
        out = out.dot(m)
    return out


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def shuffles(p: int, q: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]:
    """(p, q)-shuffles of ``0..p+q-1`` as ``(head, tail, sign)``.

    ``head`` and ``tail`` are increasing and together list every position once;
    ``sign`` is the signature of ``head + tail``.  Empty when p or q is negative.
    """
    if p < 0 or q < 0:
        return ()
    n = p + q
    out = []
    for head in combinations(range(n), p):
        tail = tuple(i for i in range(n) if i not in head)
        out.append((head, tail, perm_sign(head + tail)))
    return tuple(out)


@lru_cache(maxsize=None)
def _perms_with_sign(r: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    return tuple((p, perm_sign(p)) for p in permutations(range(r)))


def increasing(m: int, r: int) -> Iterable[tuple[int, ...]]:
    return combinations(range(m), r)


def fill_alternating(values: dict, m: int, r: int, tail: tuple[int, ...]) -> np.ndarray:
    """Full alternating tensor from its values on increasing tuples."""
    t = zeros((m,) * r + tail)
    perms = _perms_with_sign(r)
    for idx, val in values.items():
        for p, s in perms:
            j = tuple(idx[k] for k in p)
            t[j] = val if s > 0 else -val
    return t


def contract(t: np.ndarray, vecs: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate the multilinear map ``t`` on ``vecs`` (contracting leading axes).

    Zero coefficients are skipped, so basis vectors cost a single lookup.
    """
    if not vecs:
        return t
    v = vecs[0]
    rest = vecs[1:]
    acc = None
    for i, c in enumerate(v):
        if not c:
            continue
        term = contract(t[i], rest)
        term = term if c == 1 else term * c
        acc = term if acc is None else acc + term
    if acc is None:
        shape = t.shape[1 + len(rest):]
        return zeros(shape) if shape else ZERO
    return acc


def alternating_coords(t: np.ndarray, m: int, r: int) -> list[Fraction]:
    """Flatten the independent entries (increasing tuples, then tail, row-major)."""
    out: list[Fraction] = []
    for idx in increasing(m, r):
        out.extend(np.asarray(t[idx]).flat if t.ndim > r else [t[idx]])
    return out


def alternating_from_coords(coords: Sequence[Fraction], m: int, r: int,
                            tail: tuple[int, ...]) -> np.ndarray:
    size = int(np.prod(tail)) if tail else 1
    values = {}
    pos = 0
    for idx in increasing(m, r):
        chunk = list(coords[pos:pos + size])
        pos += size
        values[idx] = np.array(chunk, dtype=object).reshape(tail) if tail else chunk[0]
    if pos != len(coords):
        raise ValueError("coordinate vector has the wrong length")
    return fill_alternating(values, m, r, tail)


def alternating_size(m: int, r: int, tail: tuple[int, ...]) -> int:
    from math import comb
    size = int(np.prod(tail)) if tail else 1
    return comb(m, r) * size if r >= 0 else 0


def is_alternating(t: np.ndarray, r: int) -> bool:
    m = t.shape[0] if r else 0
    for idx in np.ndindex(*((m,) * r)):
        s = perm_sign(idx)
        if s == 0:
            if not is_zero(np.asarray(t[idx])):
                return False
            continue
        srt = tuple(sorted(idx))
        if not is_zero(np.asarray(t[idx] - s * t[srt])):
            return False
    return True
