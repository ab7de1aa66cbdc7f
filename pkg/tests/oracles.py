"""Independent reference computations in sympy.

Nothing here imports the package's linear algebra or tensor code; cochains
are plain dicts keyed by increasing index tuples and ranks come from sympy.
"""

from __future__ import annotations

from itertools import combinations, permutations
from math import factorial

import sympy as sp


def _sign(seq) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
            elif seq[i] == seq[j]:
                return 0
    return s


def _canon(idx):
    s = _sign(idx)
    return tuple(sorted(idx)), s


class LieOracle:
    """A Lie algebra from structure constants c[i][j] = list of coefficients of [e_i, e_j]."""

    def __init__(self, c):
        self.n = len(c)
        self.c = [[[sp.Rational(x) for x in c[i][j]] for j in range(self.n)] for i in range(self.n)]

    def br(self, u, v):
        out = [sp.Integer(0)] * self.n
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                if b == 0:
                    continue
                for k in range(self.n):
                    out[k] += a * b * self.c[i][j][k]
        return out

    def e(self, i):
        v = [sp.Integer(0)] * self.n
        v[i] = sp.Integer(1)
        return v

    def jacobi_ok(self) -> bool:
        for a, b, c in combinations(range(self.n), 3):
            ea, eb, ec = self.e(a), self.e(b), self.e(c)
            tot = [x + y + z for x, y, z in zip(self.br(ea, self.br(eb, ec)),
                                                 self.br(eb, self.br(ec, ea)),
                                                 self.br(ec, self.br(ea, eb)))]
            if any(t != 0 for t in tot):
                return False
        return True

    # Chevalley-Eilenberg cochains with adjoint coefficients
    def _cochain_basis(self, k):
        return [(idx, t) for idx in combinations(range(self.n), k) for t in range(self.n)]

    def _eval(self, f, args):
        """f: dict idx -> vector; args: list of basis indices or vectors (multilinear)."""
        out = [sp.Integer(0)] * self.n
        vecs = [self.e(a) if isinstance(a, int) else a for a in args]

        def rec(pos, chosen, coef):
            if coef == 0:
                return
            if pos == len(vecs):
                key, s = _canon(chosen)
                if s == 0 or key not in f:
                    return
                for t in range(self.n):
                    out[t] += coef * s * f[key][t]
                return
            for i, a in enumerate(vecs[pos]):
                if a != 0:
                    rec(pos + 1, chosen + (i,), coef * a)

        rec(0, (), sp.Integer(1))
        return out

    def ce_differential(self, k):
        """Matrix of d: C^k -> C^{k+1}, columns indexed by the C^k basis."""
        src = self._cochain_basis(k)
        tgt = self._cochain_basis(k + 1)
        row_of = {b: r for r, b in enumerate(tgt)}
        M = sp.zeros(len(tgt), len(src))
        for col, (idx0, t0) in enumerate(src):
            f = {idx0: [sp.Integer(1) if t == t0 else sp.Integer(0) for t in range(self.n)]}
            for xs in combinations(range(self.n), k + 1):
                val = [sp.Integer(0)] * self.n
                for i in range(k + 1):
                    rest = [xs[j] for j in range(k + 1) if j != i]
                    term = self.br(self.e(xs[i]), self._eval(f, rest))
                    sgn = (-1) ** i
                    val = [v + sgn * w for v, w in zip(val, term)]
                for i, j in combinations(range(k + 1), 2):
                    rest = [xs[l] for l in range(k + 1) if l not in (i, j)]
                    term = self._eval(f, [self.br(self.e(xs[i]), self.e(xs[j]))] + rest)
                    sgn = (-1) ** (i + j)
                    val = [v + sgn * w for v, w in zip(val, term)]
                for t in range(self.n):
                    if val[t] != 0:
                        M[row_of[(xs, t)], col] = val[t]
        return M

    def cohomology_dims(self, top):
        """[dim H^0, ..., dim H^top] of g with adjoint coefficients."""
        ranks = {}
        dims = {}
        for k in range(0, top + 1):
            d = self.ce_differential(k)
            dims[k] = d.shape[1]
            ranks[k] = d.rank() if d.shape[0] and d.shape[1] else 0
        return [dims[k] - ranks[k] - (ranks[k - 1] if k else 0) for k in range(top + 1)]

    def trivial_h(self, k):
        """dim H^k(g; Q) with trivial coefficients."""
        def dmat(k):
            src = list(combinations(range(self.n), k))
            tgt = list(combinations(range(self.n), k + 1))
            M = sp.zeros(len(tgt), len(src))
            col_of = {s: i for i, s in enumerate(src)}
            for r, xs in enumerate(tgt):
                for i, j in combinations(range(k + 1), 2):
                    rest = [xs[l] for l in range(k + 1) if l not in (i, j)]
                    v = self.br(self.e(xs[i]), self.e(xs[j]))
                    for a, ca in enumerate(v):
                        if ca == 0:
                            continue
                        key, s = _canon((a, *rest))
                        if s:
                            M[r, col_of[key]] += (-1) ** (i + j) * ca * s
            return M
        d = dmat(k)
        rk = d.rank() if d.shape[0] and d.shape[1] else 0
        prev = dmat(k - 1) if k >= 1 else sp.zeros(0, 0)
        rp = prev.rank() if prev.shape[0] and prev.shape[1] else 0
        return d.shape[1] - rk - rp


def nr_circ(f, g, n, p, q):
    """(f o g) for alternating maps on Q^n by averaging over all permutations.

    f has arity p+1, g has arity q+1, both as functions of basis index tuples
    returning sympy vectors.  Result evaluated on every increasing (p+q+1)-tuple.
    """
    arity = p + q + 1
    out = {}
    norm = sp.Rational(1, factorial(q + 1) * factorial(p))
    for xs in combinations(range(n), arity):
        acc = sp.zeros(n, 1)
        for perm in permutations(range(arity)):
            s = _sign(perm)
            inner = g(tuple(xs[i] for i in perm[:q + 1]))
            rest = tuple(xs[i] for i in perm[q + 1:])
            acc += s * f_linear(f, inner, rest, n)
        out[xs] = acc * norm
    return out


def f_linear(f, vec, rest, n):
    acc = sp.zeros(n, 1)
    for i in range(n):
        if vec[i] != 0:
            acc += vec[i] * f((i,) + rest)
    return acc


def phi_derivation_dim(mu, phi, power=1) -> int:
    """dim of {D : D(ab) = phi^p(a) D(b) + phi^p(b) D(a)} by brute force."""
    k = len(mu)
    P = sp.Matrix(phi) ** power
    syms = sp.symbols(f"d0:{k * k}")
    D = sp.Matrix(k, k, syms)
    eqs = []
    for i in range(k):
        for j in range(k):
            ab = sp.Matrix(mu[i][j])
            lhs = D * ab
            Di, Dj = D[:, i], D[:, j]
            rhs = sp.zeros(k, 1)
            for a in range(k):
                for b in range(k):
                    rhs += sp.Matrix(mu[a][b]) * (P[a, i] * Dj[b] + P[a, j] * Di[b])
            eqs.extend(list(lhs - rhs))
    A, _ = sp.linear_eq_to_matrix(eqs, syms)
    return k * k - A.rank()
