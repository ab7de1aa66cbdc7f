"""Truncated one-parameter deformations of a hom-Lie-Rinehart structure.

A jet is m_t = m_0 + t m_1 + ... + t^N m_N with m_0 the structure element.
The order-k equation is (1/2) sum_{i+j=k} [m_i, m_j] = 0.

Sign conventions (bracket [A, B] = (-1)^{pq} A o B - B o A):

* cyclic display  sum m_i(alpha a, m_j(b, c)) + cyclic  =  -sum m_i o m_j
* equivalence     m~_1 = m_1 + [m_0, phi_1] = m_1 + delta(phi_1)
* obstruction     Theta = -(1/2) sum_{i+j=N+1, i,j>0} [m_i, m_j],  delta(m_{N+1}) = Theta
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from homdef.algebra import ValidationReport
from homdef.complex import CohomologyReport, DeformationComplex, deformation_complex
from homdef.hlr import HLRStructure
from homdef.linalg import solve
from homdef.mder import (
    Multiderivation,
    bracket,
    check_multiderivation,
    from_structure,
    recompute_symbol,
)
from homdef.tensors import contract, eye, increasing, is_zero, unit, zeros

HALF = Fraction(1, 2)


@dataclass(frozen=True, eq=False)
class DeformationJet:
    structure: HLRStructure
    terms: tuple[Multiderivation, ...] = ()

    @property
    def order(self) -> int:
        return len(self.terms)

    @property
    def m0(self) -> Multiderivation:
        return from_structure(self.structure, check=False)

    def term(self, i: int) -> Multiderivation:
        if i == 0:
            return self.m0
        if 1 <= i <= self.order:
            return self.terms[i - 1]
        return Multiderivation.zero(self.structure.module, 1)

    def extended(self, m_next: Multiderivation) -> "DeformationJet":
        return DeformationJet(self.structure, self.terms + (m_next,))

    def truncated(self, n: int) -> "DeformationJet":
        return DeformationJet(self.structure, self.terms[:n])

    @classmethod
    def trivial(cls, s: HLRStructure, order: int) -> "DeformationJet":
        return cls(s, tuple(Multiderivation.zero(s.module, 1) for _ in range(order)))

    def equals(self, other: "DeformationJet") -> bool:
        return (self.structure is other.structure and self.order == other.order
                and all(a.equals(b) for a, b in zip(self.terms, other.terms)))


@dataclass(frozen=True, eq=False)
class EquivalenceTransform:
    """Phi_t = id + sum_{i>=1} t^i phi_i on L."""

    terms: tuple[np.ndarray, ...]

    @property
    def order(self) -> int:
        return len(self.terms)

    def term(self, i: int, dim: int) -> np.ndarray:
        if i == 0:
            return eye(dim)
        if i <= self.order:
            return self.terms[i - 1]
        return zeros((dim, dim))

    def commutes_with(self, alpha: np.ndarray) -> Optional[int]:
        """First index i with phi_i alpha != alpha phi_i, or None."""
        for i, p in enumerate(self.terms, 1):
            if not is_zero(p.dot(alpha) - alpha.dot(p)):
                return i
        return None


def _pair_sum(jet: DeformationJet, k: int, lo: int = 0) -> Multiderivation:
    """(1/2) sum_{i+j=k, i,j>=lo} [m_i, m_j]."""
    acc = Multiderivation.zero(jet.structure.module, 2)
    for i in range(lo, k - lo + 1):
        acc = acc + bracket(jet.term(i), jet.term(k - i))
    return acc.scale(HALF)


def cyclic_display(jet: DeformationJet, k: int, lo: int = 0) -> np.ndarray:
    """sum_{i+j=k} m_i(alpha a, m_j(b, c)) + cyclic, on every basis triple."""
    s = jet.structure
    m = s.dim
    alpha = s.alpha
    out = zeros((m, m, m, m))
    for i in range(lo, k - lo + 1):
        mi, mj = jet.term(i), jet.term(k - i)
        for a, b, c in product(range(m), repeat=3):
            val = zeros((m,))
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                val = val + contract(mi.d, [alpha[:, x], mj.d[y, z]])
            out[a, b, c] = out[a, b, c] + val
    return out


def check_jet(jet: DeformationJet) -> ValidationReport:
    """Order-by-order deformation equations, stopping at the first failing order."""
    rep = ValidationReport("jet")
    names = jet.structure.module.names
    for i, t in enumerate(jet.terms, 1):
        sub = check_multiderivation(t)
        for v in sub.violations:
            rep.add(f"m_{i} is a degree-1 multiderivation: {v.identity}", v.witness, v.detail)
        if not sub.ok:
            return rep
    for k in range(1, jet.order + 1):
        disp = cyclic_display(jet, k)
        bad = next((idx for idx in increasing(jet.structure.dim, 3) if not is_zero(disp[idx])), None)
        if bad is not None:
            rep.add(f"order {k} deformation equation", tuple(names[i] for i in bad),
                    " ".join(str(c) for c in disp[bad]))
            return rep
        ps = _pair_sum(jet, k)
        bad = next((idx for idx in increasing(jet.structure.dim, 2) if not is_zero(ps.sigma[idx])), None)
        if bad is not None:
            rep.add(f"order {k} deformation equation (symbol)", tuple(names[i] for i in bad))
            return rep
    return rep


def first_failing_order(rep: ValidationReport) -> Optional[int]:
    for v in rep.violations:
        if v.identity.startswith("order "):
            return int(v.identity.split()[1])
        return 0
    return None


@dataclass
class Infinitesimal:
    index: Optional[int]
    cochain: Optional[Multiderivation]
    is_cocycle: Optional[bool]


def infinitesimal(jet: DeformationJet) -> Infinitesimal:
    for i, t in enumerate(jet.terms, 1):
        if not t.is_zero():
            return Infinitesimal(i, t, bracket(jet.m0, t).is_zero())
    return Infinitesimal(None, None, None)


# --------------------------------------------------------------------------
# equivalences


class EquivalenceError(ValueError):
    def __init__(self, message: str, report: Optional[ValidationReport] = None):
        super().__init__(message)
        self.report = report


def series_inverse(Phi: EquivalenceTransform, dim: int, order: int) -> list[np.ndarray]:
    """Coefficients psi_0..psi_N of Phi_t^{-1} mod t^{N+1}."""
    psi = [eye(dim)]
    for n in range(1, order + 1):
        acc = zeros((dim, dim))
        for i in range(1, n + 1):
            acc = acc - Phi.term(i, dim).dot(psi[n - i])
        psi.append(acc)
    return psi


def apply_equivalence(jet: DeformationJet, Phi: EquivalenceTransform) -> DeformationJet:
    """m~_t(x, y) = Phi_t^{-1} m_t(Phi_t x, Phi_t y) truncated at the jet's order.

    Symbols of the new terms are recomputed; a term that admits none raises
    ``EquivalenceError`` with the violated identities.
    """
    s = jet.structure
    m, N = s.dim, jet.order
    bad = Phi.commutes_with(s.alpha)
    if bad is not None:
        raise EquivalenceError(f"phi_{bad} does not commute with alpha")
    psi = series_inverse(Phi, m, N)
    phis = [Phi.term(i, m) for i in range(N + 1)]
    new_terms = []
    for n in range(1, N + 1):
        d = zeros((m, m, m))
        for a in range(n + 1):
            for b in range(n - a + 1):
                mb = jet.term(b).d
                for c in range(n - a - b + 1):
                    e = n - a - b - c
                    if is_zero(phis[c]) or is_zero(phis[e]) or is_zero(psi[a]):
                        continue
                    for x, y in product(range(m), repeat=2):
                        v = contract(mb, [phis[c][:, x], phis[e][:, y]])
                        d[x, y] = d[x, y] + psi[a].dot(v)
        sigma = recompute_symbol(s.module, 1, d)
        if sigma is None:
            rep = check_multiderivation(Multiderivation(s.module, 1, d, zeros((m, s.algebra.dim, s.algebra.dim))))
            raise EquivalenceError(f"transformed term m~_{n} admits no symbol", rep)
        new_terms.append(Multiderivation(s.module, 1, d, sigma))
    return DeformationJet(s, tuple(new_terms))


def killing_transform(jet: DeformationJet, n: int, cx: Optional[DeformationComplex] = None
                      ) -> Optional[EquivalenceTransform]:
    """Phi_t = id + phi t^n with delta(phi) = -m_n, if m_n is a coboundary."""
    cx = cx or deformation_complex(jet.structure)
    coeffs = cx.is_coboundary(2, jet.term(n))
    if coeffs is None:
        return None
    phi = cx.cochain(1, coeffs)
    terms = [zeros((jet.structure.dim,) * 2) for _ in range(n)]
    terms[n - 1] = -phi.d.T.copy()
    return EquivalenceTransform(tuple(terms))


# --------------------------------------------------------------------------
# obstructions and extensions


@dataclass
class ObstructionReport:
    order: int
    theta: Multiderivation
    display_agrees: bool
    is_cocycle: bool
    primitive: Optional[Multiderivation]
    primitive_coords: Optional[list] = None
    class_coords: Optional[list] = None

    @property
    def vanishes(self) -> bool:
        return self.primitive is not None


def obstruction(jet: DeformationJet, cx: Optional[DeformationComplex] = None) -> ObstructionReport:
    cx = cx or deformation_complex(jet.structure)
    N = jet.order
    theta = _pair_sum(jet, N + 1, lo=1).scale(-1)
    # the cyclic display is -Theta on values
    disp = cyclic_display(jet, N + 1, lo=1)
    agrees = is_zero(disp + theta.d)
    is_cocycle = cx.apply(theta).is_zero()
    coeffs = cx.is_coboundary(3, theta)
    prim = cx.cochain(2, coeffs) if coeffs is not None else None
    class_coords = None
    if prim is None:
        class_coords = cohomology_class(cx, 3, theta)
    return ObstructionReport(N, theta, agrees, is_cocycle, prim, coeffs, class_coords)


def cohomology_class(cx: DeformationComplex, n: int, D: Multiderivation) -> list:
    """Coordinates of the class of a cocycle D on the report's representatives."""
    rep: CohomologyReport = cx.cohomology(n)
    target = cx.space(n).coordinates(D)
    prev = cx.delta_matrix(n - 1) if n - 1 >= cx.lowest else []
    B_cols = [list(c) for c in zip(*prev)] if prev and prev[0] else []
    cols = B_cols + [list(v) for v in rep.representatives.vectors]
    rows = [list(r) for r in zip(*cols)] if cols else [[] for _ in target]
    x = solve(rows, target, ncols=len(cols))
    if x is None:
        raise ValueError("not a cocycle")
    return x[len(B_cols):]


@dataclass
class ExtensionResult:
    jet: Optional[DeformationJet]
    obstruction: ObstructionReport

    @property
    def extended(self) -> bool:
        return self.jet is not None


def extend(jet: DeformationJet, cx: Optional[DeformationComplex] = None) -> ExtensionResult:
    ob = obstruction(jet, cx)
    if ob.primitive is None:
        return ExtensionResult(None, ob)
    return ExtensionResult(jet.extended(ob.primitive), ob)


# --------------------------------------------------------------------------
# rigidity


@dataclass
class RigidityReport:
    h2: CohomologyReport
    der_phi_checked: bool = False
    primitives_match: Optional[bool] = None
    failures: list = field(default_factory=list)

    @property
    def rigid(self) -> bool:
        return self.h2.betti == 0

    def as_dict(self) -> dict:
        return {
            "h2": self.h2.betti,
            "rigid": self.rigid,
            "der_phi_checked": self.der_phi_checked,
            "primitives_match": self.primitives_match,
            "failures": list(self.failures),
        }


def is_der_phi_family(s: HLRStructure) -> bool:
    """Whether s has the shape of (Der_phi(A), Ad_phi): injective anchor onto all phi-derivations
    with alpha acting as conjugation by phi."""
    from homdef.algebra import phi_derivations_basis
    A = s.algebra
    try:
        pinv = A.phi_inverse()
    except ValueError:
        return False
    basis = [d.matrix for d in phi_derivations_basis(A, 1)]
    if len(basis) != s.dim:
        return False
    for i in range(s.dim):
        x = unit(s.dim, i)
        lhs = s.rho(s.alpha.dot(x))
        rhs = A.phi.dot(s.rho(x)).dot(pinv)
        if not is_zero(lhs - rhs):
            return False
    rows = [list(s.anchor[i].flat) for i in range(s.dim)]
    from homdef.linalg import rank
    return rank(rows) == s.dim


def ad_inverse_of_symbol(s: HLRStructure, D: Multiderivation) -> Multiderivation:
    """The degree-0 element x -> Ad_phi^{-1}(sigma_D(x)), read back in L through the anchor."""
    A = s.algebra
    pinv = A.phi_inverse()
    cols = [list(s.anchor[i].flat) for i in range(s.dim)]
    rows = [list(r) for r in zip(*cols)]
    d = zeros((s.dim, s.dim))
    for i in range(s.dim):
        target = pinv.dot(D.sigma[i]).dot(A.phi)
        x = solve(rows, list(target.flat), ncols=s.dim)
        if x is None:
            raise ValueError("Ad_phi^{-1} sigma_D leaves the anchor image")
        d[i] = np.array(x, dtype=object)
    sigma = recompute_symbol(s.module, 0, d)
    if sigma is None:
        raise ValueError("Ad_phi^{-1} sigma_D has no symbol")
    return Multiderivation(s.module, 0, d, sigma)


def rigidity_certificate(s: HLRStructure, der_phi: Optional[bool] = None) -> RigidityReport:
    """H^2 and, for the Der_phi family, the explicit primitive delta(Ad_phi^{-1} o sigma_D) = D."""
    cx = deformation_complex(s)
    rep = RigidityReport(cx.cohomology(2))
    if der_phi is None:
        der_phi = is_der_phi_family(s)
    if not der_phi:
        return rep
    s.algebra.phi_inverse()
    rep.der_phi_checked = True
    from homdef.linalg import nullspace_basis
    mat = cx.delta_matrix(2)
    Z = nullspace_basis(mat, cx.dim(2))
    ok = True
    for j, v in enumerate(Z.vectors):
        D = cx.cochain(2, v)
        try:
            E = ad_inverse_of_symbol(s, D)
        except ValueError as exc:
            rep.failures.append((j, str(exc)))
            ok = False
            continue
        if not cx.apply(E).equals(D):
            rep.failures.append((j, "delta(Ad_phi^{-1} o sigma_D) != D"))
            ok = False
    rep.primitives_match = ok
    return rep
