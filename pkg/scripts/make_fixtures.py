"""Regenerate the bundled fixture documents from the in-code constructions.

    python3 scripts/make_fixtures.py [--check]

With --check nothing is written; the exit code says whether the files on
disk are current.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from homdef.algebra import free_module, ground_field, regular_module, truncated_polynomial_algebra, vector_space
from homdef.complex import deformation_complex
from homdef.deform import DeformationJet
from homdef.hlr import abelian, action_algebroid, der_phi_structure, lie_algebra, twist_by_morphism
from homdef.io import Document, dumps
from homdef.mder import Multiderivation, bracket
from homdef.tensors import eye, qarray, zeros

OUT = Path(__file__).resolve().parent.parent / "src" / "homdef" / "fixtures"

SL2 = {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}


def _lie_doc(brackets, names, alpha=None, name="L") -> tuple[Document, object]:
    s = lie_algebra(brackets, names, alpha)
    return Document(s.algebra, {"L": s.module}, {name: s}, has_algebra=False), s


def _two_form(M, entries) -> Multiderivation:
    """Degree-1 element with zero symbol from {(x, y): {z: c}}."""
    idx = {n: i for i, n in enumerate(M.names)}
    d = zeros((M.dim, M.dim, M.dim))
    for (x, y), val in entries.items():
        for z, c in val.items():
            d[idx[x], idx[y], idx[z]] += Fraction(c)
            d[idx[y], idx[x], idx[z]] -= Fraction(c)
    k = M.algebra.dim
    return Multiderivation(M, 1, d, zeros((M.dim, k, k)))


def sl2() -> Document:
    doc, s = _lie_doc(SL2, ["h", "e", "f"], name="sl2")
    M = s.module
    m0 = Multiderivation(M, 1, s.bracket.copy(), s.anchor.copy())
    doc.jets["trivial"] = DeformationJet.trivial(s, 1)
    # rescaling the bracket is a cocycle (and a coboundary)
    doc.jets["sl2-scale"] = DeformationJet(s, (m0,))
    # first basis 2-cochain that is not a cocycle
    cx = deformation_complex(s)
    bad = next(e for e in cx.space(2).elements if not bracket(m0, e).is_zero())
    doc.jets["sl2-noncocycle"] = DeformationJet(s, (bad,))
    return doc


def gl2() -> Document:
    doc, s = _lie_doc(SL2, ["h", "e", "f", "c"], name="gl2")
    m0 = Multiderivation(s.module, 1, s.bracket.copy(), s.anchor.copy())
    cx = deformation_complex(s)
    # delta of the sum of the C^1 basis: a coboundary whose square is nonzero,
    # so extending it needs a genuine primitive
    phi = cx.space(1).element([1] * cx.dim(1))
    m1 = bracket(m0, phi)
    assert not bracket(m1, m1).is_zero()
    doc.jets["gl2-coboundary"] = DeformationJet(s, (m1,))
    return doc


def broken_jacobi() -> Document:
    doc, _ = _lie_doc({("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"e": 1}},
                      ["h", "e", "f"], name="broken")
    return doc


def twisted_sl2() -> Document:
    alpha = qarray([[Fraction(1), 0, 0], [0, Fraction(2), 0], [0, 0, Fraction(1, 2)]])
    doc, s = _lie_doc({("h", "e"): {"e": 4}, ("h", "f"): {"f": -1}, ("e", "f"): {"h": 1}},
                      ["h", "e", "f"], alpha, name="tsl2")
    m0 = Multiderivation(s.module, 1, s.bracket.copy(), s.anchor.copy())
    doc.jets["tsl2-scale"] = DeformationJet(s, (m0,))
    return doc


def abelian_doc(n: int) -> Document:
    names = ("x", "y", "z")[:n]
    s = abelian(vector_space(ground_field(), n, eye(n), names))
    doc = Document(s.algebra, {"L": s.module}, {f"abelian-{n}": s}, has_algebra=False)
    if n == 2:
        doc.jets["seed"] = DeformationJet(s, (_two_form(s.module, {("x", "y"): {"x": 1}}),))
    if n == 3:
        # a skew bracket violating Jacobi; with m_0 = 0 its square is the obstruction
        doc.jets["obstructed"] = DeformationJet(
            s, (_two_form(s.module, {("x", "y"): {"z": 1}, ("y", "z"): {"y": 1}}),))
    return doc


def der_phi_x3() -> Document:
    A = truncated_polynomial_algebra(3, [0, 2, 0])
    s = der_phi_structure(A)
    return Document(A, {"L": s.module}, {"der-phi": s})


def dual_action(twisted: bool) -> Document:
    A = truncated_polynomial_algebra(2)
    X = qarray([[Fraction(0), Fraction(0)], [Fraction(0), Fraction(1)]])
    s = action_algebroid(A, X)
    if twisted:
        p = qarray([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]])
        s = twist_by_morphism(s, p, p)
    return Document(s.algebra, {"L": s.module}, {"dual-action" + ("-twisted" if twisted else ""): s})


def free_a2() -> Document:
    A = truncated_polynomial_algebra(2)
    return Document(A, {"A2": free_module(A, 2), "A": regular_module(A)})


FIXTURES = {
    "sl2": sl2,
    "gl2": gl2,
    "broken-jacobi": broken_jacobi,
    "twisted-sl2": twisted_sl2,
    "heisenberg": lambda: _lie_doc({("x", "y"): {"z": 1}}, ["x", "y", "z"], name="heisenberg")[0],
    "so3": lambda: _lie_doc({("x", "y"): {"z": 1}, ("y", "z"): {"x": 1}, ("z", "x"): {"y": 1}},
                            ["x", "y", "z"], name="so3")[0],
    "r2": lambda: _lie_doc({("x", "y"): {"x": 1}}, ["x", "y"], name="r2")[0],
    "r3": lambda: _lie_doc({("z", "x"): {"x": 1}, ("z", "y"): {"y": 1}}, ["x", "y", "z"], name="r3")[0],
    "abelian-2": lambda: abelian_doc(2),
    "abelian-3": lambda: abelian_doc(3),
    "der-phi-x3": der_phi_x3,
    "dual-action": lambda: dual_action(False),
    "dual-action-twisted": lambda: dual_action(True),
    "free-a2": free_a2,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    OUT.mkdir(parents=True, exist_ok=True)
    stale = []
    for name, build in FIXTURES.items():
        text = dumps(build())
        path = OUT / f"{name}.json"
        if args.check:
            if not path.exists() or path.read_text(encoding="utf-8") != text:
                stale.append(name)
        else:
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path.name}")
    if stale:
        print("stale: " + ", ".join(stale), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
