import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homdef import cli
from homdef.hlr import lie_algebra
from homdef.io import Document, InputError, dumps, fixture_path, load, parse

from structures import der_phi_x3, free_a2

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = sorted(p.stem for p in (ROOT / "src" / "homdef" / "fixtures").glob("*.json"))


def _same(a, b):
    return a.shape == b.shape and bool((a == b).all())


def assert_docs_equal(d1, d2):
    assert _same(d1.algebra.mu, d2.algebra.mu) and _same(d1.algebra.phi, d2.algebra.phi)
    assert d1.algebra.names == d2.algebra.names
    assert list(d1.modules) == list(d2.modules)
    for n in d1.modules:
        m1, m2 = d1.modules[n], d2.modules[n]
        assert _same(m1.action, m2.action) and _same(m1.beta, m2.beta) and m1.names == m2.names
        assert m1.free_rank == m2.free_rank
    for n in d1.structures:
        s1, s2 = d1.structures[n], d2.structures[n]
        assert _same(s1.bracket, s2.bracket) and _same(s1.anchor, s2.anchor)
    for n in d1.jets:
        for t1, t2 in zip(d1.jets[n].terms, d2.jets[n].terms):
            assert _same(t1.d, t2.d) and _same(t1.sigma, t2.sigma)


def test_fixture_set_present():
    for name in ("sl2", "broken-jacobi", "twisted-sl2", "heisenberg", "abelian-2", "der-phi-x3", "free-a2"):
        assert name in FIXTURES


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_roundtrip(name):
    path = fixture_path(name)
    doc = load(path)
    text = dumps(doc)
    assert text == Path(path).read_text(encoding="utf-8")
    assert_docs_equal(doc, parse(text))


def test_fixtures_are_current():
    out = subprocess.run([sys.executable, str(ROOT / "scripts" / "make_fixtures.py"), "--check"],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr


def test_der_phi_fixture_matches_construction():
    s = load(fixture_path("der-phi-x3")).structures["der-phi"]
    t = der_phi_x3()
    assert _same(s.bracket, t.bracket) and _same(s.anchor, t.anchor) and _same(s.alpha, t.alpha)
    assert _same(s.module.action, t.module.action)


def test_free_module_roundtrip():
    L = free_a2()
    doc = Document(L.algebra, {"L": L})
    back = parse(dumps(doc))
    assert back.modules["L"].free_rank == 2 and _same(back.modules["L"].action, L.action)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9), st.lists(st.integers(1, 4), min_size=3, max_size=3))
def test_random_structures_roundtrip(coeffs, alpha_diag):
    names = ["a", "b", "c"]
    pairs = [("a", "b"), ("a", "c"), ("b", "c")]
    br = {p: {n: Fraction(coeffs[3 * i + j], 2) for j, n in enumerate(names)} for i, p in enumerate(pairs)}
    alpha = np.empty((3, 3), dtype=object)
    alpha.fill(Fraction(0))
    for i, v in enumerate(alpha_diag):
        alpha[i, i] = Fraction(v)
    s = lie_algebra(br, names, alpha)
    doc = Document(s.algebra, {"L": s.module}, {"s": s}, has_algebra=False)
    back = parse(dumps(doc))
    assert_docs_equal(doc, back)


@pytest.mark.parametrize("text,where", [
    ('{"modules": {"L": {"basis": ["a"], "beta": {"a": {"a": 0.5}}}}}', "line 1, column"),
    ('{\n  "modules": {\n    "L": {"basis": ["a"], "beta": {"a": {"a": 1e3}}}}}', "line 3, column"),
    ('{"modules": ', "line 1, column 13"),
    ('[1]', "line 1, column 1"),
])
def test_parse_errors_have_positions(text, where):
    with pytest.raises(InputError) as exc:
        parse(text)
    assert exc.value.where.startswith(where)


@pytest.mark.parametrize("text,fragment", [
    ('{"extra": 1}', "unknown top-level"),
    ('{"format_version": "9"}', "format_version"),
    ('{"modules": {"L": {"basis": ["a", "a"]}}}', "duplicate"),
    ('{"modules": {"L": {"basis": ["a"]}}, "structures": {"s": {"module": "M"}}}', "unknown module"),
    ('{"modules": {"L": {"basis": ["a", "b"]}}, "structures": {"s": {"module": "L", '
     '"bracket": [["a", "b", {"c": 1}]]}}}', "unknown basis element"),
    ('{"modules": {"L": {"basis": ["a", "b"]}}, "structures": {"s": {"module": "L", '
     '"bracket": [["a", "b", {}], ["b", "a", {}]]}}}', "given twice"),
    ('{"modules": {"L": {"basis": ["a"], "beta": {"a": {"a": "1/0"}}}}}', "bad rational"),
    ('{"modules": {"L": {"basis": ["a"], "beta": {"a": {"a": true}}}}}', "expected a rational"),
])
def test_semantic_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        parse(text)


def test_empty_document_is_ground_field():
    doc = parse("{}")
    assert doc.algebra.dim == 1 and not doc.structures


# --------------------------------------------------------------------------
# CLI


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def machine(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "machine")
    return code, json.loads(out), out


def test_validate_exit_codes(capsys):
    assert run(capsys, "validate", fixture_path("twisted-sl2"))[0] == 0
    code, body, _ = machine(capsys, "validate", fixture_path("broken-jacobi"))
    assert code == cli.EXIT_FAIL
    bad = [e for e in body["result"]["entries"] if not e["ok"]]
    assert bad[0]["kind"] == "structure" and set(bad[0]["violations"][0]["witness"]) == {"e", "f", "h"}


def test_validate_empty_document(capsys, tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("{}")
    code, body, _ = machine(capsys, "validate", str(p))
    assert code == 0 and body["result"]["entries"] == []


def test_input_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == cli.EXIT_INPUT
    code, body, _ = machine(capsys, "cohomology", fixture_path("sl2"), "--structure", "nope")
    assert code == cli.EXIT_INPUT and "unknown structure" in body["error"]
    p = tmp_path / "f.json"
    p.write_text('{"modules": {"L": {"basis": ["a"], "beta": {"a": {"a": 0.25}}}}}')
    code, body, _ = machine(capsys, "validate", str(p))
    assert code == cli.EXIT_INPUT and "line 1" in body["error"]


def test_cohomology_commands(capsys):
    _, body, _ = machine(capsys, "cohomology", fixture_path("sl2"), "--max-degree", "3")
    assert [r["betti"] for r in body["result"]["cohomology"] if r["degree"] >= 1] == [0, 0, 0]
    _, body, _ = machine(capsys, "cohomology", fixture_path("abelian-2"), "--max-degree", "2")
    assert [r["betti"] for r in body["result"]["cohomology"] if r["degree"] >= 1] == [4, 2]
    _, body, _ = machine(capsys, "cohomology", fixture_path("der-phi-x3"), "--max-degree", "2")
    assert body["result"]["cohomology"][-1]["betti"] == 0


def test_cohomology_of_invalid_structure_is_precondition(capsys):
    code, _ = run(capsys, "cohomology", fixture_path("broken-jacobi"))
    assert code == cli.EXIT_PRECONDITION


def test_degree_cap_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("HOMDEF_DEGREE_CAP", "2")
    code, body, _ = machine(capsys, "cohomology", fixture_path("sl2"), "--max-degree", "3")
    assert code == cli.EXIT_PRECONDITION and "cap 2" in body["error"]
    code, body, _ = machine(capsys, "cohomology", fixture_path("sl2"))
    assert code == 0 and body["result"]["cohomology"][-1]["degree"] == 2
    monkeypatch.setenv("HOMDEF_DEGREE_CAP", "5")
    code, body, _ = machine(capsys, "cohomology", fixture_path("heisenberg"), "--max-degree", "5")
    assert code == 0 and body["result"]["cohomology"][-1]["degree"] == 5


def test_deform_traces(capsys):
    code, body, _ = machine(capsys, "deform", fixture_path("sl2"), "--jet", "trivial", "--extend-to", "3")
    assert code == 0 and body["result"]["extended_to"] == 3
    prims = [st["primitive_coords"] for st in body["result"]["trace"] if st["step"] == "obstruction"]
    assert len(prims) == 2 and all(set(p) == {"0"} for p in prims)
    code, body, _ = machine(capsys, "deform", fixture_path("sl2"), "--jet", "sl2-scale", "--extend-to", "2")
    assert code == 0 and "primitive_coords" in body["result"]["trace"][-2]
    code, body, _ = machine(capsys, "deform", fixture_path("sl2"), "--jet", "sl2-noncocycle")
    assert code == cli.EXIT_FAIL
    assert body["result"]["trace"][0]["violations"][0]["witness"] == ["h", "e", "f"]
    code, body, _ = machine(capsys, "deform", fixture_path("abelian-3"), "--extend-to", "2")
    assert code == cli.EXIT_FAIL and body["result"]["trace"][-1]["extends"] is False


def test_rigidity_and_splitting_commands(capsys):
    code, body, _ = machine(capsys, "rigidity", fixture_path("der-phi-x3"))
    assert code == 0 and body["result"]["rigid"] and body["result"]["primitives_match"]
    assert run(capsys, "rigidity", fixture_path("abelian-2"))[0] == cli.EXIT_FAIL
    code, body, _ = machine(capsys, "splitting", fixture_path("free-a2"), "--module", "A2")
    a0 = body["result"]["audits"][0]
    assert code == 0 and (a0["dim_der"], a0["dim_hom_wedge"], a0["dim_hom_der"]) == (9, 8, 1)
    assert run(capsys, "splitting", fixture_path("sl2"))[0] == cli.EXIT_PRECONDITION


def test_selfcheck_is_seeded(capsys):
    a = machine(capsys, "selfcheck", fixture_path("twisted-sl2"), "--seed", "4", "--samples", "10")
    b = machine(capsys, "selfcheck", fixture_path("twisted-sl2"), "--seed", "4", "--samples", "10")
    assert a[0] == 0 and a[2] == b[2]


def test_human_format_renders(capsys):
    for argv in (["validate", fixture_path("sl2")], ["cohomology", fixture_path("sl2")],
                 ["deform", fixture_path("gl2"), "--extend-to", "2"], ["rigidity", fixture_path("der-phi-x3")],
                 ["splitting", fixture_path("free-a2"), "--module", "A2"],
                 ["selfcheck", fixture_path("sl2"), "--samples", "3"]):
        code, out = run(capsys, *argv)
        assert out.endswith(f"exit {code}\n")


@pytest.mark.parametrize("argv", [
    ["cohomology", "sl2"], ["rigidity", "der-phi-x3"], ["splitting", "free-a2", "--module", "A2"],
])
def test_machine_reports_byte_identical(capsys, argv):
    args = [argv[0], fixture_path(argv[1])] + argv[2:]
    outs = [machine(capsys, *args, "--jobs", j)[2] for j in ("1", "1", "4")]
    assert outs[0] == outs[1] == outs[2]


def test_console_script_runs():
    out = subprocess.run(["homdef", "cohomology", fixture_path("r2"), "--format", "machine", "--timing"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "elapsed" in out.stderr
    assert json.loads(out.stdout)["result"]["structure"] == "r2"
