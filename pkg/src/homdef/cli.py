"""Command-line front end.

Exit codes: 0 every requested check passed, 1 some check failed, 2 bad
input or usage, 3 a precondition of the requested computation does not hold.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

from homdef.algebra import validate_algebra, validate_module
from homdef.complex import deformation_complex, splitting_audit
from homdef.config import Settings
from homdef.deform import check_jet, extend, infinitesimal, rigidity_certificate
from homdef.hlr import validate_hlr
from homdef.io import InputError, _symbol_to_dict, _table, load
from homdef.mder import bracket, mder_space

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


class Precondition(Exception):
    pass


def _q(c) -> str:
    return str(c)


def _pmap(jobs: int, fn: Callable, items: Sequence) -> list:
    """Ordered map, threaded when jobs > 1."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _lookup(table: dict, name: Optional[str], what: str):
    if name is None:
        if len(table) == 1:
            return next(iter(table.items()))
        raise InputError(f"--{what} is required (choices: {', '.join(table) or 'none'})")
    if name not in table:
        raise InputError(f"unknown {what} {name!r} (choices: {', '.join(table) or 'none'})")
    return name, table[name]


def _md_dict(md) -> dict:
    out = {"bracket": _table(md.d, md.module.names, skew=True)} if md.degree == 1 else {}
    sym = _symbol_to_dict(md.sigma, md.module) if md.degree == 1 else {}
    if sym:
        out["symbol"] = sym
    return out


def _require_valid(s, name: str) -> None:
    rep = validate_hlr(s)
    if not rep.ok:
        v = rep.violations[0]
        raise Precondition(f"structure {name!r} fails {v.identity} at {v.witness}")


# --------------------------------------------------------------------------
# commands


def cmd_validate(args, settings: Settings) -> tuple[dict, int]:
    doc = load(args.path)
    tasks = []
    if doc.has_algebra:
        tasks.append(("algebra", "algebra", lambda: validate_algebra(doc.algebra)))
    for n, M in doc.modules.items():
        tasks.append(("module", n, lambda M=M: validate_module(M)))
    for n, s in doc.structures.items():
        tasks.append(("structure", n, lambda s=s: validate_hlr(s)))
    for n, j in doc.jets.items():
        tasks.append(("jet", n, lambda j=j: check_jet(j)))
    reports = _pmap(args.jobs, lambda t: t[2](), tasks)
    entries = []
    for (kind, name, _), rep in zip(tasks, reports):
        entries.append({"kind": kind, "name": name, "ok": rep.ok,
                        "violations": [v.as_dict() for v in rep.violations]})
    ok = all(e["ok"] for e in entries)
    return {"entries": entries, "ok": ok}, EXIT_OK if ok else EXIT_FAIL


def _max_degree(args, settings: Settings, default: int) -> int:
    n = default if args.max_degree is None else args.max_degree
    if n > settings.degree_cap:
        raise Precondition(f"degree {n} exceeds the cap {settings.degree_cap} (set HOMDEF_DEGREE_CAP)")
    if n < 0:
        raise InputError("--max-degree must be nonnegative")
    return n


def cmd_cohomology(args, settings: Settings) -> tuple[dict, int]:
    doc = load(args.path)
    name, s = _lookup(doc.structures, args.structure, "structure")
    top = _max_degree(args, settings, settings.degree_cap)
    _require_valid(s, name)
    cx = deformation_complex(s)
    degrees = list(range(max(cx.lowest, 0), top + 1))
    # coboundary matrices feed both neighbours; build them first, in order
    for n in degrees:
        cx.delta_matrix(n)
    reports = _pmap(args.jobs, cx.cohomology, degrees)
    table = [r.as_dict() for r in reports]
    return {"structure": name, "lowest_degree": cx.lowest, "cohomology": table}, EXIT_OK


def cmd_rigidity(args, settings: Settings) -> tuple[dict, int]:
    doc = load(args.path)
    name, s = _lookup(doc.structures, args.structure, "structure")
    _require_valid(s, name)
    try:
        rep = rigidity_certificate(s)
    except ValueError as exc:
        raise Precondition(str(exc)) from None
    body = {"structure": name, **rep.as_dict()}
    ok = rep.rigid and rep.primitives_match is not False
    return body, EXIT_OK if ok else EXIT_FAIL


def cmd_deform(args, settings: Settings) -> tuple[dict, int]:
    doc = load(args.path)
    name, jet = _lookup(doc.jets, args.jet, "jet")
    sname = next(n for n, s in doc.structures.items() if s is jet.structure)
    _require_valid(jet.structure, sname)
    target = jet.order if args.extend_to is None else args.extend_to
    if target > settings.degree_cap * 4:
        raise Precondition(f"extension order {target} is unreasonably high")
    trace = []
    rep = check_jet(jet)
    trace.append({"step": "check_jet", "order": jet.order, "ok": rep.ok,
                  "violations": [v.as_dict() for v in rep.violations]})
    if not rep.ok:
        return {"jet": name, "trace": trace, "extended_to": None}, EXIT_FAIL
    inf = infinitesimal(jet)
    trace.append({"step": "infinitesimal", "index": inf.index, "is_cocycle": inf.is_cocycle})
    cx = deformation_complex(jet.structure)
    status = EXIT_OK
    while jet.order < target:
        res = extend(jet, cx)
        ob = res.obstruction
        step = {"step": "obstruction", "order": jet.order + 1, "theta_zero": ob.theta.is_zero(),
                "display_agrees": ob.display_agrees, "is_cocycle": ob.is_cocycle,
                "extends": res.extended}
        if res.extended:
            step["primitive_coords"] = [_q(c) for c in ob.primitive_coords]
            step["primitive"] = _md_dict(ob.primitive)
        else:
            step["class_coords"] = [_q(c) for c in ob.class_coords]
        trace.append(step)
        if not res.extended:
            status = EXIT_FAIL
            break
        jet = res.jet
        rep = check_jet(jet)
        trace.append({"step": "check_jet", "order": jet.order, "ok": rep.ok,
                      "violations": [v.as_dict() for v in rep.violations]})
        if not rep.ok:
            status = EXIT_FAIL
            break
    return {"jet": name, "trace": trace, "extended_to": jet.order}, status


def cmd_splitting(args, settings: Settings) -> tuple[dict, int]:
    doc = load(args.path)
    name, M = _lookup(doc.modules, args.module, "module")
    top = _max_degree(args, settings, 1)
    try:
        audits = _pmap(args.jobs, lambda n: splitting_audit(M, n), list(range(top + 1)))
    except ValueError as exc:
        raise Precondition(str(exc)) from None
    ok = all(a.ok for a in audits)
    return {"module": name, "audits": [a.as_dict() for a in audits], "ok": ok}, EXIT_OK if ok else EXIT_FAIL


def cmd_selfcheck(args, settings: Settings) -> tuple[dict, int]:
    """Seeded random checks of graded antisymmetry, graded Jacobi and delta^2 = 0."""
    doc = load(args.path)
    name, s = _lookup(doc.structures, args.structure, "structure")
    _require_valid(s, name)
    rng = random.Random(args.seed)
    M = s.module
    spaces = [mder_space(M, p) for p in range(3)]
    spaces = [sp for sp in spaces if sp.dim]

    def rand(sp):
        return sp.element([rng.randint(-2, 2) for _ in range(sp.dim)])

    failures = []
    for t in range(args.samples):
        if not spaces:
            break
        a, b, c = (rng.choice(spaces) for _ in range(3))
        if a.degree + b.degree + c.degree > 3:
            continue
        x, y, z = rand(a), rand(b), rand(c)
        p, q = x.degree, y.degree
        sgn = -(-1) ** (p * q)
        if not bracket(x, y).equals(bracket(y, x).scale(sgn)):
            failures.append({"sample": t, "law": "graded antisymmetry"})
        lhs = bracket(x, bracket(y, z))
        rhs = bracket(bracket(x, y), z) + bracket(y, bracket(x, z)).scale((-1) ** (p * q))
        if not lhs.equals(rhs):
            failures.append({"sample": t, "law": "graded Jacobi"})
    cx = deformation_complex(s)
    for n in range(1, min(3, settings.degree_cap - 1) + 1):
        sp = cx.space(n)
        if sp.dim and not cx.apply(cx.apply(rand(sp))).is_zero():
            failures.append({"degree": n, "law": "delta^2 = 0"})
    body = {"structure": name, "seed": args.seed, "samples": args.samples, "failures": failures}
    return body, EXIT_OK if not failures else EXIT_FAIL


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "deform": cmd_deform,
    "rigidity": cmd_rigidity,
    "splitting": cmd_splitting,
    "selfcheck": cmd_selfcheck,
}


# --------------------------------------------------------------------------
# rendering


def render_machine(body: dict) -> str:
    return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_human(body: dict) -> str:
    lines = [f"homdef {body['command']['name']} {body['command']['path']}"]
    res = body.get("result", {})
    cmd = body["command"]["name"]
    if "error" in body:
        lines.append(f"error: {body['error']}")
    elif cmd == "validate":
        for e in res["entries"]:
            lines.append(f"  {e['kind']:<9} {e['name']:<20} {'pass' if e['ok'] else 'FAIL'}")
            for v in e["violations"][:5]:
                lines.append(f"      {v['identity']} at ({', '.join(map(str, v['witness']))}) {v['detail']}")
    elif cmd == "cohomology":
        lines.append(f"  structure {res['structure']}")
        lines.append("   n   dim C   dim Z   dim B   dim H")
        for r in res["cohomology"]:
            lines.append(f"  {r['degree']:>2} {r['dim_cochains']:>7} {r['dim_cocycles']:>7} "
                         f"{r['dim_coboundaries']:>7} {r['betti']:>7}")
    elif cmd == "rigidity":
        lines.append(f"  structure {res['structure']}: H^2 = {res['h2']}, "
                     f"{'rigid' if res['rigid'] else 'not certified rigid'}")
        if res["der_phi_checked"]:
            lines.append(f"  explicit primitives delta(Ad_phi^-1 o sigma_D) = D: "
                         f"{'match' if res['primitives_match'] else 'MISMATCH'}")
    elif cmd == "deform":
        for st in res["trace"]:
            if st["step"] == "check_jet":
                msg = "pass" if st["ok"] else f"FAIL {st['violations'][0]['identity']} at {st['violations'][0]['witness']}"
                lines.append(f"  check order <= {st['order']}: {msg}")
            elif st["step"] == "infinitesimal":
                lines.append(f"  infinitesimal: {'none' if st['index'] is None else 'm_' + str(st['index'])}"
                             f"{'' if st['is_cocycle'] is None else ', cocycle' if st['is_cocycle'] else ', NOT a cocycle'}")
            else:
                lines.append(f"  order {st['order']}: obstruction {'zero' if st['theta_zero'] else 'nonzero'}, "
                             f"{'extends' if st['extends'] else 'obstructed, class ' + str(st['class_coords'])}")
                if st["extends"]:
                    lines.append(f"      primitive coordinates {st['primitive_coords']}")
        lines.append(f"  jet now has order {res['extended_to']}")
    elif cmd == "splitting":
        lines.append("   n  Der^n  Hom(wedge L, L)  Hom(wedge L, Der A)  additive  injective")
        for a in res["audits"]:
            lines.append(f"  {a['degree']:>2} {a['dim_der']:>6} {a['dim_hom_wedge']:>16} {a['dim_hom_der']:>20}"
                         f"  {str(a['additive']):>8}  {str(a['injective']):>9}")
    elif cmd == "selfcheck":
        lines.append(f"  {res['samples']} samples, seed {res['seed']}: "
                     f"{'no failures' if not res['failures'] else str(len(res['failures'])) + ' failures'}")
    lines.append(f"exit {body['exit_code']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for independent checks")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    p = argparse.ArgumentParser(prog="homdef", description="Deformations of hom-Lie-Rinehart algebras.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", parents=[common], help="check every entry of a document")
    v.add_argument("path")
    c = sub.add_parser("cohomology", parents=[common], help="deformation cohomology table")
    c.add_argument("path")
    c.add_argument("--structure")
    c.add_argument("--max-degree", type=int)
    d = sub.add_parser("deform", parents=[common], help="check and extend a deformation jet")
    d.add_argument("path")
    d.add_argument("--jet")
    d.add_argument("--extend-to", type=int)
    r = sub.add_parser("rigidity", parents=[common], help="H^2 rigidity certificate")
    r.add_argument("path")
    r.add_argument("--structure")
    s = sub.add_parser("splitting", parents=[common], help="Koszul splitting audit of a free module")
    s.add_argument("path")
    s.add_argument("--module")
    s.add_argument("--max-degree", type=int)
    k = sub.add_parser("selfcheck", parents=[common], help="seeded random graded Lie algebra checks")
    k.add_argument("path")
    k.add_argument("--structure")
    k.add_argument("--samples", type=int, default=50)
    return p


def _echo(args) -> dict:
    opts = {k: v for k, v in sorted(vars(args).items())
            if k not in ("command", "path", "format", "jobs", "timing") and v is not None}
    return {"name": args.command, "path": args.path, "options": opts}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    body = {"command": _echo(args)}
    try:
        settings = Settings.from_env()
        if args.jobs < 1:
            raise InputError("--jobs must be at least 1")
        result, code = COMMANDS[args.command](args, settings)
        body["result"] = result
    except (InputError, OSError) as exc:
        body["error"], code = str(exc), EXIT_INPUT
    except (Precondition, ValueError) as exc:
        body["error"], code = str(exc), EXIT_PRECONDITION
    body["exit_code"] = code
    text = render_machine(body) if args.format == "machine" else render_human(body)
    sys.stdout.write(text)
    if args.timing:
        sys.stderr.write(f"elapsed {time.perf_counter() - t0:.3f} s\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
