"""Reading and writing structure-constant documents.

A document is UTF-8 JSON::

    {
      "format_version": "1",
      "algebra": {"basis": ["1", "x"], "unit": "1",
                  "mult": [["x", "x", {}]], "phi": {"x": {"x": "2"}}},
      "modules": {"L": {"regular": true}},
      "structures": {"s": {"module": "L", "bracket": [["a", "b", {"c": "1"}]],
                           "anchor": {"a": {"x": {"x": "1"}}}}},
      "jets": {"j": {"structure": "s", "terms": [{"bracket": [...]}]}}
    }

Vectors are sparse ``{basis name: rational}`` maps; rationals are integers or
strings such as ``"-3/4"``.  Floats are rejected.  Products with the unit are
implied; a listed product (a, b) also fixes (b, a).  ``phi`` and ``beta``
list images of basis elements, defaulting to the identity (``beta`` of a
regular or free module defaults to phi).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from homdef.algebra import AlgebraSpec, ModuleSpec, free_module, ground_field, regular_module
from homdef.deform import DeformationJet
from homdef.hlr import HLRStructure
from homdef.linalg import Q
from homdef.mder import Multiderivation, recompute_symbol
from homdef.tensors import eye, zeros

FORMAT_VERSION = "1"


class InputError(ValueError):
    """Malformed document; ``where`` is 'line L, column C' or a JSON path."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class _Float(str):
    pass


@dataclass
class Document:
    algebra: AlgebraSpec
    modules: dict = field(default_factory=dict)
    structures: dict = field(default_factory=dict)
    jets: dict = field(default_factory=dict)
    has_algebra: bool = True


# --------------------------------------------------------------------------
# parsing


def _position(text: str, needle: str) -> str:
    pos = text.find(needle)
    if pos < 0:
        return ""
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f"line {line}, column {col}"


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def rational(self, v: Any, path: str) -> Fraction:
        if isinstance(v, _Float):
            where = _position(self.text, str(v)) or path
            raise InputError(f"float {v} is not an exact rational; write it as \"p/q\"", where)
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise InputError(f"expected a rational, got {json.dumps(v) if not isinstance(v, _Float) else v}", path)
        try:
            return Q(v)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {v!r}: {exc}", path) from None

    def vector(self, v: Any, names: tuple, path: str) -> np.ndarray:
        if not isinstance(v, dict):
            raise InputError("expected a {name: rational} map", path)
        out = zeros((len(names),))
        for key, c in v.items():
            out[self.index(names, key, f"{path}.{key}")] += self.rational(c, f"{path}.{key}")
        return out

    @staticmethod
    def index(names: tuple, key: str, path: str) -> int:
        try:
            return names.index(key)
        except ValueError:
            raise InputError(f"unknown basis element {key!r}", path) from None

    def linear_map(self, v: Any, names: tuple, path: str, default: Optional[np.ndarray] = None,
                   target_names: Optional[tuple] = None) -> np.ndarray:
        """Matrix (columns = images) from a {name: vector} map; unlisted columns from ``default``."""
        target_names = names if target_names is None else target_names
        out = eye(len(names)) if default is None else default.copy()
        if v is None:
            return out
        if not isinstance(v, dict):
            raise InputError("expected a {name: image} map", path)
        for key, img in v.items():
            j = self.index(names, key, f"{path}.{key}")
            out[:, j] = self.vector(img, target_names, f"{path}.{key}")
        return out

    def table(self, v: Any, names: tuple, path: str, skew: bool) -> np.ndarray:
        """Bilinear table from [[a, b, vector], ...]."""
        n = len(names)
        out = zeros((n, n, n))
        if v is None:
            return out
        if not isinstance(v, list):
            raise InputError("expected a list of [a, b, value] entries", path)
        seen = set()
        for pos, entry in enumerate(v):
            p = f"{path}[{pos}]"
            if not (isinstance(entry, list) and len(entry) == 3):
                raise InputError("expected [a, b, value]", p)
            i = self.index(names, entry[0], p)
            j = self.index(names, entry[1], p)
            if (i, j) in seen or (j, i) in seen:
                raise InputError(f"pair ({entry[0]}, {entry[1]}) given twice", p)
            seen.add((i, j))
            val = self.vector(entry[2], names, p)
            if skew and i == j and any(val):
                raise InputError("bracket of an element with itself must vanish", p)
            out[i, j] = val
            out[j, i] = -val if skew else val
        return out


def _object(v: Any, path: str) -> dict:
    if v is None:
        return {}
    if not isinstance(v, dict):
        raise InputError("expected an object", path)
    return v


def _names(v: Any, path: str) -> tuple:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v) or not v:
        raise InputError("expected a nonempty list of basis names", path)
    if len(set(v)) != len(v):
        raise InputError("duplicate basis names", path)
    return tuple(v)


def parse(text: str) -> Document:
    try:
        raw = json.loads(text, parse_float=_Float)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(raw, dict):
        raise InputError("top level must be an object", "line 1, column 1")
    known = {"format_version", "algebra", "modules", "structures", "jets"}
    extra = sorted(set(raw) - known)
    if extra:
        raise InputError(f"unknown top-level keys {extra}", "$")
    ver = raw.get("format_version", FORMAT_VERSION)
    if ver != FORMAT_VERSION:
        raise InputError(f"unsupported format_version {ver!r}", "$.format_version")
    r = _Reader(text)
    A = _parse_algebra(r, raw.get("algebra"))
    doc = Document(A, has_algebra="algebra" in raw)
    for name, m in _object(raw.get("modules"), "$.modules").items():
        doc.modules[name] = _parse_module(r, A, m, f"$.modules.{name}")
    for name, s in _object(raw.get("structures"), "$.structures").items():
        doc.structures[name] = _parse_structure(r, doc, s, f"$.structures.{name}")
    for name, j in _object(raw.get("jets"), "$.jets").items():
        doc.jets[name] = _parse_jet(r, doc, j, f"$.jets.{name}")
    return doc


def fixture_path(name: str) -> str:
    """Path of a bundled fixture document."""
    from importlib.resources import files
    return str(files("homdef") / "fixtures" / f"{name}.json")


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _parse_algebra(r: _Reader, raw: Any) -> AlgebraSpec:
    if raw is None:
        return ground_field()
    raw = _object(raw, "$.algebra")
    names = _names(raw.get("basis"), "$.algebra.basis")
    unit_name = raw.get("unit", names[0])
    u = r.index(names, unit_name, "$.algebra.unit")
    k = len(names)
    mu = r.table(raw.get("mult"), names, "$.algebra.mult", skew=False)
    for i in range(k):
        e = zeros((k,))
        e[i] = 1
        mu[u, i] = e
        mu[i, u] = e.copy()
    uv = zeros((k,))
    uv[u] = 1
    phi = r.linear_map(raw.get("phi"), names, "$.algebra.phi")
    return AlgebraSpec(mu, uv, phi, names)


def _parse_module(r: _Reader, A: AlgebraSpec, raw: Any, path: str) -> ModuleSpec:
    raw = _object(raw, path)
    if raw.get("regular"):
        M = regular_module(A)
    elif "free_rank" in raw:
        rank = raw["free_rank"]
        if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
            raise InputError("free_rank must be a positive integer", f"{path}.free_rank")
        M = free_module(A, rank)
    else:
        names = _names(raw.get("basis"), f"{path}.basis")
        m = len(names)
        action = zeros((A.dim, m, m))
        ua = list(A.unit_vector).index(1)
        for j in range(m):
            action[ua, j, j] = 1
        acts = raw.get("action", [])
        if not isinstance(acts, list):
            raise InputError("expected a list of [a, x, value] entries", f"{path}.action")
        for pos, entry in enumerate(acts):
            p = f"{path}.action[{pos}]"
            if not (isinstance(entry, list) and len(entry) == 3):
                raise InputError("expected [a, x, value]", p)
            a = r.index(A.names, entry[0], p)
            x = r.index(names, entry[1], p)
            action[a, x] = r.vector(entry[2], names, p)
        beta = r.linear_map(raw.get("beta"), names, f"{path}.beta")
        return ModuleSpec(A, action, beta, names)
    if "beta" in raw:
        M = M.with_beta(r.linear_map(raw["beta"], M.names, f"{path}.beta", default=M.beta))
    return M


def _parse_structure(r: _Reader, doc: Document, raw: Any, path: str) -> HLRStructure:
    raw = _object(raw, path)
    mname = raw.get("module")
    if mname not in doc.modules:
        raise InputError(f"unknown module {mname!r}", f"{path}.module")
    M = doc.modules[mname]
    br = r.table(raw.get("bracket"), M.names, f"{path}.bracket", skew=True)
    anchor = _parse_symbol(r, M, raw.get("anchor"), f"{path}.anchor", arity=1)
    return HLRStructure(M, br, anchor)


def _parse_symbol(r: _Reader, M: ModuleSpec, raw: Any, path: str, arity: int) -> np.ndarray:
    """Derivation-valued alternating map; keys are basis names joined by ','."""
    A = M.algebra
    k = A.dim
    out = zeros((M.dim,) * arity + (k, k))
    if raw is None:
        return out
    if not isinstance(raw, dict):
        raise InputError("expected a {element: derivation} map", path)
    from homdef.tensors import perm_sign
    from itertools import permutations
    for key, val in raw.items():
        parts = key.split(",") if arity > 1 else [key]
        if len(parts) != arity:
            raise InputError(f"expected {arity} comma-separated names", f"{path}.{key}")
        idx = tuple(r.index(M.names, p, f"{path}.{key}") for p in parts)
        mat = r.linear_map(val, A.names, f"{path}.{key}", default=zeros((k, k)))
        for perm in permutations(range(arity)):
            j = tuple(idx[p] for p in perm)
            s = perm_sign(j) * perm_sign(idx) if len(set(idx)) == arity else 0
            out[j] = mat * s
    return out


def _parse_jet(r: _Reader, doc: Document, raw: Any, path: str) -> DeformationJet:
    raw = _object(raw, path)
    sname = raw.get("structure")
    if sname not in doc.structures:
        raise InputError(f"unknown structure {sname!r}", f"{path}.structure")
    s = doc.structures[sname]
    M = s.module
    terms = raw.get("terms", [])
    if not isinstance(terms, list):
        raise InputError("terms must be a list", f"{path}.terms")
    out = []
    for i, t in enumerate(terms):
        p = f"{path}.terms[{i}]"
        t = _object(t, p)
        d = r.table(t.get("bracket"), M.names, f"{p}.bracket", skew=True)
        if "symbol" in t:
            sigma = _parse_symbol(r, M, t["symbol"], f"{p}.symbol", arity=1)
        else:
            sigma = recompute_symbol(M, 1, d)
            if sigma is None:
                sigma = zeros((M.dim, M.algebra.dim, M.algebra.dim))
        out.append(Multiderivation(M, 1, d, sigma))
    return DeformationJet(s, tuple(out))


# --------------------------------------------------------------------------
# writing


def _q(c) -> Any:
    c = Fraction(c)
    return int(c) if c.denominator == 1 else str(c)


def _vec(v, names) -> dict:
    return {names[i]: _q(c) for i, c in enumerate(v) if c != 0}


def _map(mat, names, target_names=None, skip_identity=False) -> dict:
    target_names = names if target_names is None else target_names
    out = {}
    for j in range(mat.shape[1]):
        col = mat[:, j]
        if skip_identity and all(c == (1 if i == j else 0) for i, c in enumerate(col)):
            continue
        out[names[j]] = _vec(col, target_names)
    return out


def _table(t, names, skew: bool) -> list:
    n = len(names)
    out = []
    for i in range(n):
        for j in range(i + 1 if skew else i, n):
            if any(c != 0 for c in t[i, j]):
                out.append([names[i], names[j], _vec(t[i, j], names)])
    return out


def algebra_to_dict(A: AlgebraSpec) -> dict:
    u = list(A.unit_vector).index(1)
    mult = []
    for i in range(A.dim):
        for j in range(i, A.dim):
            if i == u or j == u:
                continue
            if any(c != 0 for c in A.mu[i, j]):
                mult.append([A.names[i], A.names[j], _vec(A.mu[i, j], A.names)])
    out = {"basis": list(A.names), "unit": A.names[u], "mult": mult}
    phi = _map(A.phi, A.names, skip_identity=True)
    if phi:
        out["phi"] = phi
    return out


def module_to_dict(M: ModuleSpec) -> dict:
    A = M.algebra
    base = None
    if M.free_rank is not None:
        base, out = free_module(A, M.free_rank), {"free_rank": M.free_rank}
    elif M.names == A.names and np.array_equal(M.action, A.mu):
        base, out = regular_module(A), {"regular": True}
    if base is not None and np.array_equal(base.action, M.action):
        if any(c != 0 for c in (M.beta - base.beta).flat):
            out["beta"] = _map(M.beta, M.names)
        return out
    u = list(A.unit_vector).index(1)
    action = []
    for a in range(A.dim):
        if a == u:
            continue
        for x in range(M.dim):
            if any(c != 0 for c in M.action[a, x]):
                action.append([A.names[a], M.names[x], _vec(M.action[a, x], M.names)])
    out = {"basis": list(M.names), "action": action}
    beta = _map(M.beta, M.names, skip_identity=True)
    if beta:
        out["beta"] = beta
    return out


def _symbol_to_dict(sigma, M: ModuleSpec) -> dict:
    A = M.algebra
    out = {}
    for i in range(M.dim):
        if any(c != 0 for c in sigma[i].flat):
            out[M.names[i]] = {A.names[j]: _vec(sigma[i][:, j], A.names)
                               for j in range(A.dim) if any(c != 0 for c in sigma[i][:, j])}
    return out


def structure_to_dict(s: HLRStructure, module_name: str) -> dict:
    out = {"module": module_name, "bracket": _table(s.bracket, s.module.names, skew=True)}
    anchor = _symbol_to_dict(s.anchor, s.module)
    if anchor:
        out["anchor"] = anchor
    return out


def jet_to_dict(j: DeformationJet, structure_name: str) -> dict:
    terms = []
    for t in j.terms:
        e = {"bracket": _table(t.d, t.module.names, skew=True)}
        sym = _symbol_to_dict(t.sigma, t.module)
        if sym:
            e["symbol"] = sym
        terms.append(e)
    return {"structure": structure_name, "terms": terms}


def document_to_dict(doc: Document) -> dict:
    mod_names = {id(M): n for n, M in doc.modules.items()}
    st_names = {id(s): n for n, s in doc.structures.items()}
    out: dict = {"format_version": FORMAT_VERSION}
    if doc.has_algebra:
        out["algebra"] = algebra_to_dict(doc.algebra)
    if doc.modules:
        out["modules"] = {n: module_to_dict(M) for n, M in doc.modules.items()}
    if doc.structures:
        out["structures"] = {n: structure_to_dict(s, mod_names[id(s.module)]) for n, s in doc.structures.items()}
    if doc.jets:
        out["jets"] = {n: jet_to_dict(j, st_names[id(j.structure)]) for n, j in doc.jets.items()}
    return out


def dumps(doc: Document) -> str:
    return json.dumps(document_to_dict(doc), indent=2, ensure_ascii=False) + "\n"


def dump(doc: Document, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
