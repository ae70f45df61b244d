"""On-disk format: JSON with a version header and explicit degree keys.

Integers inside matrices are written as decimal strings so that no value
is ever squeezed through a floating-point reader.  Degrees are object keys,
listed from the top degree down.

    {"format": 1, "kind": "complex", "ring": "Z",
     "degrees": {"1": {"gens": 1, "relations": []}, ...},
     "boundaries": {"1": [["2"]], ...},
     "elements": {"x": {"degree": -1, "coords": ["1"]}}}
"""
from __future__ import annotations

import json
from typing import Any, Optional

from .complex import ChainComplex, Element
from .fgmod import Presentation, Ring, ZZ
from .linalg import IntMatrix
from .maps import ChainMap

FORMAT = 1


class FormatError(ValueError):
    pass


def ring_to_str(R: Ring) -> str:
    return str(R)


def ring_from_str(s: str) -> Ring:
    s = s.strip()
    if s == "Z":
        return ZZ
    if s.startswith("Z/"):
        try:
            return Ring(int(s[2:]))
        except ValueError as e:
            raise FormatError(f"bad ring {s!r}") from e
    raise FormatError(f"bad ring {s!r}")


def _int(v: Any) -> int:
    if isinstance(v, bool):
        raise FormatError("booleans are not integers")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError as e:
            raise FormatError(f"not an integer: {v!r}") from e
    raise FormatError(f"not an integer: {v!r}")


def matrix_to_json(M: IntMatrix) -> list:
    return [[str(x) for x in row] for row in M.rows]


def matrix_from_json(rows: Any, nrows: int, ncols: int, what: str) -> IntMatrix:
    if not isinstance(rows, list) or len(rows) != nrows:
        raise FormatError(f"{what}: expected {nrows} rows")
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != ncols:
            raise FormatError(f"{what}: expected {ncols} columns")
        out.append([_int(x) for x in row])
    return IntMatrix(out, ncols)


def _header(obj: Any, kind: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError("top level must be an object")
    if obj.get("format") != FORMAT:
        raise FormatError(f"missing or unsupported format header (expected format: {FORMAT})")
    if obj.get("kind", kind) != kind:
        raise FormatError(f"expected a {kind}, found {obj.get('kind')!r}")


# ---------------------------------------------------------------------------
# modules

def module_to_obj(M: Presentation) -> dict:
    return {"format": FORMAT, "kind": "module", "ring": ring_to_str(M.ring), "gens": M.gens,
            "relations": matrix_to_json(M.relations)}


def module_from_obj(obj: Any) -> Presentation:
    _header(obj, "module")
    ring = ring_from_str(obj.get("ring", "Z"))
    g = _int(obj.get("gens"))
    rels = obj.get("relations", [])
    return Presentation(ring, g, matrix_from_json(rels, len(rels), g, "relations"))


# ---------------------------------------------------------------------------
# complexes

def complex_to_obj(X: ChainComplex, elements: Optional[dict[str, Element]] = None) -> dict:
    degrees = {}
    for m in reversed(X.degrees):
        M = X.module(m)
        degrees[str(m)] = {"gens": M.gens, "relations": matrix_to_json(M.relations)}
    bounds = {str(m): matrix_to_json(X.d(m)) for m in reversed(X.degrees) if m - 1 in X.degrees}
    obj = {"format": FORMAT, "kind": "complex", "ring": ring_to_str(X.ring),
           "degrees": degrees, "boundaries": bounds}
    if elements:
        obj["elements"] = {name: {"degree": e.degree, "coords": [str(c) for c in e.coords]}
                           for name, e in elements.items()}
    return obj


def complex_from_obj(obj: Any, with_elements: bool = False):
    """Parse a complex; raises FormatError, or InvalidComplex when d o d != 0."""
    _header(obj, "complex")
    ring = ring_from_str(obj.get("ring", "Z"))
    degs = obj.get("degrees")
    if not isinstance(degs, dict):
        raise FormatError("'degrees' must be an object keyed by degree")
    mods = {}
    for key, entry in degs.items():
        m = _int(key)
        if not isinstance(entry, dict):
            raise FormatError(f"degree {m}: expected an object")
        g = _int(entry.get("gens", 0))
        rels = entry.get("relations", [])
        if not isinstance(rels, list):
            raise FormatError(f"degree {m}: relations must be a list")
        mods[m] = Presentation(ring, g, matrix_from_json(rels, len(rels), g, f"relations in degree {m}"))
    diffs = {}
    for key, rows in (obj.get("boundaries") or {}).items():
        m = _int(key)
        if m not in mods or m - 1 not in mods:
            raise FormatError(f"boundary {m} needs degrees {m} and {m - 1}")
        diffs[m] = matrix_from_json(rows, mods[m - 1].gens, mods[m].gens, f"boundary in degree {m}")
    if mods:
        lo, hi = min(mods), max(mods)
        for m in range(lo, hi + 1):
            mods.setdefault(m, Presentation(ring, 0))
    X = ChainComplex(ring, mods, diffs)
    if not with_elements:
        return X
    elements = {}
    for name, e in (obj.get("elements") or {}).items():
        m = _int(e.get("degree"))
        coords = [_int(c) for c in e.get("coords", [])]
        if len(coords) != X.gens(m):
            raise FormatError(f"element {name!r}: expected {X.gens(m)} coordinates")
        elements[name] = Element.of(X, m, coords)
    return X, elements


# ---------------------------------------------------------------------------
# maps

def map_to_obj(f: ChainMap) -> dict:
    src, tgt = complex_to_obj(f.source), complex_to_obj(f.target)
    comps = {str(m): matrix_to_json(f.component(m)) for m in reversed(f.degrees)
             if f.source.gens(m) and f.target.gens(m)}
    return {"format": FORMAT, "kind": "map", "source": src, "target": tgt, "components": comps}


def map_from_obj(obj: Any) -> ChainMap:
    _header(obj, "map")
    src = complex_from_obj(obj.get("source"))
    tgt = complex_from_obj(obj.get("target"))
    comps = {}
    for key, rows in (obj.get("components") or {}).items():
        m = _int(key)
        comps[m] = matrix_from_json(rows, tgt.gens(m), src.gens(m), f"component in degree {m}")
    return ChainMap(src, tgt, comps)


# ---------------------------------------------------------------------------

def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load_any(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not valid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise FormatError("top level must be an object")
    return obj


def read_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return load_any(fh.read())
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e
