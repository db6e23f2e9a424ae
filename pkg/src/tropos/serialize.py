"""Stable JSON output.  Every top-level document carries a schema tag and a provenance."""

from __future__ import annotations

import json
from enum import Enum
from fractions import Fraction

from .laurent import LaurentPoly, format_poly
from .polyhedra import UNKNOWN, Constraint, Polyhedron
from .sphere import SphericalSet
from .tropical import Provenance, TropicalCell, TropicalRegion

SCHEMA = "tropos/1"


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def read_rational(d) -> Fraction:
    if isinstance(d, dict):
        return Fraction(int(d["num"]), int(d["den"]))
    return Fraction(d)


def constraint_json(c: Constraint) -> dict:
    return {"a": list(c.a), "b": c.b, "kind": c.kind}


def polyhedron_json(P: Polyhedron) -> list[dict]:
    return [constraint_json(c) for c in P.constraints]


def region_json(R: TropicalRegion) -> dict:
    cells = []
    for c in R.cells:
        cell = {"constraints": polyhedron_json(c.polyhedron)}
        if c.tie_set is not None:
            cell["tie_set"] = [list(u) for u in c.tie_set]
        if c.unit_witness is not None:
            cell["unit_witness"] = list(c.unit_witness)
        cells.append(cell)
    return {
        "n": R.n,
        "source": R.source,
        "provenance": str(R.provenance),
        "diagnostics": list(R.diagnostics),
        "cells": cells,
    }


def sphere_json(S: SphericalSet) -> dict:
    return S.to_json()


def jsonable(obj):
    """Recursively convert library objects into plain JSON values."""
    if obj is UNKNOWN:
        return "UNKNOWN"
    if isinstance(obj, Provenance):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, LaurentPoly):
        return format_poly(obj)
    if isinstance(obj, TropicalRegion):
        return region_json(obj)
    if isinstance(obj, SphericalSet):
        return sphere_json(obj)
    if isinstance(obj, Polyhedron):
        return polyhedron_json(obj)
    if isinstance(obj, Constraint):
        return constraint_json(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def document(kind: str, payload: dict, provenance: Provenance | str) -> dict:
    doc = {"schema": SCHEMA, "kind": kind, "provenance": str(provenance)}
    doc.update(jsonable(payload))
    return doc


def dumps(doc) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def region_from_json(d: dict) -> TropicalRegion:
    n = int(d["n"])
    cells = []
    for c in d["cells"]:
        P = Polyhedron(n, [Constraint.make(x["a"], x["b"], x["kind"]) for x in c["constraints"]])
        tie = tuple(tuple(u) for u in c["tie_set"]) if "tie_set" in c else None
        wit = tuple(c["unit_witness"]) if "unit_witness" in c else None
        cells.append(TropicalCell(P, tie, wit))
    return TropicalRegion(n, tuple(cells), Provenance(d.get("provenance", "EXACT")), d.get("source", ""),
                          tuple(d.get("diagnostics", ())))


def load_drawable(doc: dict, key: str | None = None):
    """Pick a region or circle set out of a JSON document."""
    if key is not None:
        parts = key.split(".")
        for p in parts:
            doc = doc[p]
    if "cells" in doc:
        return region_from_json(doc)
    if "expr" in doc or "arcs" in doc or "points" in doc:
        return SphericalSet.from_json(doc)
    for k in ("region", "sphere"):
        if k in doc:
            return load_drawable(doc[k])
    raise ValueError("document holds no region or sphere set; pick one with --key")
