"""JSON (de)serialization for groups, systems, and reports.

One self-describing schema, version "equivaria/1": complex numbers are
two-element [re, im] arrays, all matrices are nested lists in row-major
order, and `canonical_dumps` fixes key order and spacing so that
serialize(parse(text)) is byte-identical for canonical inputs.
"""
from __future__ import annotations

import json

import numpy as np

from .groups import BUILTIN_GROUPS, FiniteGroup, builtin_group
from .systems import EquivariantSystem

SCHEMA = "equivaria/1"


class ParseError(ValueError):
    pass


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def complex_array_to_json(arr: np.ndarray):
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return complex_to_json(complex(arr))
    return [complex_array_to_json(sub) for sub in arr]


def complex_array_from_json(data) -> np.ndarray:
    def build(node):
        if (isinstance(node, list) and len(node) == 2
                and all(isinstance(c, (int, float)) for c in node)):
            return complex(node[0], node[1])
        if isinstance(node, list):
            return [build(sub) for sub in node]
        raise ParseError(f"malformed complex array node: {node!r}")
    return np.asarray(build(data), dtype=complex)


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def group_to_json(g: FiniteGroup) -> dict:
    name = g.name or ""
    if name in BUILTIN_GROUPS:
        return {"schema": SCHEMA, "kind": "group", "builtin": name}
    return {"schema": SCHEMA, "kind": "group", "name": name,
            "mul": [[int(e) for e in row] for row in g.mul]}


def group_from_json(data: dict) -> FiniteGroup:
    if not isinstance(data, dict):
        raise ParseError("group document must be a JSON object")
    if "builtin" in data:
        name = data["builtin"]
        if name not in BUILTIN_GROUPS:
            raise ParseError(f"unknown builtin group {name!r}")
        return builtin_group(name)
    if "mul" not in data:
        raise ParseError("group document needs 'mul' or 'builtin'")
    mul = np.asarray(data["mul"], dtype=np.intp)
    return FiniteGroup(mul, name=data.get("name", ""))


def _point_to_json(p):
    if isinstance(p, tuple):
        return list(float(c) for c in p)
    if isinstance(p, str):
        return p
    return float(p)


def _point_from_json(p):
    if isinstance(p, list):
        return tuple(float(c) for c in p)
    if isinstance(p, str):
        return p
    return float(p)


def system_to_json(sys: EquivariantSystem) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "system",
        "name": sys.name,
        "group": group_to_json(sys.group),
        "points": [_point_to_json(p) for p in sys.points],
        "action": [[int(x) for x in row] for row in sys.action],
        "fiber_dim": int(sys.fiber_dim),
        "cocycle": complex_array_to_json(sys.cocycle),
    }


def system_from_json(data: dict) -> EquivariantSystem:
    if not isinstance(data, dict):
        raise ParseError("system document must be a JSON object")
    try:
        group = group_from_json(data["group"])
        points = tuple(_point_from_json(p) for p in data["points"])
        action = np.asarray(data["action"], dtype=np.intp)
        fiber_dim = int(data["fiber_dim"])
        cocycle = complex_array_from_json(data["cocycle"])
    except KeyError as exc:
        raise ParseError(f"system document missing field {exc}") from exc
    try:
        return EquivariantSystem(group, points, action, fiber_dim, cocycle,
                                 name=data.get("name", ""))
    except ValueError as exc:
        raise ParseError(f"invalid system: {exc}") from exc


def document_to_json(obj) -> dict:
    if isinstance(obj, FiniteGroup):
        return group_to_json(obj)
    if isinstance(obj, EquivariantSystem):
        return system_to_json(obj)
    raise ParseError(f"cannot serialize object of type {type(obj).__name__}")


def parse_document(text: str):
    """Parse a JSON document into a group, system, or component list.

    Component lists describe inputs for the toy-dual assembly:
    {"kind": "components", "components": [{"system": ..., "wprime": [...],
    "r": [...]}, ...]}.  Systems may also carry optional "wprime"/"r".
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError("top-level document must be a JSON object")
    kind = data.get("kind")
    if kind == "group":
        return group_from_json(data)
    if kind == "system":
        sys = system_from_json(data)
        extras = {}
        for key in ("wprime", "r"):
            if key in data:
                extras[key] = [int(e) for e in data[key]]
        return (sys, extras) if extras else sys
    if kind == "components":
        comps = []
        for entry in data.get("components", []):
            comps.append((system_from_json(entry["system"]),
                          [int(e) for e in entry["wprime"]],
                          [int(e) for e in entry["r"]]))
        return comps
    raise ParseError(f"unknown document kind {kind!r}")


def dumps_document(obj) -> str:
    return canonical_dumps(document_to_json(obj))
