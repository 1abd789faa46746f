"""JSON point files.

A point file is one JSON object with keys ``x`` (2 numbers), ``X`` (3
numbers: X11, X12, X22), ``y`` (2 numbers), ``Y12`` (a number) and,
optionally, ``alpha`` and ``beta`` (2 numbers each).  Unknown keys, missing
keys and non-finite numbers are rejected.  Numbers are written with 17
significant digits, so parse -> serialize -> parse is the identity.
"""
from __future__ import annotations

import json
import math
import sys

from .hull2 import HullPoint, LiftedPoint, System

REQUIRED = {"x": 2, "X": 3, "y": 2, "Y12": None}
OPTIONAL = {"alpha": 2, "beta": 2}


class PointFileError(ValueError):
    pass


def _numbers(key, value, length):
    if length is None:
        value = [value]
    if not isinstance(value, list) or len(value) != (length or 1):
        raise PointFileError(f"{key}: expected {length or 1} numbers, got {value!r}")
    out = []
    for t in value:
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise PointFileError(f"{key}: {t!r} is not a number")
        if not math.isfinite(t):
            raise PointFileError(f"{key}: {t!r} is not finite")
        out.append(float(t))
    return out if length else out[0]


def parse_point(obj) -> tuple:
    """Return ``(point, has_alpha)`` from a decoded JSON object."""
    if not isinstance(obj, dict):
        raise PointFileError("a point file holds one JSON object")
    extra = set(obj) - set(REQUIRED) - set(OPTIONAL)
    if extra:
        raise PointFileError(f"unknown keys: {sorted(extra)}")
    missing = set(REQUIRED) - set(obj)
    if missing:
        raise PointFileError(f"missing keys: {sorted(missing)}")
    vals = {k: _numbers(k, obj[k], n) for k, n in {**REQUIRED, **OPTIONAL}.items() if k in obj}
    base = HullPoint(vals["x"], vals["X"], vals["y"], vals["Y12"])
    z = LiftedPoint(base, vals.get("alpha", (0.0, 0.0)), vals.get("beta"))
    return z, "alpha" in obj


def _reject_constant(name):
    raise PointFileError(f"{name} is not a finite number")


def loads(text: str) -> tuple:
    try:
        obj = json.loads(text, parse_constant=_reject_constant, parse_int=float)
    except json.JSONDecodeError as exc:
        raise PointFileError(f"invalid JSON: {exc}") from None
    return parse_point(obj)


def load(path: str) -> tuple:
    if path == "-":
        return loads(sys.stdin.read())
    try:
        with open(path) as f:
            return loads(f.read())
    except OSError as exc:
        raise PointFileError(str(exc)) from None


def require_lift(z: LiftedPoint, has_alpha: bool, system) -> None:
    """Every system reads ``alpha``; ``disjunctive`` also reads ``beta``."""
    system = System.parse(system)
    if not has_alpha:
        raise PointFileError(f"the {system.value} system needs alpha")
    if system is System.DISJUNCTIVE and z.beta is None:
        raise PointFileError("the disjunctive system needs beta")


def point_to_dict(z: LiftedPoint, include_alpha: bool = True) -> dict:
    d = {"x": list(z.x), "X": list(z.X), "y": list(z.y), "Y12": z.Y12}
    if include_alpha:
        d["alpha"] = list(z.alpha)
    if z.beta is not None:
        d["beta"] = list(z.beta)
    return d


def _fmt(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(t) for t in v) + "]"
    return format(float(v), ".17g")


def dumps(z: LiftedPoint, include_alpha: bool = True) -> str:
    d = point_to_dict(z, include_alpha)
    body = ",\n".join(f'  "{k}": {_fmt(v)}' for k, v in d.items())
    return "{\n" + body + "\n}\n"
