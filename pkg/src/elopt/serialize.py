"""JSON forms of surfaces, expressions and reports.

Expression and surface documents round-trip exactly: floats are emitted with
``repr`` (shortest round-trip form), so a reloaded expression evaluates
bit-identically.  Report serialization is one-way (dataclasses to plain JSON
types) and deterministic: keys are sorted and no volatile data is included.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any

import numpy as np

from .errors import ConfigError
from .exprs import (
    Clamp,
    ConcaveStep,
    ConvexDiag,
    ConvexPlateau,
    ELExpr,
    Linear,
    Scale,
    Sum,
    TruncateMin,
)
from .surfaces import (
    Curve2D,
    Hyperplane,
    HyperbolaCurve,
    LineCurve,
    QuadraticCurve,
    Surface,
)

__all__ = [
    "surface_to_dict",
    "surface_from_dict",
    "expr_to_dict",
    "expr_from_dict",
    "to_jsonable",
    "dumps",
]


def surface_to_dict(surface: Surface) -> dict:
    if isinstance(surface, Hyperplane):
        return {"kind": "hyperplane", "c": list(surface.c), "M": surface.M}
    if isinstance(surface, LineCurve):
        params: dict[str, float] = {}
    elif isinstance(surface, QuadraticCurve):
        params = {"c2": surface.c2}
    elif isinstance(surface, HyperbolaCurve):
        params = {"s": surface.s, "t": surface.t}
    else:
        raise ConfigError(f"unknown surface type {type(surface).__name__}")
    return {
        "kind": "curve",
        "family": surface.family,
        "a": surface.a,
        "b": surface.b,
        "shape": surface.shape,
        "params": params,
    }


def _take(doc: dict, required: dict[str, type], optional: dict[str, Any], where: str) -> dict:
    unknown = set(doc) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    out = {}
    for key in required:
        if key not in doc:
            raise ConfigError(f"missing key {key!r} in {where}")
        out[key] = doc[key]
    for key, default in optional.items():
        out[key] = doc.get(key, default)
    return out


def surface_from_dict(doc: dict) -> Surface:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("surface document must be an object with a 'kind' key")
    try:
        if doc["kind"] == "hyperplane":
            fields = _take(doc, {"kind": str, "c": list, "M": float}, {}, "hyperplane surface")
            return Hyperplane(c=tuple(float(v) for v in fields["c"]), M=float(fields["M"]))
        if doc["kind"] == "curve":
            fields = _take(
                doc,
                {"kind": str, "family": str, "a": float, "b": float},
                {"shape": "auto", "params": {}},
                "curve surface",
            )
            family = fields["family"]
            a, b, shape = float(fields["a"]), float(fields["b"]), fields["shape"]
            params = fields["params"] or {}
            if family == "line":
                _take(params, {}, {}, "line params")
                return LineCurve(a=a, b=b, shape=shape)
            if family == "quadratic":
                p = _take(params, {"c2": float}, {}, "quadratic params")
                return QuadraticCurve(a=a, b=b, c2=float(p["c2"]), shape=shape)
            if family == "hyperbola":
                p = _take(params, {"s": float, "t": float}, {}, "hyperbola params")
                return HyperbolaCurve(a=a, b=b, s=float(p["s"]), t=float(p["t"]), shape=shape)
            raise ConfigError(f"unknown curve family {family!r}")
        raise ConfigError(f"unknown surface kind {doc['kind']!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed surface document: {exc}") from exc


def expr_to_dict(expr: ELExpr) -> dict:
    if isinstance(expr, Linear):
        return {"op": "linear", "c": list(expr.c)}
    if isinstance(expr, Sum):
        return {"op": "sum", "left": expr_to_dict(expr.left), "right": expr_to_dict(expr.right)}
    if isinstance(expr, Scale):
        return {"op": "scale", "factor": expr.factor, "inner": expr_to_dict(expr.inner)}
    if isinstance(expr, TruncateMin):
        return {"op": "truncate_min", "cap": expr.cap, "inner": expr_to_dict(expr.inner)}
    if isinstance(expr, Clamp):
        return {"op": "clamp", "at": list(expr.at), "inner": expr_to_dict(expr.inner)}
    if isinstance(expr, ConvexPlateau):
        return {"op": "convex_plateau", "curve": surface_to_dict(expr.curve)}
    if isinstance(expr, ConvexDiag):
        return {"op": "convex_diag", "curve": surface_to_dict(expr.curve)}
    if isinstance(expr, ConcaveStep):
        return {"op": "concave_step", "curve": surface_to_dict(expr.curve)}
    raise ConfigError(f"unknown expression node {type(expr).__name__}")


def _curve_from(doc: dict, where: str) -> Curve2D:
    surface = surface_from_dict(doc)
    if isinstance(surface, Hyperplane):
        raise ConfigError(f"{where} needs a curve, got a hyperplane")
    return surface


def expr_from_dict(doc: dict) -> ELExpr:
    if not isinstance(doc, dict) or "op" not in doc:
        raise ConfigError("expression document must be an object with an 'op' key")
    op = doc["op"]
    try:
        if op == "linear":
            fields = _take(doc, {"op": str, "c": list}, {}, "linear node")
            return Linear(c=tuple(float(v) for v in fields["c"]))
        if op == "sum":
            fields = _take(doc, {"op": str, "left": dict, "right": dict}, {}, "sum node")
            return Sum(expr_from_dict(fields["left"]), expr_from_dict(fields["right"]))
        if op == "scale":
            fields = _take(doc, {"op": str, "factor": float, "inner": dict}, {}, "scale node")
            return Scale(float(fields["factor"]), expr_from_dict(fields["inner"]))
        if op == "truncate_min":
            fields = _take(doc, {"op": str, "cap": float, "inner": dict}, {}, "truncate_min node")
            return TruncateMin(float(fields["cap"]), expr_from_dict(fields["inner"]))
        if op == "clamp":
            fields = _take(doc, {"op": str, "at": list, "inner": dict}, {}, "clamp node")
            return Clamp(tuple(float(v) for v in fields["at"]), expr_from_dict(fields["inner"]))
        if op == "convex_plateau":
            fields = _take(doc, {"op": str, "curve": dict}, {}, "convex_plateau node")
            return ConvexPlateau(_curve_from(fields["curve"], "convex_plateau"))
        if op == "convex_diag":
            fields = _take(doc, {"op": str, "curve": dict}, {}, "convex_diag node")
            return ConvexDiag(_curve_from(fields["curve"], "convex_diag"))
        if op == "concave_step":
            fields = _take(doc, {"op": str, "curve": dict}, {}, "concave_step node")
            return ConcaveStep(_curve_from(fields["curve"], "concave_step"))
        raise ConfigError(f"unknown expression op {op!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed expression document: {exc}") from exc


def to_jsonable(obj: Any) -> Any:
    """Dataclasses/numpy values to plain JSON types (NaN/inf become strings)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for field in dataclasses.fields(obj):
            out[field.name] = to_jsonable(getattr(obj, field.name))
        return out
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    return repr(obj)


def dumps(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, repr floats, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
