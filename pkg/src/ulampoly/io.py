"""JSON and CSV encodings of solution sets.

JSON layout::

    {"degree": int, "seed": int,
     "solutions": [{"re": [...], "im": [...], "residual": f, "is_real": b,
                    "is_trivial": b, "cluster_size": int, "condition": f}],
     "paths": {"total", "converged", "diverged", "max_steps", "singular"},
     "manifest": {...}}

Floats are written with 17 significant digits so they round-trip exactly;
non-finite floats become ``null``.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .core import verify_fixed_point
from .enumeration import Solution, SolutionSet

__all__ = ["dumps", "solution_set_to_json", "solution_set_from_json", "solution_set_to_csv",
           "SOLUTION_SET_SCHEMA", "PATH_KEYS"]

PATH_KEYS = ("total", "converged", "diverged", "max_steps", "singular")

_NUM = {"type": "number"}
SOLUTION_SET_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["degree", "seed", "solutions", "paths", "manifest"],
    "properties": {
        "degree": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "solutions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["re", "im", "residual", "is_real", "is_trivial", "cluster_size", "condition"],
                "additionalProperties": False,
                "properties": {
                    "re": {"type": "array", "items": _NUM},
                    "im": {"type": "array", "items": _NUM},
                    "residual": _NUM,
                    "is_real": {"type": "boolean"},
                    "is_trivial": {"type": "boolean"},
                    "cluster_size": {"type": "integer", "minimum": 1},
                    "condition": _NUM,
                },
            },
        },
        "paths": {
            "type": "object",
            "required": list(PATH_KEYS),
            "properties": {k: {"type": "integer", "minimum": 0} for k in PATH_KEYS},
        },
        "manifest": {"type": "object"},
    },
}


def _fmt_float(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        return "null"
    if v == 0.0:
        v = 0.0  # drop the sign of -0.0
    return format(v, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _solution_dict(s: Solution) -> dict:
    return {
        "re": [float(v) for v in np.real(s.x)],
        "im": [float(v) for v in np.imag(s.x)],
        "residual": float(s.residual_norm),
        "is_real": bool(s.is_real),
        "is_trivial": bool(s.is_trivial),
        "cluster_size": int(s.cluster_size),
        "condition": float(s.condition_estimate),
    }


def solution_set_to_json(sset: SolutionSet, manifest: dict | None = None) -> str:
    doc = {
        "degree": int(sset.degree),
        "seed": int(sset.seed),
        "solutions": [_solution_dict(s) for s in sset.solutions],
        "paths": {k: int(sset.path_stats.get(k, 0)) for k in PATH_KEYS},
        "manifest": manifest or {},
    }
    return dumps(doc) + "\n"


def solution_set_from_json(text: str, verify_tol: float = 1e-8) -> SolutionSet:
    """Parse a JSON document; every solution is re-verified against the residual."""
    doc = json.loads(text)
    sols = []
    for item in doc["solutions"]:
        x = np.array(item["re"], dtype=float) + 1j * np.array(item["im"], dtype=float)
        if x.size != doc["degree"]:
            raise ValueError(f"solution has {x.size} entries, degree is {doc['degree']}")
        ok, r = verify_fixed_point(x, verify_tol)
        if not ok:
            raise ValueError(f"solution {x} fails re-verification (residual {r:.3e})")
        cond = item["condition"]
        sols.append(Solution(
            x=x,
            residual_norm=float(item["residual"]),
            is_real=bool(item["is_real"]),
            is_trivial=bool(item["is_trivial"]),
            cluster_size=int(item["cluster_size"]),
            condition_estimate=math.inf if cond is None else float(cond),
        ))
    manifest = doc.get("manifest", {})
    return SolutionSet(
        degree=int(doc["degree"]),
        solutions=sols,
        path_stats={k: int(doc["paths"][k]) for k in PATH_KEYS},
        seed=int(doc["seed"]),
        config=dict(manifest.get("config", {})),
    )


def solution_set_to_csv(sset: SolutionSet) -> str:
    n = sset.degree
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"re_{i}" for i in range(1, n + 1)] + [f"im_{i}" for i in range(1, n + 1)]
               + ["residual", "is_real", "is_trivial"])
    for s in sset.solutions:
        w.writerow([_fmt_float(v) for v in np.real(s.x)] + [_fmt_float(v) for v in np.imag(s.x)]
                   + [_fmt_float(s.residual_norm), str(bool(s.is_real)).lower(), str(bool(s.is_trivial)).lower()])
    return buf.getvalue()
