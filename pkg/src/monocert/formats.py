"""JSON file formats and report serialisation.

Rationals are written as ``"p/q"`` strings (``"p"`` when ``q == 1``),
vectors as arrays of such strings.  ``+inf`` is written as ``"inf"``.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .convexpoly import EpiConditionsReport, MaxAffineFunction
from .errors import FormatError
from .exactgeom import INF, HPolyhedron, RatVec, VPolyhedron, as_rat, format_rat
from .operators import CycleViolation, FiniteOperator, MonotonicityViolation
from .theorems import CheckReport, Hypothesis


def _rat(value, where: str) -> Fraction:
    if isinstance(value, float) or isinstance(value, bool):
        raise FormatError(f"{where}: expected an integer or a 'p/q' string, got {value!r}")
    try:
        return as_rat(value)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from None


def _vector(value, dim: int | None, where: str) -> RatVec:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected an array")
    v = RatVec(_rat(c, f"{where}[{k}]") for k, c in enumerate(value))
    if dim is not None and v.dim != dim:
        raise FormatError(f"{where}: expected {dim} coordinates, got {v.dim}")
    return v


def _field(obj, key: str, where: str):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    if key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _dim(data, where: str = "$") -> int:
    dim = _field(data, "dim", where)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError(f"{where}.dim: expected a positive integer")
    return dim


def operator_from_json(data) -> FiniteOperator:
    dim = _dim(data)
    pairs = []
    for i, item in enumerate(_field(data, "pairs", "$")):
        where = f"$.pairs[{i}]"
        pairs.append((_vector(_field(item, "x", where), dim, where + ".x"),
                      _vector(_field(item, "xstar", where), dim, where + ".xstar")))
    rays = [_vector(r, dim, f"$.domain_rays[{k}]") for k, r in enumerate(data.get("domain_rays", []))]
    return FiniteOperator(pairs, dim, dim, rays)


def function_from_json(data) -> MaxAffineFunction:
    dim = _dim(data)
    pieces = []
    items = _field(data, "pieces", "$")
    if not items:
        raise FormatError("$.pieces: at least one piece is required")
    for i, item in enumerate(items):
        where = f"$.pieces[{i}]"
        pieces.append((_vector(_field(item, "a", where), dim, where + ".a"),
                       _rat(_field(item, "b", where), where + ".b")))
    return MaxAffineFunction(pieces, dim)


def set_from_json(data) -> VPolyhedron | HPolyhedron:
    dim = _dim(data)
    if "rows" in data:
        rows = []
        for i, item in enumerate(data["rows"]):
            where = f"$.rows[{i}]"
            rows.append((_vector(_field(item, "normal", where), dim, where + ".normal"),
                         _rat(_field(item, "offset", where), where + ".offset")))
        return HPolyhedron(rows, dim)
    verts = [_vector(v, dim, f"$.vertices[{k}]") for k, v in enumerate(_field(data, "vertices", "$"))]
    rays = [_vector(r, dim, f"$.rays[{k}]") for k, r in enumerate(data.get("rays", []))]
    return VPolyhedron(verts, rays, dim)


def parse_vector(text: str) -> RatVec:
    """``"1/2,0,-3"`` -> RatVec."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise FormatError(f"empty vector literal {text!r}")
    return RatVec(_rat(p, f"vector {text!r}") for p in parts)


def load_json(path) -> Any:
    try:
        with open(Path(path), encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _vec_json(v) -> list[str]:
    return [format_rat(c) for c in v]


def to_jsonable(obj) -> Any:
    """Convert toolkit values to plain JSON data with a stable field order."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if obj == INF:
            return "inf"
        raise TypeError("floats never appear in reports")
    if isinstance(obj, Fraction):
        return format_rat(obj)
    if isinstance(obj, RatVec):
        return _vec_json(obj)
    if isinstance(obj, MaxAffineFunction):
        return function_to_json(obj)
    if isinstance(obj, FiniteOperator):
        return operator_to_json(obj)
    if isinstance(obj, VPolyhedron) or isinstance(obj, HPolyhedron):
        return set_to_json(obj)
    if isinstance(obj, MonotonicityViolation):
        return {"kind": "monotonicity_violation", "indices": [obj.i, obj.j],
                "pair1": pair_json(obj.pair1), "pair2": pair_json(obj.pair2),
                "gap": format_rat(obj.gap)}
    if isinstance(obj, CycleViolation):
        return {"kind": "cycle_violation", "indices": list(obj.indices),
                "pairs": [pair_json(p) for p in obj.pairs],
                "cycle_sum": format_rat(obj.cycle_sum)}
    if isinstance(obj, CheckReport):
        return report_to_json(obj)
    if isinstance(obj, (Hypothesis, EpiConditionsReport)):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def pair_json(pair) -> dict:
    return {"x": _vec_json(pair[0]), "xstar": _vec_json(pair[1])}


def operator_to_json(T: FiniteOperator) -> dict:
    out = {"dim": T.primal_dim, "pairs": [pair_json(p) for p in T.pairs]}
    if T.domain_rays:
        out["domain_rays"] = [_vec_json(r) for r in T.domain_rays]
    return out


def function_to_json(f: MaxAffineFunction) -> dict:
    return {"dim": f.dim, "pieces": [{"a": _vec_json(a), "b": format_rat(b)} for a, b in f.pieces]}


def set_to_json(C) -> dict:
    if isinstance(C, HPolyhedron):
        return {"dim": C.dim, "rows": [{"normal": _vec_json(a), "offset": format_rat(b)}
                                       for a, b in C.rows]}
    return {"dim": C.dim, "vertices": [_vec_json(v) for v in C.vertices],
            "rays": [_vec_json(r) for r in C.rays]}


def report_to_json(rep: CheckReport) -> dict:
    return {
        "result_id": rep.result_id,
        "hypotheses": [{"name": h.name, "holds": h.holds, "witness": to_jsonable(h.witness)}
                       for h in rep.hypotheses],
        "conclusion": rep.conclusion,
        "certificates": to_jsonable(rep.certificates),
        "deterministic_seed": rep.deterministic_seed,
        "evidence": [report_to_json(e) for e in rep.evidence],
        "exit_code": rep.exit_code,
    }


def report_from_json(data) -> CheckReport:
    """Rebuild a report skeleton; certificates stay as plain JSON data."""
    rep = CheckReport(
        data["result_id"],
        [Hypothesis(h["name"], h["holds"], h["witness"]) for h in data["hypotheses"]],
        data["conclusion"],
        data["certificates"],
        data["deterministic_seed"],
        [report_from_json(e) for e in data["evidence"]],
    )
    return rep


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"
