"""JSON encoding for exact quantities and parsing of CLI-style values."""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

from .boolfn import Subcube


def rational(q) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator, "decimal": _decimal(q)}


def _decimal(q: Fraction, digits: int = 12) -> str:
    return f"{float(q):.{digits}g}"


def to_jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, Subcube):
        return obj.pattern()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def parse_fraction(text: str) -> Fraction:
    """Accept ``a/b`` or an integer; decimals are rejected to keep comparisons exact."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"expected a fraction like 1/8, got {text!r}")
    return Fraction(text)


def from_rational(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])
