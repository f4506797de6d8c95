"""``key=value`` and JSON rendering shared by every report."""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable

from .metric_core import render_rational

Items = list[tuple[str, Any]]


def render_value(v: Any, approx: bool = False) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return render_rational(v, approx)
    if isinstance(v, (list, tuple)):
        return ",".join(render_value(x, approx) for x in v)
    return str(v)


def render_items(items: Iterable[tuple[str, Any]], approx: bool = False) -> list[str]:
    return [f"{k}={render_value(v, approx)}" for k, v in items]


def json_value(v: Any) -> Any:
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    if isinstance(v, (list, tuple)):
        return [json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: json_value(x) for k, x in v.items()}
    return v


def items_json(items: Iterable[tuple[str, Any]]) -> dict:
    return {k: json_value(v) for k, v in items}
