"""Canonical JSON forms.

A polynomial serialises as::

    {"chart": name, "terms": [{"exp": [..], "num": "..", "den": ".."}, ...]}

with terms in descending graded-lex order, so equal polynomials always
produce identical text.
"""

from __future__ import annotations

import json

from gmpy2 import mpq

from .chart import Chart
from .poly import MultiPoly
from .ratfun import RatFun


def poly_to_json(p: MultiPoly) -> dict:
    return {
        "chart": p.chart.name,
        "terms": [
            {"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)}
            for e, c in p.items()
        ],
    }


def poly_from_json(data: dict, chart: Chart) -> MultiPoly:
    if data.get("chart") != chart.name:
        raise ValueError(f"chart name {data.get('chart')!r} does not match {chart.name!r}")
    return MultiPoly.from_dict(
        chart, {tuple(t["exp"]): mpq(int(t["num"]), int(t["den"])) for t in data["terms"]})


def ratfun_to_json(f) -> dict:
    if isinstance(f, MultiPoly):
        return poly_to_json(f)
    if f.den.is_constant():
        return poly_to_json(f.as_poly())
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def ratfun_from_json(data: dict, chart: Chart) -> RatFun:
    if "terms" in data:
        return RatFun.lift(poly_from_json(data, chart), chart)
    return RatFun(poly_from_json(data["num"], chart), poly_from_json(data["den"], chart))


def chart_to_json(ch: Chart) -> dict:
    return {
        "name": ch.name,
        "coords": list(ch.coords),
        "weights": [str(w) for w in ch.weights],
        "params": list(ch.params),
    }


def chart_from_json(data: dict) -> Chart:
    return Chart(data["name"], tuple(data["coords"]), tuple(mpq(w) for w in data["weights"]),
                 tuple(data["params"]))


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
