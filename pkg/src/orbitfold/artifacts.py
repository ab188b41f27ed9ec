"""JSON forms of the constructed objects.  Components are listed in index
order and polynomials in descending graded-lex order, so the text is a
deterministic function of the object."""

from __future__ import annotations

from .algebra import ExactMatrix, MultiPoly, RatFun
from .algebra.scalar import scalar_str
from .algebra.serialize import chart_to_json, poly_to_json, ratfun_to_json


def _value(v):
    if isinstance(v, RatFun):
        v = v.reduced()
    if isinstance(v, (RatFun, MultiPoly)):
        return {"text": str(v), "exact": ratfun_to_json(v)}
    return {"text": scalar_str(v)}


def tensor_to_json(T) -> dict:
    return {"chart": chart_to_json(T.chart), "up": T.up, "down": T.down,
            "components": [{"index": list(k), **_value(v)} for k, v in sorted(T.comps.items())]}


def index_dict_to_json(d: dict, chart) -> dict:
    return {"chart": chart_to_json(chart),
            "components": [{"index": list(k), **_value(v)} for k, v in sorted(d.items()) if v]}


def matrix_to_json(M: ExactMatrix) -> list:
    return [[_value(x)["text"] for x in row] for row in M.entries]


def polys_to_json(polys, names) -> list:
    return [{"name": name, "text": str(p), "exact": poly_to_json(p)} for name, p in zip(names, polys)]


def pencil_to_json(P) -> dict:
    return {
        "n": P.n,
        "normalization": P.normalization,
        "unit_variable": P.unit_var,
        "g": tensor_to_json(P.g_u),
        "eta": tensor_to_json(P.eta_u),
        "christoffel_g": index_dict_to_json(P.gamma_g, P.chart),
        "christoffel_eta": index_dict_to_json(P.gamma_eta, P.chart),
    }


def flat_to_json(F) -> dict:
    n = F.n
    return {
        "n": n,
        "t_of_u": polys_to_json(F.t_polys, [f"t{k}" for k in range(1, n + 1)]),
        "u_of_t": polys_to_json(F.u_polys, [f"u{k}" for k in range(1, n + 1)]),
        "scales": [scalar_str(s) for s in F.scales],
        "eta_t": matrix_to_json(F.eta_t),
    }


def frobenius_to_json(S) -> dict:
    return {
        "n": S.n,
        "normalization": S.pencil.normalization,
        "charge": scalar_str(S.d),
        "degrees": [scalar_str(x) for x in S.degrees],
        "R": [scalar_str(x) for x in S.R.diagonal],
        "unit": tensor_to_json(S.e),
        "euler": tensor_to_json(S.E),
        "structure_constants": tensor_to_json(S.c),
        "intersection_form": tensor_to_json(S.g_t),
    }


def prepotential_to_json(F) -> dict:
    return {
        "n": F.n,
        "text": str(F),
        "polynomial": poly_to_json(F.poly),
        "log_coefficient": scalar_str(F.kappa),
        "log_term": f"{scalar_str(F.kappa)}*{F.chart.coords[-1]}^2*log({F.chart.coords[-1]})",
        "log_convention": F.log_convention,
    }


__all__ = ["tensor_to_json", "index_dict_to_json", "matrix_to_json", "polys_to_json",
           "pencil_to_json", "flat_to_json", "frobenius_to_json", "prepotential_to_json"]
