"""Frobenius structure on the t-chart: the R operator, structure constants of
the non-regular pencil, their axioms, and the prepotential with its
``t_n^2 log t_n`` term."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from gmpy2 import mpq

from .algebra import ExactMatrix, MultiPoly, RatFun
from .algebra.scalar import scalar_str
from .integrate import IntegrabilityError, LogLaurent, radial_potential
from .flat import FlatChart, anti_identity, flat_coordinates, to_flat_chart, transform_contravariant_christoffel
from .pencil import PencilData, build_pencil, euler_field_u
from .report import Report, first_nonzero
from .tensors import TensorField, dot, lie_derivative

LOG_CONVENTIONS = ("antiderivative", "bare")


def degrees(n: int) -> list:
    """``d_i = i/(n-1)`` (position ``i-1``)."""
    return [mpq(i, n - 1) for i in range(1, n + 1)]


def charge(n: int) -> mpq:
    return mpq(1) - mpq(2, n - 1)


def prepotential_degree(n: int) -> mpq:
    return 3 - charge(n)


@dataclass
class ROperator:
    diagonal: list

    def matrix(self) -> ExactMatrix:
        n = len(self.diagonal)
        return ExactMatrix([[self.diagonal[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def regular(self) -> bool:
        return all(self.diagonal)


def r_operator(E_t: TensorField, d) -> ROperator:
    """``R^i_j = ((d-1)/2) delta^i_j + d_j E^i`` in flat coordinates; must be diagonal."""
    ch = E_t.chart
    n = ch.dim
    diag = []
    for i in range(n):
        for j in range(n):
            v = E_t[i].diff(ch.coords[j])
            if i == j:
                v = v + (d - 1) / 2
            if not v.is_constant():
                raise ArithmeticError("R is not constant")
            if i != j and v.constant_value() != 0:
                raise ArithmeticError("R is not diagonal")
            if i == j:
                diag.append(v.constant_value())
    return ROperator(diag)


@dataclass
class FrobeniusStructure:
    n: int
    pencil: PencilData
    flat: FlatChart
    g_t: TensorField
    gamma_t: dict
    c: TensorField
    e: TensorField
    E: TensorField
    R: ROperator

    @property
    def chart(self):
        return self.flat.tchart

    @property
    def degrees(self):
        return degrees(self.n)

    @property
    def d(self):
        return charge(self.n)

    @property
    def dF(self):
        return prepotential_degree(self.n)


def structure_constants(gamma_t: dict, R: ROperator, chart) -> TensorField:
    """``c^i_{jk} = eta_{jh} Gamma^{hi}_k / R^i_i`` for ``i != 1`` and the special row
    ``c^1``, with ``eta`` the anti-identity."""
    n = chart.dim
    z = RatFun.zero(chart)
    comps = {}
    for i in range(1, n):
        if R.diagonal[i] == 0:
            raise ZeroDivisionError(f"R^{i + 1}_{i + 1} vanishes")
        for j, k in product(range(n), repeat=2):
            v = gamma_t.get((n - 1 - j, i, k), z)
            if v:
                comps[(i, j, k)] = v / R.diagonal[i]
    tn = RatFun.var(chart, chart.coords[n - 1])
    for i, j in product(range(n), repeat=2):
        if j != n - 1:
            v = comps.get((n - 1 - j, n - 1, i))
        elif i != n - 1:
            v = comps.get((n - 1 - i, n - 1, n - 1))
        else:
            v = RatFun.const(chart, n - 1) / tn
        if v:
            comps[(0, i, j)] = v
    return TensorField(chart, 1, 2, comps)


@lru_cache(maxsize=None)
def frobenius_structure(n: int) -> FrobeniusStructure:
    P = build_pencil(n, "saito")
    F = flat_coordinates(P)
    g_t = to_flat_chart(P.g_u, F)
    gamma_t = transform_contravariant_christoffel(P.g_u, P.gamma_g, F)
    E_t = to_flat_chart(euler_field_u(n), F)
    R = r_operator(E_t, charge(n))
    c = structure_constants(gamma_t, R, F.tchart)
    e = TensorField(F.tchart, 1, 0, {(n - 2,): 1})
    return FrobeniusStructure(n, P, F, g_t, gamma_t, c, e, E_t, R)


# -- axioms ------------------------------------------------------------------------

def _witness(items):
    return first_nonzero(items)


def verify_axioms(S: FrobeniusStructure) -> Report:
    n = S.n
    ch = S.chart
    c = S.c
    co = ch.coords
    rep = Report()
    idx3 = list(product(range(n), repeat=3))
    rep.add("R_operator", n, S.R.diagonal == [mpq(j, n - 1) for j in range(n)], S.R.diagonal)
    rep.add("euler_field_t", n, S.E == TensorField.vector(ch, [RatFun.var(ch, co[i]) * mpq(i + 1, n - 1)
                                                               for i in range(n)]))
    rep.add("commutativity", n, not (w := _witness(((i, j, k), c[i, j, k] - c[i, k, j]) for i, j, k in idx3)), w)
    u = n - 2
    rep.add("unit", n, not (w := _witness(((i, j), c[i, j, u] - (1 if i == j else 0))
                                          for i, j in product(range(n), repeat=2))), w)
    rep.add("eta_invariance", n, not (w := _witness(((i, j, k), c[n - 1 - i, j, k] - c[n - 1 - j, i, k])
                                                    for i, j, k in idx3)), w)
    rep.add("nabla_c_symmetric", n, not (w := _witness(
        ((s, k, j, l), c[k, j, l].diff(co[s]) - c[k, j, s].diff(co[l]))
        for s, k, j, l in product(range(n), repeat=4))), w)
    Ec = [S.E[k] for k in range(n)]
    rep.add("intersection_form_affinor", n, not (w := _witness(
        ((i, j), dot([c[i, j, k] for k in range(n)], Ec, ch) - S.g_t[i, n - 1 - j])
        for i, j in product(range(n), repeat=2))), w)
    rep.add("intersection_form", n, not (w := _witness(
        ((i, h), dot([c[i, n - 1 - h, k] for k in range(n)], Ec, ch) - S.g_t[i, h])
        for i, h in product(range(n), repeat=2))), w)
    rep.add("c_symmetry", n, not (w := _witness(((i, j, k), c[i, j, k] - c[n - 1 - k, n - 1 - i, j])
                                                for i, j, k in idx3)), w)
    rep.add("g_invariance", n, not (w := _witness(
        ((i, l, m), dot([S.g_t[i, s] for s in range(n)], [c[l, s, m] for s in range(n)], ch)
         - dot([S.g_t[l, s] for s in range(n)], [c[i, s, m] for s in range(n)], ch))
        for i, l, m in idx3)), w)
    rep.add("lie_E_c", n, lie_derivative(c, S.E) == c)
    edge, generic = associativity_residuals(c)
    rep.add("associativity_generic", n, not generic, generic[:1] or None)
    rep.add("associativity_index_n", n, not edge, edge[:1] or None)
    rep.add("c_degrees", n, not (w := _degree_failures(S)), w)
    rep.add("c_vanishing_pattern", n, not (w := _witness(
        ((k, i, j), c[k, i, j]) for k, i, j in idx3
        if (i + 1) + (j + 1) > n + (k + 1) - 1 and (k, i, j) != (0, n - 1, n - 1))), w)
    return rep


def associativity_residuals(c: TensorField):
    """``c^i_{jl} c^l_{km} - c^i_{kl} c^l_{jm}`` split into cases with an index ``n``
    among ``j, k`` and the remaining ones."""
    ch = c.chart
    n = ch.dim
    edge, generic = [], []
    for i, j, k, m in product(range(n), repeat=4):
        if j >= k:
            continue
        r = dot([c[i, j, l] for l in range(n)], [c[l, k, m] for l in range(n)], ch) \
            - dot([c[i, k, l] for l in range(n)], [c[l, j, m] for l in range(n)], ch)
        if r:
            (edge if n - 1 in (j, k) else generic).append({"index": [i, j, k, m], "value": r})
    return edge, generic


def _degree_failures(S: FrobeniusStructure):
    """Weighted degree ``(n - 1 + k - i - j)/(n - 1)`` of ``c^k_{ij}`` in the grading
    where ``t_i`` has degree ``d_i``; the t-chart weights are ``2i``."""
    n = S.n
    for (k, i, j), v in sorted(S.c.comps.items()):
        if (k, i, j) == (0, n - 1, n - 1):
            continue
        if not v.is_polynomial() or not v.is_homogeneous():
            return {"index": [k, i, j], "value": v}
        expected = mpq(n - 1 + (k + 1) - (i + 1) - (j + 1), n - 1)
        if mpq(v.weighted_degree()) / (2 * (n - 1)) != expected:
            return {"index": [k, i, j], "value": v}
    return None


def christoffel_ledger(S: FrobeniusStructure) -> Report:
    """``b^{ij}_k = (1 + d_j - d_F/2) c^{ij}_k`` equals the contravariant symbols of ``g``."""
    n = S.n
    ch = S.chart
    co = ch.coords
    d = degrees(n)
    factor = [1 + d[j] - S.dF / 2 for j in range(n)]
    rep = Report()
    rep.add("ledger_factor", n, factor == [mpq(j, n - 1) for j in range(n)], factor)
    cup = {(i, j, k): S.c[j, n - 1 - i, k] for i, j, k in product(range(n), repeat=3)}
    rep.add("c_upper_symmetric", n, not (w := _witness(((i, j, k), cup[(i, j, k)] - cup[(j, i, k)])
                                                       for i, j, k in product(range(n), repeat=3))), w)
    b = {key: v * factor[key[1]] for key, v in cup.items() if v}
    z = RatFun.zero(ch)
    rep.add("b_equals_christoffel", n, not (w := _witness(
        (key, b.get(key, z) - S.gamma_t.get(key, z)) for key in sorted(set(b) | set(S.gamma_t)))), w)
    rep.add("ledger_metricity", n, not (w := _witness(
        ((i, j, k), S.g_t[i, j].diff(co[k]) - b.get((i, j, k), z) - b.get((j, i, k), z))
        for i, j, k in product(range(n), repeat=3))), w)
    rep.add("ledger_torsion", n, not (w := _witness(
        ((i, j, k), dot([S.g_t[i, s] for s in range(n)], [b.get((j, k, s), z) for s in range(n)], ch)
         - dot([S.g_t[j, s] for s in range(n)], [b.get((i, k, s), z) for s in range(n)], ch))
        for i, j, k in product(range(n), repeat=3))), w)
    return rep


# -- prepotential ----------------------------------------------------------------------

@dataclass
class Prepotential:
    """``poly + kappa * t_n^2 log t_n`` plus, for the antiderivative convention,
    ``-(3/2) kappa t_n^2`` already included in ``poly``."""

    poly: MultiPoly
    kappa: mpq
    log_convention: str = "antiderivative"

    @property
    def chart(self):
        return self.poly.chart

    @property
    def n(self):
        return self.chart.dim

    def third_derivative(self, i, j, k) -> RatFun:
        co = self.chart.coords
        v = RatFun.lift(self.poly.diff(co[i]).diff(co[j]).diff(co[k]), self.chart)
        last = self.n - 1
        if (i, j, k) == (last, last, last) and self.kappa:
            v = v + RatFun.const(self.chart, 2 * self.kappa) / RatFun.var(self.chart, co[last])
        return v

    def third_derivatives(self) -> dict:
        n = self.n
        return {idx: self.third_derivative(*idx) for idx in product(range(n), repeat=3)}

    def __str__(self):
        tn = self.chart.coords[-1]
        s = str(self.poly)
        if self.kappa:
            k = "" if self.kappa == 1 else f"{scalar_str(abs(self.kappa))}*"
            s += f" {'+' if self.kappa > 0 else '-'} {k}{tn}^2*log({tn})"
        return s


def prepotential_from_third(lower: dict, chart, log_convention: str = "antiderivative") -> Prepotential:
    """Integrate ``d_i d_j d_k F = lower[(i, j, k)]``.

    Only the component with every index equal to the last coordinate may
    carry a ``2 kappa / t_n`` term; it integrates to ``kappa t_n^2 log t_n``.
    The polynomial part has no terms of degree two or less; the
    ``antiderivative`` convention then adds ``-(3/2) kappa t_n^2``.
    """
    if log_convention not in LOG_CONVENTIONS:
        raise ValueError(f"unknown log convention {log_convention!r}")
    n = chart.dim
    last = n - 1
    co = chart.coords
    low = {}
    kappa = mpq(0)
    for idx in product(range(n), repeat=3):
        v = RatFun.lift(lower.get(idx, RatFun.zero(chart)), chart)
        if not v.is_polynomial():
            if idx != (last, last, last):
                raise IntegrabilityError(f"component {idx} is not polynomial")
            part = LogLaurent.from_ratfun(v)
            sing = {k: c for k, c in part.terms.items() if k[0][last] < 0}
            tail = [0] * chart.nvars
            tail[last] = -1
            if set(sing) != {(tuple(tail), 0)}:
                raise IntegrabilityError("the singular part is not a multiple of 1/t_n")
            kappa = sing[(tuple(tail), 0)] / 2
            v = v - RatFun.const(chart, 2 * kappa) / RatFun.var(chart, co[last])
        low[idx] = v.as_poly()
    for i, j, k in product(range(n), repeat=3):
        if low[(i, j, k)] != low[(j, i, k)] or low[(i, j, k)] != low[(i, k, j)]:
            raise IntegrabilityError("third derivatives are not totally symmetric")
    for m, i, j, k in product(range(n), repeat=4):
        if m < i and low[(i, j, k)].diff(co[m]) != low[(m, j, k)].diff(co[i]):
            raise IntegrabilityError("third derivatives are not closed")
    F2 = {(i, j): radial_potential([low[(i, j, k)] for k in range(n)], chart)
          for i, j in product(range(n), repeat=2)}
    F1 = [radial_potential([F2[(i, j)] for j in range(n)], chart) for i in range(n)]
    F0 = radial_potential(F1, chart)
    if log_convention == "antiderivative" and kappa:
        F0 = F0 - MultiPoly.var(chart, co[last], 2).scale(mpq(3, 2) * kappa)
    P = Prepotential(F0, kappa, log_convention)
    for idx in product(range(n), repeat=3):
        if P.third_derivative(*idx) != RatFun.lift(lower.get(idx, RatFun.zero(chart)), chart):
            raise IntegrabilityError(f"third derivatives disagree at {idx}")
    return P


def integrate_prepotential(S: FrobeniusStructure, log_convention: str = "antiderivative") -> Prepotential:
    """``F`` with ``d_i d_j d_k F = c_{ijk} = c^{n+1-i}_{jk}``."""
    n = S.n
    lower = {(i, j, k): S.c[n - 1 - i, j, k] for i, j, k in product(range(n), repeat=3)}
    return prepotential_from_third(lower, S.chart, log_convention)


def wdvv_check(F, eta: ExactMatrix | None = None) -> Report:
    """``F_{jhi} eta^{il} F_{lkm} = F_{jki} eta^{il} F_{lhm}`` for every ``(j, h, k, m)``.

    ``F`` is a :class:`Prepotential` or a polynomial on a t-chart.
    """
    if isinstance(F, MultiPoly):
        F = Prepotential(F, mpq(0), "bare")
    n = F.n
    ch = F.chart
    eta = eta or anti_identity(n)
    third = F.third_derivatives()
    pairs = [(i, l, eta[i, l]) for i, l in product(range(n), repeat=2) if eta[i, l]]

    def contract(j, h, k, m):
        acc = RatFun.zero(ch)
        for i, l, e in pairs:
            a, b = third[(j, h, i)], third[(l, k, m)]
            if a and b:
                acc = acc + a * b * e
        return acc

    rep = Report()
    bad = None
    for j, h, k, m in product(range(n), repeat=4):
        if h >= k:
            continue
        r = contract(j, h, k, m) - contract(j, k, h, m)
        if r:
            bad = {"index": [j, h, k, m], "value": r}
            break
    rep.add("wdvv", n, bad is None, bad)
    return rep


def euler_check(F: Prepotential) -> Report:
    """``E(F_ijk) = (d_F - d_i - d_j - d_k) F_ijk`` with ``E = sum d_i t_i d/dt_i``."""
    n = F.n
    ch = F.chart
    d = degrees(n)
    dF = prepotential_degree(n)
    bad = None
    for i, j, k in product(range(n), repeat=3):
        f = F.third_derivative(i, j, k)
        Ef = RatFun.zero(ch)
        for s in range(n):
            Ef = Ef + RatFun.var(ch, ch.coords[s]) * f.diff(ch.coords[s]) * d[s]
        if Ef != f * (dF - d[i] - d[j] - d[k]):
            bad = {"index": [i, j, k], "value": f}
            break
    rep = Report()
    rep.add("euler_third_derivatives", n, bad is None, bad)
    return rep
