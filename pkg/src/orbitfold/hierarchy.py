"""Principal hierarchy of a Frobenius structure: the vector fields
``X_(alpha)`` with ``d_j X^i_(alpha) = c^i_{jk} X^k_(alpha-1)`` and the
dispersionless flows ``t^i_T = c^i_{jk} X^j_(alpha) t^k_x``."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .algebra import Chart, MultiPoly, RatFun
from .integrate import IntegrabilityError, LogLaurent, sequential_potential
from .report import Report


def _structure(S):
    """``c^i_{jk}`` as log-Laurent expressions keyed ``(i, j, k)``."""
    return {k: LogLaurent.from_ratfun(v) for k, v in S.c.comps.items()}


def _unit(S) -> list:
    ch = S.chart
    return [LogLaurent.lift(S.e[k], ch) for k in range(S.n)]


def hierarchy_vectors(S, depth: int, report: Report | None = None) -> list:
    """``[X_(0), ..., X_(depth)]`` with ``X_(0) = e``.

    Each level is integrated without additive constants; closedness of the
    right-hand side is checked at every level."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    n = S.n
    ch = S.chart
    c = _structure(S)
    zero = LogLaurent.zero(ch)
    levels = [_unit(S)]
    for alpha in range(1, depth + 1):
        prev = levels[-1]
        X = []
        for i in range(n):
            omega = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    cijk = c.get((i, j, k))
                    if cijk is not None and prev[k]:
                        acc = acc + cijk * prev[k]
                omega.append(acc)
            closed = all(omega[j].diff(ch.coords[l]) == omega[l].diff(ch.coords[j])
                         for j in range(n) for l in range(j + 1, n))
            if report is not None:
                report.add(f"recursion_closed[level {alpha}, component {i + 1}]", n, closed)
            if not closed:
                raise IntegrabilityError(f"recursion at level {alpha} is not closed in component {i + 1}")
            X.append(sequential_potential(omega, ch))
        levels.append(X)
    return levels


@dataclass
class FlowExpression:
    """``t^i_T = sum_k A^i_k (t^k)_x``; ``coeffs[i][k]`` is ``A^i_k``."""

    level: int
    chart: Chart
    coeffs: list

    @property
    def n(self):
        return len(self.coeffs)

    def coefficient(self, i, k) -> LogLaurent:
        return self.coeffs[i][k]

    def is_log_free(self) -> bool:
        return not any(a.has_log() for row in self.coeffs for a in row)

    def rational_coeffs(self) -> list:
        return [[a.to_ratfun() for a in row] for row in self.coeffs]

    def component_str(self, i) -> str:
        co = self.chart.coords
        parts = []
        for k, a in enumerate(self.coeffs[i]):
            if not a:
                continue
            s = str(a)
            dx = f"{co[k]}_x"
            if s == "1":
                parts.append(dx)
            elif s == "-1":
                parts.append(f"-{dx}")
            elif len(a.terms) == 1:
                parts.append(f"{s}*{dx}")
            else:
                parts.append(f"({s})*{dx}")
        rhs = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{co[i]}_T{self.level} = {rhs}"

    def __str__(self):
        return "\n".join(self.component_str(i) for i in range(self.n))

    def to_json(self):
        return {"level": self.level,
                "components": [{f"{self.chart.coords[k]}_x": str(a) for k, a in enumerate(row) if a}
                               for row in self.coeffs],
                "text": [self.component_str(i) for i in range(self.n)]}


def flows(S, alpha: int, vectors: list | None = None) -> FlowExpression:
    """``A^i_k = c^i_{jk} X^j_(alpha)``."""
    vectors = vectors if vectors is not None and len(vectors) > alpha else hierarchy_vectors(S, alpha)
    n = S.n
    c = _structure(S)
    X = vectors[alpha]
    zero = LogLaurent.zero(S.chart)
    coeffs = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = zero
            for j in range(n):
                cijk = c.get((i, j, k))
                if cijk is not None and X[j]:
                    acc = acc + cijk * X[j]
            row.append(acc)
        coeffs.append(row)
    return FlowExpression(alpha, S.chart, coeffs)


# -- checks ------------------------------------------------------------------------

def degree_check(S, flow: FlowExpression) -> Report:
    """``A^i_k`` is homogeneous of degree ``alpha + d_i - d_k``, degrees measured
    in units of the weight of the unit coordinate (``t_1`` for n = 2)."""
    n = S.n
    ch = S.chart
    (u,), = S.e.comps
    w1 = ch.weights[u]
    rep = Report()
    bad = None
    if not flow.is_log_free():
        rep.add(f"flow_degrees[level {flow.level}]", n, False, "coefficients contain log terms")
        return rep
    for i, k in product(range(n), repeat=2):
        a = flow.coefficient(i, k)
        if not a:
            continue
        target = flow.level + (ch.weights[i] - ch.weights[k]) / w1
        degs = {sum(w * x for w, x in zip(ch.weights, e[:n])) / w1 for (e, _) in a.terms}
        if degs != {target}:
            bad = {"index": [i, k], "degrees": sorted(str(d) for d in degs), "expected": str(target)}
            break
    rep.add(f"flow_degrees[level {flow.level}]", n, bad is None, bad)
    return rep


def jet_chart(ch: Chart, order: int = 2) -> Chart:
    """Coordinates ``t_i`` and formal derivatives ``t_i_x``, ``t_i_xx``, ..."""
    coords = list(ch.coords)
    weights = list(ch.weights)
    for m in range(1, order + 1):
        coords += [f"{v}_{'x' * m}" for v in ch.coords]
        weights += list(ch.weights)
    return Chart(f"jet{order}({ch.name})", tuple(coords), tuple(weights), ch.params)


def _jet_name(v, m):
    return v if m == 0 else f"{v}_{'x' * m}"


def total_x_derivative(f: RatFun, base: Chart, jet: Chart, order: int) -> RatFun:
    """``D_x f`` for ``f`` involving jets below ``order``."""
    out = RatFun.zero(jet)
    for m in range(order):
        for v in base.coords:
            d = f.diff(_jet_name(v, m))
            if d:
                out = out + d * RatFun.var(jet, _jet_name(v, m + 1))
    return out


def evolutionary_derivative(f: RatFun, K: list, base: Chart, jet: Chart, order: int) -> RatFun:
    """Derivative of ``f`` along the flow ``t_T = K`` (``f`` first order in jets)."""
    Dx = [K]
    Dx.append([total_x_derivative(k, base, jet, order) for k in K])
    out = RatFun.zero(jet)
    for m in range(2):
        for i, v in enumerate(base.coords):
            d = f.diff(_jet_name(v, m))
            if d:
                out = out + d * Dx[m][i]
    return out


def flow_on_jets(flow: FlowExpression, jet: Chart) -> list:
    if not flow.is_log_free():
        raise ValueError("log terms in flow coefficients")
    A = flow.rational_coeffs()
    ch = flow.chart
    out = []
    for i in range(flow.n):
        acc = RatFun.zero(jet)
        for k in range(flow.n):
            if A[i][k]:
                acc = acc + A[i][k].embed(jet) * RatFun.var(jet, _jet_name(ch.coords[k], 1))
        out.append(acc)
    return out


def commutation_check(S, max_level: int = 2) -> Report:
    """``d_T d_S t = d_S d_T t`` for every pair of levels up to ``max_level``."""
    n = S.n
    vec = hierarchy_vectors(S, max_level)
    fl = [flows(S, a, vec) for a in range(max_level + 1)]
    jet = jet_chart(S.chart, 2)
    K = [flow_on_jets(f, jet) for f in fl]
    rep = Report()
    for a in range(max_level + 1):
        for b in range(a + 1, max_level + 1):
            ok = all(evolutionary_derivative(K[a][i], K[b], S.chart, jet, 2)
                     == evolutionary_derivative(K[b][i], K[a], S.chart, jet, 2) for i in range(n))
            rep.add(f"flows_commute[{a},{b}]", n, ok)
    return rep


def nls_flow_expected(chart: Chart) -> list:
    """``t1_T = t1 t1_x + t2_x``, ``t2_T = t2 t1_x + t1 t2_x``, as coefficient rows."""
    t1, t2 = (LogLaurent.from_poly(MultiPoly.var(chart, v)) for v in chart.coords)
    one = LogLaurent.from_poly(MultiPoly.one(chart))
    return [[t1, one], [t2, t1]]


def verify_hierarchy(S, depth: int = 2) -> Report:
    n = S.n
    rep = Report()
    vec = hierarchy_vectors(S, depth, rep)
    rep.add("level0_is_unit", n, vec[0] == _unit(S))
    ch = S.chart
    t = [LogLaurent.from_poly(MultiPoly.var(ch, v)) for v in ch.coords]
    f0 = flows(S, 0, vec)
    ident = all(f0.coefficient(i, k) == (LogLaurent.from_poly(MultiPoly.one(ch)) if i == k else LogLaurent.zero(ch))
                for i, k in product(range(n), repeat=2))
    rep.add("level0_transport", n, ident)
    if depth >= 1:
        rep.add("level1_vector_is_t", n, vec[1] == t)
    for a in range(1, min(depth, 2) + 1):
        rep.extend(degree_check(S, flows(S, a, vec)))
    if n == 2 and depth >= 1:
        rep.add("nls_flow", n, flows(S, 1, vec).coeffs == nls_flow_expected(ch))
    if depth >= 1:
        rep.extend(commutation_check(S, min(depth, 2)))
    return rep


__all__ = [
    "hierarchy_vectors", "FlowExpression", "flows", "degree_check", "commutation_check",
    "jet_chart", "total_x_derivative", "evolutionary_derivative", "nls_flow_expected",
    "verify_hierarchy",
]
