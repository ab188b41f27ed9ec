"""Dual products built from the B_n mirror arrangement, the natural
connection of a basis of invariants, and the compatibility of the two.

The B_2 pipeline runs with parameters ``x, y`` (orbit weights), ``c`` (the
second invariant is ``p1^2 p2^2 + c u1^2``) and ``e1, e2`` (the unit in the
invariant chart).  Weight choice ``sigma_I = 0`` gives the bridge to the
intersection form ``(1 - delta_ij)/(p_i p_j)`` for n = 2, 3, 4.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from gmpy2 import mpq

from .algebra import Chart, ExactMatrix, MultiPoly, RatFun, SingularMatrix, solve_linear
from .algebra.scalar import as_scalar
from .frobenius import Prepotential, prepotential_from_third, wdvv_check
from .integrate import IntegrabilityError, radial_potential
from .invariants import InvariantBasis, p_chart, u_chart
from .pencil import cometric_p
from .report import Report
from .tensors import ChristoffelData, TensorField, dot, generic_point

ORBITS = ("I", "II")
B2_PARAMS = ("x", "y", "c", "e1", "e2")


# -- arrangement --------------------------------------------------------------

@dataclass(frozen=True)
class Mirror:
    """Hyperplane ``alpha . p = 0``; ``form`` holds the integer coefficients."""

    form: tuple
    orbit: str

    @property
    def norm2(self) -> int:
        return sum(a * a for a in self.form)

    def linear_form(self, chart: Chart) -> MultiPoly:
        out = MultiPoly.zero(chart)
        for a, v in zip(self.form, chart.coords):
            if a:
                out = out + MultiPoly.var(chart, v).scale(a)
        return out

    def projection(self) -> ExactMatrix:
        """Orthogonal projection onto the normal line."""
        a = self.form
        s = self.norm2
        return ExactMatrix([[mpq(x * y, s) for y in a] for x in a])


@dataclass
class Arrangement:
    n: int
    mirrors: list

    def orbit(self, label):
        return [m for m in self.mirrors if m.orbit == label]


def bn_arrangement(n: int) -> Arrangement:
    """``p_i = 0`` (orbit I) and ``p_i - p_j = 0``, ``p_i + p_j = 0`` (orbit II)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    mirrors = []
    for i in range(n):
        mirrors.append(Mirror(tuple(1 if k == i else 0 for k in range(n)), "I"))
    for i in range(n):
        for j in range(i + 1, n):
            for s in (-1, 1):
                mirrors.append(Mirror(tuple(1 if k == i else s if k == j else 0 for k in range(n)), "II"))
    return Arrangement(n, mirrors)


@dataclass
class WeightedProduct:
    """``* = sum_H (d alpha_H / alpha_H) sigma_H pi_H`` on a p-chart."""

    n: int
    arrangement: Arrangement
    weights: dict           # orbit label -> weight (scalar or RatFun in the parameters)
    chart: Chart
    c: TensorField          # c*^i_{jk}, indexed (i, j, k)

    def weight_sum(self) -> ExactMatrix:
        """``sum_H sigma_H pi_H``."""
        n = self.n
        acc = [[RatFun.zero(self.chart) for _ in range(n)] for _ in range(n)]
        for m in self.arrangement.mirrors:
            s = RatFun.lift(self.weights[m.orbit], self.chart)
            P = m.projection()
            for i, j in product(range(n), repeat=2):
                if P[i, j]:
                    acc[i][j] = acc[i][j] + s * P[i, j]
        return ExactMatrix(acc)

    def endomorphism(self, X) -> ExactMatrix:
        """``(X*)^i_j = c*^i_{jk} X^k``."""
        return _multiplication(self.c, X)


def _lift_weight(w, chart):
    if isinstance(w, (RatFun, MultiPoly)):
        return RatFun.lift(w, chart)
    return RatFun.const(chart, as_scalar(w))


def build_dual_product(n: int, sigma_I, sigma_II, chart: Chart | None = None) -> WeightedProduct:
    """Components ``c*^i_{jk} = sum_H sigma_H alpha_j alpha_k alpha^i / (|alpha|^2 alpha(p))``."""
    if n not in (2, 3, 4):
        raise ValueError("dual products are supported for n = 2, 3, 4")
    ch = chart or p_chart(n)
    if ch.dim != n:
        raise ValueError("chart dimension does not match n")
    weights = {"I": _lift_weight(sigma_I, ch), "II": _lift_weight(sigma_II, ch)}
    if not weights["I"] and not weights["II"]:
        raise ValueError("all weights are zero")
    A = bn_arrangement(n)
    comps = {}
    for m in A.mirrors:
        s = weights[m.orbit]
        if not s:
            continue
        base = s / (RatFun(m.linear_form(ch)) * m.norm2)
        a = m.form
        for i, j, k in product(range(n), repeat=3):
            w = a[i] * a[j] * a[k]
            if w:
                comps[(i, j, k)] = comps[(i, j, k)] + base * w if (i, j, k) in comps else base * w
    return WeightedProduct(n, A, weights, ch, TensorField(ch, 1, 2, comps))


def _multiplication(c: TensorField, X) -> ExactMatrix:
    n = c.chart.dim
    if isinstance(X, TensorField):
        Xs = [X[k] for k in range(n)]
    else:
        Xs = [_lift_weight(v, c.chart) for v in X]
    return ExactMatrix([[dot([c[i, j, k] for k in range(n)], Xs, c.chart) for j in range(n)] for i in range(n)])


def euler_vector_p(chart: Chart) -> TensorField:
    return TensorField(chart, 1, 0, {(k,): RatFun.var(chart, v) for k, v in enumerate(chart.coords)})


def verify_dual_product(W: WeightedProduct, normalized: bool = True) -> Report:
    """Commutativity, weight normalization and the Euler unit."""
    n = W.n
    rep = Report()
    comm = all(W.c[i, j, k] == W.c[i, k, j] for i, j, k in product(range(n), repeat=3) if j < k)
    rep.add("dual_commutative", n, comm)
    orbit_sizes = (len(W.arrangement.orbit("I")), len(W.arrangement.orbit("II")))
    rep.add("orbit_sizes", n, orbit_sizes == (n, n * (n - 1)), list(orbit_sizes))
    idem = all(m.projection() * m.projection() == m.projection() for m in W.arrangement.mirrors)
    rep.add("projections_idempotent", n, idem)
    if normalized:
        S = W.weight_sum()
        rep.add("weight_sum_identity", n, S == ExactMatrix.identity(n, W.chart))
        Ep = euler_vector_p(W.chart)
        M = W.endomorphism(Ep)
        rep.add("euler_unit", n, M == ExactMatrix.identity(n, W.chart))
    return rep


# -- natural connection -------------------------------------------------------

def b2_invariants(chart: Chart, c=None) -> list:
    """``u1 = p1^2 + p2^2`` and ``u2 = p1^2 p2^2 + c u1^2`` (``c`` symbolic by default)."""
    p1, p2 = (MultiPoly.var(chart, v) for v in chart.coords)
    u1 = p1 * p1 + p2 * p2
    cc = MultiPoly.var(chart, "c") if c is None else MultiPoly.const(chart, as_scalar(c))
    return [u1, p1 * p1 * p2 * p2 + cc * u1 * u1]


def b2_basis(chart: Chart, c=None) -> InvariantBasis:
    """The basis above as an :class:`InvariantBasis` over a u-chart with the same parameters."""
    polys = b2_invariants(chart, c)
    uch = u_chart(2, chart.params)
    u1, u2 = MultiPoly.var(uch, "u1"), MultiPoly.var(uch, "u2")
    cc = MultiPoly.var(uch, "c") if c is None else MultiPoly.const(uch, as_scalar(c))
    return InvariantBasis(2, uch, polys, [u1, u2 - cc * u1 * u1])


def natural_connection(invariants, chart: Chart) -> ChristoffelData:
    """Connection whose flat coordinates are ``invariants``:
    ``Gamma^l_{ij} = (du/dp)^{-1 l}_c d_i d_j u^c``."""
    n = chart.dim
    J = ExactMatrix([[RatFun.lift(u.diff(v), chart) for v in chart.coords] for u in invariants])
    try:
        Ji = J.inverse()
    except SingularMatrix:
        raise SingularMatrix("the invariants have a singular Jacobian") from None
    hess = [[[RatFun.lift(u.diff(a).diff(b), chart) for b in chart.coords] for a in chart.coords] for u in invariants]
    lower = {}
    for l, i, j in product(range(n), repeat=3):
        v = dot([Ji[l, c] for c in range(n)], [hess[c][i][j] for c in range(n)], chart)
        if v:
            lower[(l, i, j)] = v
    return ChristoffelData(chart, lower)


def inverse_jacobian(invariants, chart: Chart) -> ExactMatrix:
    """``dp^l/du^a`` as functions on the p-chart."""
    return ExactMatrix([[RatFun.lift(u.diff(v), chart) for v in chart.coords] for u in invariants]).inverse()


def vector_from_invariant_chart(invariants, comps, chart: Chart) -> TensorField:
    """p-chart components of ``sum comps[a] d/du_a``."""
    n = chart.dim
    Ji = inverse_jacobian(invariants, chart)
    cs = [_lift_weight(x, chart) for x in comps]
    return TensorField(chart, 1, 0, {(l,): dot([Ji[l, a] for a in range(n)], cs, chart) for l in range(n)})


# -- product and compatibility ---------------------------------------------------

def product_from_dual(W: WeightedProduct, e) -> TensorField:
    """``c^i_{jk} = ((e*)^{-1})^i_s c*^s_{jk}``."""
    n = W.n
    M = W.endomorphism(e)
    try:
        Mi = M.inverse()
    except SingularMatrix:
        raise SingularMatrix("e* is not invertible") from None
    comps = {}
    for i, j, k in product(range(n), repeat=3):
        if j > k:
            continue
        v = dot([Mi[i, s] for s in range(n)], [W.c[s, j, k] for s in range(n)], W.chart)
        if v:
            comps[(i, j, k)] = comps[(i, k, j)] = v
    return TensorField(W.chart, 1, 2, comps)


def covariant_derivative_product(gamma: ChristoffelData, c: TensorField) -> dict:
    """``nabla_k c^i_{jl}`` keyed ``(k, i, j, l)``."""
    ch = c.chart
    n = ch.dim
    out = {}
    for k, i, j, l in product(range(n), repeat=4):
        v = c[i, j, l].diff(ch.coords[k])
        v = v + dot([gamma[i, k, m] for m in range(n)], [c[m, j, l] for m in range(n)], ch)
        v = v - dot([gamma[m, k, j] for m in range(n)], [c[i, m, l] for m in range(n)], ch)
        v = v - dot([gamma[m, k, l] for m in range(n)], [c[i, j, m] for m in range(n)], ch)
        out[(k, i, j, l)] = v
    return out


def compatibility_residual(gamma: ChristoffelData, c: TensorField) -> TensorField:
    """``nabla_k c^i_{jl} - nabla_j c^i_{lk}`` as a (1,3) tensor keyed ``(i, j, k, l)``."""
    if gamma.chart != c.chart:
        raise ValueError("connection and product live on different charts")
    n = c.chart.dim
    nab = covariant_derivative_product(gamma, c)
    comps = {}
    for i, j, k, l in product(range(n), repeat=4):
        r = nab[(k, i, j, l)] - nab[(j, i, l, k)]
        if r:
            comps[(i, j, k, l)] = r
    return TensorField(c.chart, 1, 3, comps)


def product_in_invariant_chart(c: TensorField, invariants) -> TensorField:
    """``cu^a_{bd} = J^a_i c^i_{jk} (J^{-1})^j_b (J^{-1})^k_d`` as functions on the p-chart."""
    ch = c.chart
    n = ch.dim
    J = ExactMatrix([[RatFun.lift(u.diff(v), ch) for v in ch.coords] for u in invariants])
    Ji = J.inverse()
    comps = {}
    for a, b, d in product(range(n), repeat=3):
        if b > d:
            continue
        acc = RatFun.zero(ch)
        for i in range(n):
            if not J[a, i]:
                continue
            for j, k in product(range(n), repeat=2):
                v = c[i, j, k]
                if v and Ji[j, b] and Ji[k, d]:
                    acc = acc + J[a, i] * v * Ji[j, b] * Ji[k, d]
        if acc:
            comps[(a, b, d)] = comps[(a, d, b)] = acc
    return TensorField(ch, 1, 2, comps)


def flat_chart_residual(c: TensorField, invariants) -> TensorField:
    """Residual computed in the invariant chart, where the connection is
    trivial: ``d_k cu^i_{jl} - d_j cu^i_{lk}`` with ``d_k = (J^{-1})^m_k d/dp_m``."""
    ch = c.chart
    n = ch.dim
    cu = product_in_invariant_chart(c, invariants)
    Ji = inverse_jacobian(invariants, ch)

    def du(f, k):
        return dot([Ji[m, k] for m in range(n)], [f.diff(v) for v in ch.coords], ch)

    comps = {}
    for i, j, k, l in product(range(n), repeat=4):
        r = du(cu[i, j, l], k) - du(cu[i, l, k], j)
        if r:
            comps[(i, j, k, l)] = r
    return TensorField(ch, 1, 3, comps)


def residual_to_invariant_chart(R: TensorField, invariants, point: dict) -> dict:
    """Transform a p-chart (1,3) tensor to the invariant chart at a point."""
    ch = R.chart
    n = ch.dim
    J = ExactMatrix([[RatFun.lift(u.diff(v), ch).evaluate(point) for v in ch.coords] for u in invariants])
    Ji = J.inverse()
    vals = {k: v.evaluate(point) for k, v in R.comps.items()}
    out = {}
    for a, b, c, d in product(range(n), repeat=4):
        acc = mpq(0)
        for (i, j, k, l), v in vals.items():
            acc += J[a, i] * v * Ji[j, b] * Ji[k, c] * Ji[l, d]
        if acc:
            out[(a, b, c, d)] = acc
    return out


# -- the B_2 pipeline -------------------------------------------------------------

@dataclass
class B2Pipeline:
    """Symbolic data over the chart ``p1, p2`` with parameters ``x, y, c, e1, e2``."""

    chart: Chart
    invariants: list
    product: WeightedProduct
    gamma: ChristoffelData
    unit: TensorField
    c: TensorField


def b2_pipeline(chart: Chart | None = None) -> B2Pipeline:
    ch = chart or p_chart(2, B2_PARAMS)
    x, y = RatFun.var(ch, "x"), RatFun.var(ch, "y")
    W = build_dual_product(2, x / (x + y), y / (x + y), ch)
    us = b2_invariants(ch)
    gamma = natural_connection(us, ch)
    e = vector_from_invariant_chart(us, [RatFun.var(ch, "e1"), RatFun.var(ch, "e2")], ch)
    c = product_from_dual(W, e)
    return B2Pipeline(ch, us, W, gamma, e, c)


@dataclass
class Family:
    """Parameter specialization: ``bindings`` send the generic parameters
    to rational functions on a chart with the remaining free parameters."""

    name: str
    chart: Chart
    bindings: dict
    description: str = ""
    unit: str | None = None     # "u1" or "u2": the free unit direction, scaled to one

    def apply(self, f):
        if isinstance(f, TensorField):
            return TensorField(self.chart, f.up, f.down,
                               {k: self.apply(v) for k, v in f.comps.items()})
        if isinstance(f, ChristoffelData):
            return ChristoffelData(self.chart, {k: self.apply(v) for k, v in f.lower.items()})
        if isinstance(f, MultiPoly):
            return RatFun.lift(f, f.chart).substitute(self.bindings, self.chart).as_poly()
        return RatFun.lift(f, f.chart).substitute(self.bindings, self.chart)


def b2_families() -> list:
    """The three compatible families; units are scaled to one where free."""
    out = []
    ch = p_chart(2, ("x", "c", "e2"))
    out.append(Family("y=x,e1=0", ch, {"y": RatFun.var(ch, "x"), "e1": 0}, "equal weights", "u2"))
    ch = p_chart(2, ("y", "e1"))
    out.append(Family("c=0,x=0,e2=0", ch, {"c": 0, "x": 0, "e2": 0}, "zero weight on the coordinate axes", "u1"))
    ch = p_chart(2, ("x", "e1"))
    out.append(Family("c=-1/4,y=0,e2=0", ch, {"c": mpq(-1, 4), "y": 0, "e2": 0}, "zero weight on orbit II", "u1"))
    return out


def point_family(values: dict, name="point") -> Family:
    ch = p_chart(2)
    return Family(name, ch, {k: as_scalar(v) for k, v in values.items()})


OFF_FAMILY_WITNESS = {"x": 1, "y": 2, "c": 1, "e1": 0, "e2": 1}


def on_some_family(values: dict) -> bool:
    v = {k: as_scalar(x) for k, x in values.items()}
    return ((v["y"] == v["x"] and v["e1"] == 0)
            or (v["c"] == 0 and v["x"] == 0 and v["e2"] == 0)
            or (v["c"] == mpq(-1, 4) and v["y"] == 0 and v["e2"] == 0))


def random_parameters(rng: random.Random, size: int = 7) -> dict:
    """Random parameters off every family with ``x + y != 0`` and an invertible ``e*``."""
    while True:
        v = {k: mpq(rng.randint(-size, size), rng.randint(1, size)) for k in B2_PARAMS}
        if v["x"] + v["y"] == 0 or (v["e1"] == 0 and v["e2"] == 0) or on_some_family(v):
            continue
        return v


def specialized_residual(pipe: B2Pipeline, fam: Family) -> TensorField:
    """Substitute first, then take the residual on the family chart."""
    return compatibility_residual(fam.apply(pipe.gamma), fam.apply(pipe.c))


def verify_families(pipe: B2Pipeline, npoints: int = 5, seed: int = 0, symbolic_route: bool = True) -> Report:
    rep = Report()
    full = compatibility_residual(pipe.gamma, pipe.c) if symbolic_route else None
    for fam in b2_families():
        R = specialized_residual(pipe, fam)
        rep.add(f"residual_vanishes[{fam.name}]", 2, R.is_zero(), _first(R))
        if full is not None:
            Rf = fam.apply(full)
            rep.add(f"residual_vanishes_after_substitution[{fam.name}]", 2, Rf.is_zero(), _first(Rf))
    rng = random.Random(seed)
    pts = [dict(OFF_FAMILY_WITNESS)] + [random_parameters(rng) for _ in range(npoints)]
    for vals in pts:
        fam = point_family(vals)
        try:
            R = specialized_residual(pipe, fam)
            ok = not R.is_zero()
        except (SingularMatrix, ZeroDivisionError):
            R, ok = None, False
        rep.add("residual_nonzero_off_family", 2, ok, {k: str(v) for k, v in vals.items()})
    return rep


def tensor_consistency(pipe: B2Pipeline, values: dict, npoints: int = 3, seed: int = 0) -> Report:
    """Residual in the p-chart, transformed at points, against the residual
    computed directly in the invariant chart."""
    fam = point_family(values)
    c = fam.apply(pipe.c)
    us = [fam.apply(u) for u in pipe.invariants]
    Rp = compatibility_residual(fam.apply(pipe.gamma), c)
    Ru = flat_chart_residual(c, us)
    rng = random.Random(seed)
    rep = Report()
    for _ in range(npoints):
        pt = generic_point(2, rng)
        env = {"p1": pt[0], "p2": pt[1]}
        try:
            a = residual_to_invariant_chart(Rp, us, env)
        except (SingularMatrix, ZeroDivisionError):
            continue
        b = {k: v.evaluate(env) for k, v in Ru.comps.items()}
        b = {k: v for k, v in b.items() if v}
        rep.add("residual_tensorial", 2, a == b, {"p": [str(x) for x in pt]})
    return rep


def _first(T: TensorField):
    for k, v in sorted(T.comps.items()):
        return {"index": list(k), "value": v}
    return None


# -- dual connection and potentials ------------------------------------------------

def solve_dual_connection(gamma: ChristoffelData, c: TensorField):
    """Symmetric ``b^i_{jk}`` with ``d_j E^i + b^i_{jk} E^k = 0`` and
    ``(Gamma - b)^i_{js} c^s_{kl} = (Gamma - b)^i_{ks} c^s_{jl}``.

    Returns ``(LinearSolution, unknown index list)``."""
    ch = c.chart
    n = ch.dim
    unknowns = [(i, j, k) for i in range(n) for j in range(n) for k in range(j, n)]
    col = {}
    for u, (i, j, k) in enumerate(unknowns):
        col[(i, j, k)] = col[(i, k, j)] = u
    zero = RatFun.zero(ch)
    ps = [RatFun.var(ch, v) for v in ch.coords]
    rows, rhs = [], []
    for i, j in product(range(n), repeat=2):
        row = [zero] * len(unknowns)
        for k in range(n):
            row[col[(i, j, k)]] = row[col[(i, j, k)]] + ps[k]
        rows.append(row)
        rhs.append(RatFun.const(ch, -1 if i == j else 0))
    for i, l in product(range(n), repeat=2):
        for j in range(n):
            for k in range(j + 1, n):
                row = [zero] * len(unknowns)
                const = zero
                for s in range(n):
                    a, b = c[s, k, l], c[s, j, l]
                    if a:
                        row[col[(i, j, s)]] = row[col[(i, j, s)]] - a
                        const = const + gamma[i, j, s] * a
                    if b:
                        row[col[(i, k, s)]] = row[col[(i, k, s)]] + b
                        const = const - gamma[i, k, s] * b
                rows.append(row)
                rhs.append(-const)
    return solve_linear(rows, rhs), unknowns


def rewrite_rational(f: RatFun, basis: InvariantBasis) -> RatFun:
    """Invariant rational function of p in the basis; numerator and
    denominator are made invariant by multiplying through by the denominator."""
    f = f.reduced()
    num = basis.rewrite(f.num * f.den)
    den = basis.rewrite(f.den * f.den)
    return RatFun(num, den)


def product_on_invariant_chart(c: TensorField, basis: InvariantBasis) -> TensorField:
    """``cu`` as a tensor on the u-chart of ``basis``."""
    cu = product_in_invariant_chart(c, basis.polys)
    return TensorField(basis.chart, 1, 2, {k: rewrite_rational(v, basis) for k, v in cu.comps.items()})


def vector_potential(cu: TensorField) -> list:
    """Polynomials ``F^a`` with ``d_b d_d F^a = cu^a_{bd}``; raises if not integrable."""
    ch = cu.chart
    n = ch.dim
    polys = {}
    for k, v in cu.comps.items():
        if not v.is_polynomial():
            raise IntegrabilityError("product is not polynomial in the invariant chart")
        polys[k] = v.as_poly()
    zero = MultiPoly.zero(ch)
    out = []
    for a in range(n):
        G = [radial_potential([polys.get((a, b, d), zero) for d in range(n)], ch) for b in range(n)]
        Fa = radial_potential(G, ch)
        for b, d in product(range(n), repeat=2):
            if Fa.diff(ch.coords[b]).diff(ch.coords[d]) != polys.get((a, b, d), zero):
                raise IntegrabilityError(f"component {a + 1} has no potential")
        out.append(Fa)
    return out


def expected_vector_potential(chart: Chart) -> list:
    u1, u2, c = (MultiPoly.var(chart, v) for v in ("u1", "u2", "c"))
    F1 = u1 * u2 - (u1 ** 3) * (c.scale(8) + 1).scale(mpq(1, 12))
    F2 = -(c * (c.scale(4) + 1)).scale(mpq(1, 12)) * u1 ** 4 + (u2 * u2).scale(mpq(1, 2))
    return [F1, F2]


def metric_from_product(cu: TensorField, covector) -> ExactMatrix:
    """``eta_{jk} = covector_i cu^i_{jk}``."""
    n = cu.chart.dim
    cov = [_lift_weight(x, cu.chart) for x in covector]
    return ExactMatrix([[dot(cov, [cu[i, j, k] for i in range(n)], cu.chart)
                         for k in range(n)] for j in range(n)])


def potential_from_product(cu: TensorField, eta: ExactMatrix) -> Prepotential:
    """Prepotential ``F`` with ``d_i d_j d_k F = eta_{is} cu^s_{jk}``."""
    n = cu.chart.dim
    lower = {}
    for i, j, k in product(range(n), repeat=3):
        v = dot([RatFun.lift(eta[i, s], cu.chart) for s in range(n)], [cu[s, j, k] for s in range(n)], cu.chart)
        if v:
            lower[(i, j, k)] = v
    return prepotential_from_third(lower, cu.chart)


@dataclass
class DualResult:
    family: Family
    b: dict = field(default_factory=dict)
    b_status: str = ""
    cu: TensorField | None = None
    vector_potential: list | None = None
    prepotential: Prepotential | None = None
    eta: ExactMatrix | None = None

    @property
    def branch(self):
        """``defocusing`` or ``focusing`` from the sign of the log term."""
        if self.prepotential is None or not self.prepotential.kappa:
            return None
        return "defocusing" if self.prepotential.kappa > 0 else "focusing"


def dual_connection_and_potential(fam: Family, pipe: B2Pipeline | None = None) -> tuple:
    """Dual connection ``b`` and potentials of a compatible specialization.

    With unit ``d/du2`` the product in the invariant chart is integrated to a
    vector potential.  With unit ``d/du1`` the metric ``eta = (du2)(X o Y)``
    must be the anti-identity and a prepotential is integrated."""
    pipe = pipe or b2_pipeline()
    if fam.unit not in ("u1", "u2"):
        raise ValueError("the family needs a unit direction u1 or u2")
    free = "e1" if fam.unit == "u1" else "e2"
    if free not in fam.chart.params:
        raise ValueError(f"the unit component {free} must stay a free parameter")
    n = 2
    rep = Report()
    gamma = fam.apply(pipe.gamma)
    c = fam.apply(pipe.c)
    if not compatibility_residual(gamma, c).is_zero():
        raise ValueError(f"family {fam.name} is not compatible")
    res = DualResult(fam)
    sol, unknowns = solve_dual_connection(gamma, c)
    res.b_status = sol.status
    if sol.status == "unique":
        for (i, j, k), v in zip(unknowns, sol.particular):
            res.b[(i, j, k)] = res.b[(i, k, j)] = v
    rep.add(f"dual_connection_unique[{fam.name}]", n, sol.status == "unique", sol.status)
    ch = fam.chart
    cval = fam.bindings.get("c")
    basis = b2_basis(ch, cval)
    cu = product_on_invariant_chart(c, basis).partial_evaluate({free: 1})
    res.cu = cu
    if fam.unit == "u2":
        try:
            res.vector_potential = vector_potential(cu)
            rep.add(f"vector_potential_exists[{fam.name}]", n, True)
        except IntegrabilityError as exc:
            rep.add(f"vector_potential_exists[{fam.name}]", n, False, str(exc))
    else:
        eta = metric_from_product(cu, [0, 1])
        res.eta = eta
        anti = ExactMatrix([[0, 1], [1, 0]])
        const = all(eta[i, j].is_constant() for i, j in product(range(2), repeat=2))
        ok = const and eta.map(lambda v: v.constant_value()) == anti
        rep.add(f"eta_anti_identity[{fam.name}]", n, ok)
        if ok:
            try:
                res.prepotential = potential_from_product(cu, anti)
                rep.add(f"prepotential_exists[{fam.name}]", n, True)
                for chk in wdvv_check(res.prepotential, anti).checks:
                    rep.add(f"{chk.check}[{fam.name}]", n, chk.passed, chk.witness)
            except IntegrabilityError as exc:
                rep.add(f"prepotential_exists[{fam.name}]", n, False, str(exc))
    return res, rep


def expected_family_prepotential(sign: int):
    """``1/2 u1^2 u2 + sign * 1/2 u2^2 (log u2 - 3/2)`` as (polynomial part, log coefficient)."""
    uch = u_chart(2)
    u1, u2 = MultiPoly.var(uch, "u1"), MultiPoly.var(uch, "u2")
    poly = (u1 * u1 * u2).scale(mpq(1, 2)) - (u2 * u2).scale(mpq(3, 4) * sign)
    return poly, mpq(sign, 2)


def verify_dual(pipe: B2Pipeline | None = None, npoints: int = 5, seed: int = 0) -> Report:
    """The whole B_2 pipeline: products, families, falsification, connections and potentials."""
    pipe = pipe or b2_pipeline()
    rep = Report()
    rep.extend(verify_dual_product(pipe.product))
    rep.add("connection_torsion_free", 2, pipe.gamma.is_torsion_free())
    unit_ok = all(pipe.c[i, j, k] == pipe.c[i, k, j] for i, j, k in product(range(2), repeat=3))
    e_mult = _multiplication(pipe.c, pipe.unit)
    rep.add("product_commutative", 2, unit_ok)
    rep.add("product_unit", 2, e_mult == ExactMatrix.identity(2, pipe.chart))
    rep.extend(verify_families(pipe, npoints, seed))
    rep.extend(tensor_consistency(pipe, OFF_FAMILY_WITNESS, seed=seed))
    fams = b2_families()
    res, r = dual_connection_and_potential(fams[0], pipe)
    rep.extend(r)
    uch = u_chart(2, ("c",))
    got = [f.embed(uch) for f in res.vector_potential] if res.vector_potential else None
    rep.add("vector_potential", 2, got == expected_vector_potential(uch),
            [str(f) for f in res.vector_potential or []])
    cs = fams[0].apply(pipe.product.c)
    at = {"c": mpq(-1, 8)}
    neg = bool(res.b) and all(res.b.get(k, RatFun.zero(fams[0].chart)).partial_evaluate(at)
                              == -cs[k].partial_evaluate(at) for k in product(range(2), repeat=3))
    rep.add("b_equals_minus_cstar_at_c=-1/8", 2, neg)
    for fam, sign in ((fams[1], 1), (fams[2], -1)):
        res, r = dual_connection_and_potential(fam, pipe)
        rep.extend(r)
        F = res.prepotential
        poly, kappa = expected_family_prepotential(sign)
        ok = F is not None and F.kappa == kappa and F.poly.embed(poly.chart) == poly
        rep.add(f"family_prepotential[{fam.name}]", 2, ok, str(F) if F is not None else None)
    return rep


def weights_from_cli(a, b, n: int):
    """``--weights a,b`` lists the weight of orbit II, then of orbit I; the pair is
    normalized so that ``sum_H sigma_H pi_H = Id``."""
    a, b = as_scalar(a), as_scalar(b)
    total = b + (n - 1) * a
    if total == 0:
        raise ValueError("weights cannot be normalized (orbit sum vanishes)")
    return b / total, a / total


def matching_family_c(x, y):
    """Value of ``c`` of the family with these weights, or ``None`` if ``c`` stays free."""
    x, y = as_scalar(x), as_scalar(y)
    if x == y:
        return None
    if x == 0:
        return mpq(0)
    if y == 0:
        return mpq(-1, 4)
    return None


def dual_summary(sigma_I, sigma_II, c=None, pipe: B2Pipeline | None = None) -> tuple:
    """B_2 data for fixed weights (and optionally fixed ``c``).

    Returns ``(data, report)``: c*, Gamma, the product at unit ``d/du2`` and
    ``d/du1``, which units are compatible, and the connection and potentials
    of the first compatible one."""
    pipe = pipe or b2_pipeline()
    free_c = c is None
    params = (("c",) if free_c else ())
    base = {"x": as_scalar(sigma_I), "y": as_scalar(sigma_II)}
    if not free_c:
        base["c"] = as_scalar(c)
    data = {"weights": {"I": base["x"], "II": base["y"]}, "c": "free" if free_c else base["c"]}
    ch = p_chart(2, params)
    fixed = Family("weights", ch, base)
    data["cstar"] = fixed.apply(pipe.product.c)
    data["gamma"] = fixed.apply(pipe.gamma)
    rep = Report()
    data["compatible_units"] = []
    data["products"] = {}
    data["results"] = {}
    for unit, zero, free in (("u2", "e1", "e2"), ("u1", "e2", "e1")):
        fch = p_chart(2, params + (free,))
        fam = Family(f"unit d/d{unit}", fch, dict(base, **{zero: 0}), unit=unit)
        c_unit = fam.apply(pipe.c).partial_evaluate({free: 1})
        data["products"][unit] = c_unit
        R = specialized_residual(pipe, fam)
        data.setdefault("residuals", {})[unit] = R
        if R.is_zero():
            data["compatible_units"].append(unit)
            res, r = dual_connection_and_potential(fam, pipe)
            rep.extend(r)
            data["results"][unit] = res
    rep.add("compatible_unit_exists", 2, bool(data["compatible_units"]), data["compatible_units"])
    return data, rep


# -- bridge to the intersection form -----------------------------------------------

def covariant_intersection_form(n: int, chart: Chart | None = None) -> TensorField:
    """``g_ij = (1/(n-1) - delta_ij) p_i p_j``."""
    ch = chart or p_chart(n)
    ps = [MultiPoly.var(ch, v) for v in ch.coords]
    return TensorField(ch, 0, 2, {(i, j): (ps[i] * ps[j]).scale(mpq(1, n - 1) - (1 if i == j else 0))
                                  for i in range(n) for j in range(n)})


def bridge_check(n: int) -> Report:
    """Weight choice ``sigma_I = 0`` against the intersection form."""
    rep = Report()
    W = build_dual_product(n, 0, mpq(1, n - 1))
    rep.extend(verify_dual_product(W))
    g = covariant_intersection_form(n, W.chart)
    ch = W.chart
    # g(X*Y, Z) = g(X, Y*Z)
    inv = True
    for l, j, k in product(range(n), repeat=3):
        a = dot([g[l, s] for s in range(n)], [W.c[s, j, k] for s in range(n)], ch)
        b = dot([g[j, s] for s in range(n)], [W.c[s, l, k] for s in range(n)], ch)
        if a != b:
            inv = False
            break
    rep.add("intersection_form_invariant", n, inv)
    theta = [dot([g[k, l] for l in range(n)], [RatFun.var(ch, v) for v in ch.coords], ch) for k in range(n)]
    counit = all(dot(theta, [W.c[l, i, j] for l in range(n)], ch) == g[i, j] for i, j in product(range(n), repeat=2))
    rep.add("intersection_form_from_counit", n, counit)
    G = cometric_p(n)
    rep.add("intersection_form_inverse", n, g.matrix() * G.matrix() == ExactMatrix.identity(n, ch))
    return rep


__all__ = [
    "Mirror", "Arrangement", "bn_arrangement", "WeightedProduct", "build_dual_product",
    "verify_dual_product", "euler_vector_p", "b2_invariants", "b2_basis", "natural_connection",
    "vector_from_invariant_chart", "product_from_dual", "compatibility_residual",
    "covariant_derivative_product", "product_in_invariant_chart", "flat_chart_residual",
    "B2Pipeline", "b2_pipeline", "Family", "b2_families", "point_family", "random_parameters",
    "verify_families", "tensor_consistency", "solve_dual_connection", "vector_potential",
    "expected_vector_potential", "dual_connection_and_potential", "expected_family_prepotential",
    "covariant_intersection_form", "bridge_check", "OFF_FAMILY_WITNESS", "DualResult",
    "verify_dual", "weights_from_cli", "matching_family_c", "dual_summary",
]
