"""The pencil of the cometric ``g^{ij}(p) = (1 - delta_ij)/(p_i p_j)`` and the
Saito metric obtained by differentiating it along ``u_{n-1}``.

Everything lives on the u-chart of elementary invariants of ``p_i^2``.
Two normalizations are offered: ``raw`` keeps the cometric as is, and
``saito`` divides it by ``4(n-1)`` so that ``g^{11}(u) = n``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from gmpy2 import mpq

from .algebra import Chart, MultiPoly, RatFun
from .ansatz import combine, solve_ansatz
from .algebra.poly import monomials_of_weight
from .invariants import (InvariantBasis, elementary_invariants, p_chart, rewrite_in_u, standard_basis,
                         u_chart, u_to_p)
from .report import Report, first_nonzero
from .tensors import (TensorField, christoffel_covariant, contravariant_christoffel_from_metric,
                      contravariant_curvature, generic_point, levi_civita_residuals, lie_derivative,
                      pushforward_cometric)

NORMALIZATIONS = ("raw", "saito")
PENCIL_PARAM = "lam"


def normalization_scale(n: int, normalization: str) -> mpq:
    if normalization == "raw":
        return mpq(1)
    if normalization == "saito":
        return mpq(1, 4 * (n - 1))
    raise ValueError(f"unknown normalization {normalization!r}")


# -- p-chart data ---------------------------------------------------------------

def cometric_p(n: int) -> TensorField:
    """``g^{ij}(p) = (1 - delta_ij)/(p_i p_j)``."""
    ch = p_chart(n)
    ps = [MultiPoly.var(ch, v) for v in ch.coords]
    return TensorField(ch, 2, 0, {(i, j): RatFun(MultiPoly.one(ch), ps[i] * ps[j])
                                  for i in range(n) for j in range(n) if i != j})


def covariant_metric_p(n: int) -> TensorField:
    """The inverse of :func:`cometric_p`: ``g_ij = (1/(n-1) - delta_ij) p_i p_j``."""
    ch = p_chart(n)
    ps = [MultiPoly.var(ch, v) for v in ch.coords]
    w = mpq(1, n - 1)
    return TensorField(ch, 0, 2, {(i, j): (ps[i] * ps[j]).scale(w - (1 if i == j else 0))
                                  for i in range(n) for j in range(n)})


def expected_christoffel_p(n: int) -> dict:
    """Closed form of the Levi-Civita symbols of ``g`` in the p-chart:
    ``Gamma^i_ii = 1/p_i`` and nothing else."""
    ch = p_chart(n)
    return {(i, i, i): RatFun(MultiPoly.one(ch), MultiPoly.var(ch, ch.coords[i])) for i in range(n)}


# -- closed forms on the u-chart ----------------------------------------------------

def eta_closed_form(n: int, normalization: str = "raw") -> TensorField:
    """``eta^{ij} = 4(2n - i - j) u_{i+j-n-1}`` (1-based, ``u_0 = 1``)."""
    ch = u_chart(n)
    s = normalization_scale(n, normalization)
    comps = {}
    for i, j in product(range(1, n + 1), repeat=2):
        m = i + j - n - 1
        if m < 0 or 2 * n - i - j == 0:
            continue
        base = MultiPoly.one(ch) if m == 0 else MultiPoly.var(ch, f"u{m}")
        comps[(i - 1, j - 1)] = base.scale(4 * (2 * n - i - j) * s)
    return TensorField(ch, 2, 0, comps)


def eta_christoffel_closed_form(n: int, normalization: str = "raw") -> dict:
    """Contravariant symbols of eta: ``a^{ij}_{i+j-n-1} = 4(n-j)``."""
    ch = u_chart(n)
    s = normalization_scale(n, normalization)
    out = {}
    for i, j in product(range(1, n + 1), repeat=2):
        k = i + j - n - 1
        if 1 <= k <= n and n != j:
            out[(i - 1, j - 1, k - 1)] = RatFun.const(ch, 4 * (n - j) * s)
    return out


def _complete_homogeneous(n: int, upto: int, ch: Chart) -> list:
    """``h_k`` of the ``p_i^2`` written in ``u``: ``h_k = sum (-1)^(i-1) u_i h_{k-i}``."""
    us = [MultiPoly.var(ch, f"u{i}") for i in range(1, n + 1)]
    h = [MultiPoly.one(ch)]
    for k in range(1, upto + 1):
        acc = MultiPoly.zero(ch)
        for i in range(1, min(k, n) + 1):
            term = us[i - 1] * h[k - i]
            acc = acc + term if i % 2 else acc - term
        h.append(acc)
    return h


@lru_cache(maxsize=None)
def _christoffel_raw(n: int) -> dict:
    """Raw contravariant symbols ``Gamma^{rs}_b(u)`` as polynomials.

    The pulled-back one-form ``Gamma^{rs}_b du_b`` has ``dp_j``-coefficient
    ``8 p_j P(q_j; q_others)`` with ``q = p^2`` and ``P`` symmetric in the
    other variables.  Writing ``P = sum_a q_1^a C_a(u)`` and inverting the
    Jacobian through the dual basis gives
    ``Gamma_b = (1/2)(-1)^(b+1) sum_a C_a h_{a-b+1}``.
    """
    pch = p_chart(n)
    q = [MultiPoly.var(pch, v, 2) for v in pch.coords]

    @lru_cache(maxsize=None)
    def esym(excluded: frozenset, m: int) -> MultiPoly:
        if m < 0:
            return MultiPoly.zero(pch)
        if m == 0:
            return MultiPoly.one(pch)
        rest = [i for i in range(n) if i not in excluded]
        if m > len(rest):
            return MultiPoly.zero(pch)
        top, others = rest[0], frozenset(excluded | {rest[0]})
        return esym(others, m) + q[top] * esym(others, m - 1)

    sub = Chart(f"p{n - 1}", tuple(f"p{i}" for i in range(1, n)))
    usub = Chart(f"u{n - 1}", tuple(f"u{i}" for i in range(1, n)), tuple(2 * i for i in range(1, n)))
    shift = {f"p{i}": MultiPoly.var(sub, f"p{i - 1}") for i in range(2, n + 1)}
    aux = Chart(f"u{n}z", tuple(f"u{i}" for i in range(1, n + 1)) + ("z",),
                tuple(2 * i for i in range(1, n + 1)) + (2,))
    z = MultiPoly.var(aux, "z")
    ua = [MultiPoly.one(aux)] + [MultiPoly.var(aux, f"u{i}") for i in range(1, n + 1)]
    # e_m(q_2..q_n) = sum_l (-q_1)^l u_{m-l}
    ehat = {}
    for m in range(1, n):
        acc = MultiPoly.zero(aux)
        for l in range(m + 1):
            term = ua[m - l] * z ** l
            acc = acc + term if l % 2 == 0 else acc - term
        ehat[f"u{m}"] = acc
    uch = u_chart(n)
    h = _complete_homogeneous(n, 2 * n + 2, uch)
    out = {}
    for r, s in product(range(1, n + 1), repeat=2):
        P = MultiPoly.zero(pch)
        for i in range(1, n):
            right = esym(frozenset({0, i}), s - 2)
            if not right:
                continue
            for k in range(n):
                if k == i:
                    continue
                left = esym(frozenset({k}), r - 1)
                if left:
                    P = P + left * right
        P = P.scale(8)
        total = MultiPoly.zero(aux)
        for (e1,), part in P.coefficients_in(["p1"]).items():
            if e1 % 2:
                raise ArithmeticError("right-hand side is not even in p1")
            reduced = rewrite_in_u(part.compose(shift, sub), n - 1, usub)
            total = total + reduced.compose(ehat, aux) * z ** (e1 // 2)
        for b in range(1, n + 1):
            acc = MultiPoly.zero(uch)
            for (a,), Ca in total.coefficients_in(["z"]).items():
                k = a - b + 1
                if k >= 0:
                    acc = acc + Ca.embed(uch) * h[k]
            acc = acc.scale(mpq(1, 2) if b % 2 else mpq(-1, 2))
            if acc:
                out[(r - 1, s - 1, b - 1)] = acc
    return out


def contravariant_christoffel_u(n: int, normalization: str = "raw") -> dict:
    """``Gamma^{rs}_b(u)`` of the u-chart cometric, keyed ``(r, s, b)`` (0-based)."""
    s = normalization_scale(n, normalization)
    ch = u_chart(n)
    return {k: RatFun.lift(v.scale(s) if s != 1 else v, ch) for k, v in _christoffel_raw(n).items()}


def pullback_christoffel_residual(n: int, gamma_u: dict, point, normalization: str = "raw") -> list:
    """Compare ``sum_b Gamma^{rs}_b(u(p)) du_b/dp_j`` with the transform of the
    p-chart symbols at the point ``p``; returns mismatching ``(r, s, j)``."""
    pch = p_chart(n)
    sc = normalization_scale(n, normalization)
    us = elementary_invariants(n, pch)
    G = cometric_p(n)
    lower = christoffel_covariant(covariant_metric_p(n))
    vals = dict(zip(pch.coords, point))
    uval = {f"u{i + 1}": us[i].evaluate(vals) for i in range(n)}
    du = [[us[a].diff(v).evaluate(vals) for v in pch.coords] for a in range(n)]
    ddu = [[[us[a].diff(v).diff(w).evaluate(vals) for w in pch.coords] for v in pch.coords] for a in range(n)]
    Gv = [[G[i, j].evaluate(vals) * sc for j in range(n)] for i in range(n)]
    Lv = {k: v.evaluate(vals) for k, v in lower.lower.items()}
    # Gamma^{kl}_j(p) = -g^{ks} Gamma^l_{sj}
    Cp = {}
    for k, l, j in product(range(n), repeat=3):
        Cp[(k, l, j)] = -sum(Gv[k][s_] * Lv.get((l, s_, j), 0) for s_ in range(n))
    gam = {key: v.evaluate(uval) for key, v in gamma_u.items()}
    bad = []
    for r, s, j in product(range(n), repeat=3):
        lhs = sum(gam.get((r, s, b), 0) * du[b][j] for b in range(n))
        rhs = sum(Gv[k][i] * du[r][k] * ddu[s][i][j] for k in range(n) for i in range(n))
        rhs += sum(du[r][k] * du[s][l] * Cp[(k, l, j)] for k in range(n) for l in range(n))
        if lhs != rhs:
            bad.append((r, s, j))
    return bad


# -- the pencil --------------------------------------------------------------------------

@dataclass
class PencilData:
    n: int
    normalization: str
    g_u: TensorField
    eta_u: TensorField
    gamma_g: dict
    gamma_eta: dict
    unit_var: str

    @property
    def chart(self) -> Chart:
        return self.g_u.chart

    def pencil_chart(self) -> Chart:
        return self.chart.with_params(PENCIL_PARAM)

    def pencil(self):
        """``g - lam*eta`` and its contravariant symbols on a chart with ``lam``."""
        ch = self.pencil_chart()
        lam = RatFun.var(ch, PENCIL_PARAM)
        g = self.g_u.embed(ch) - self.eta_u.embed(ch).scale(lam)
        gam = {}
        for key in set(self.gamma_g) | set(self.gamma_eta):
            v = RatFun.zero(ch)
            if key in self.gamma_g:
                v = v + self.gamma_g[key].embed(ch)
            if key in self.gamma_eta:
                v = v - lam * self.gamma_eta[key].embed(ch)
            if v:
                gam[key] = v
        return g, gam


class PencilConsistencyError(AssertionError):
    """Two derivations of the same pencil quantity disagree."""


def build_pencil(n: int, normalization: str = "saito") -> PencilData:
    sc = normalization_scale(n, normalization)
    g_raw = pushforward_cometric(cometric_p(n), n)
    g = g_raw.scale(sc) if sc != 1 else g_raw
    unit = f"u{n - 1}"
    eta = g.map(lambda f: f.diff(unit))
    closed = eta_closed_form(n, normalization)
    if eta != closed:
        raise PencilConsistencyError("eta from differentiation disagrees with the closed form")
    gamma_g = contravariant_christoffel_u(n, normalization)
    gamma_eta = {k: v.diff(unit) for k, v in gamma_g.items()}
    gamma_eta = {k: v for k, v in gamma_eta.items() if v}
    return PencilData(n, normalization, g, closed, gamma_g, gamma_eta, unit)


def _u_point(n: int, rng: random.Random) -> dict:
    pch = p_chart(n)
    pt = generic_point(n, rng)
    vals = dict(zip(pch.coords, pt))
    return {f"u{i + 1}": u.evaluate(vals) for i, u in enumerate(elementary_invariants(n, pch))}


def _curvature_zero(g, gam, mode, n, rng, npoints):
    if mode == "symbolic":
        R = contravariant_curvature(g, gam)
        return first_nonzero(sorted(R.items()))
    for _ in range(npoints):
        pt = _u_point(n, rng)
        R = contravariant_curvature(g, gam, point=pt)
        w = first_nonzero(sorted(R.items()))
        if w is not None:
            w["point"] = {k: v for k, v in pt.items()}
            return w
    return None


def verify_flat_pencil(P: PencilData, mode: str = "symbolic", npoints: int = 10, seed: int = 0) -> Report:
    """Flatness of ``g``, ``eta`` and ``g - lam*eta`` plus the structural checks.

    ``mode="points"`` evaluates curvature at random u-images of generic
    rational p-points; ``lam`` stays symbolic in both modes.
    """
    n = P.n
    rng = random.Random(seed)
    rep = Report()
    rep.add("levi_civita_g", n, not levi_civita_residuals(P.g_u, P.gamma_g))
    rep.add("levi_civita_eta", n, not levi_civita_residuals(P.eta_u, P.gamma_eta))
    if P.normalization in NORMALIZATIONS:
        rep.add("eta_christoffel_closed_form", n,
                _dict_equal(P.gamma_eta, eta_christoffel_closed_form(n, P.normalization), P.chart))
    w = _curvature_zero(P.g_u, P.gamma_g, mode, n, rng, npoints)
    rep.add("curvature_g", n, w is None, w)
    w = _curvature_zero(P.eta_u, P.gamma_eta, mode, n, rng, npoints)
    rep.add("curvature_eta", n, w is None, w)
    lin = [(k, v) for k, v in list(P.g_u.comps.items()) + list(P.gamma_g.items())
           if not v.is_polynomial() or v.as_poly().degree_in(P.unit_var) > 1]
    rep.add("linear_in_unit_variable", n, not lin, lin[0][1] if lin else None)
    det = P.eta_u.matrix().det()
    det_ok = det.is_constant() and det.constant_value() != 0
    rep.add("det_eta_constant_nonzero", n, det_ok, None if det_ok else det)
    anti = [k for k in P.eta_u.comps if k[0] + k[1] < n - 1]
    rep.add("eta_lower_antitriangular", n, not anti)
    inv = P.eta_u.matrix().inverse()
    poly_inv = all(inv[i, j].is_polynomial() for i in range(n) for j in range(n))
    anti_inv = all(not inv[i, j] for i in range(n) for j in range(n) if i + j > n - 1)
    rep.add("eta_inverse_polynomial", n, poly_inv and anti_inv)
    g, gam = P.pencil()
    rep.add("levi_civita_pencil", n, not levi_civita_residuals(g, gam))
    if mode == "symbolic":
        R = contravariant_curvature(g, gam)
        w = first_nonzero(sorted(R.items()))
    else:
        w = None
        for _ in range(npoints):
            pt = _u_point(n, rng)
            w = first_nonzero(sorted(contravariant_curvature(g, gam, point=pt).items()))
            if w is not None:
                break
    rep.add("curvature_pencil", n, w is None, w)
    return rep


def _dict_equal(a: dict, b: dict, ch) -> bool:
    z = RatFun.zero(ch)
    return all(a.get(k, z) == b.get(k, z) for k in set(a) | set(b))


def christoffel_degree_report(P: PencilData) -> Report:
    """Each ``Gamma^{rs}_b`` is a homogeneous polynomial of p-degree
    ``2r + 2s - 2b - 4`` (1-based), below ``4n - 4``, and at most linear in
    the unit variable."""
    n = P.n
    rep = Report()
    bad = []
    for (r, s, b), v in sorted(P.gamma_g.items()):
        if not v.is_polynomial():
            bad.append(((r, s, b), "not polynomial"))
            continue
        f = v.as_poly()
        expected = 2 * (r + 1) + 2 * (s + 1) - 2 * (b + 1) - 4
        if not f.is_homogeneous() or f.weighted_degree() != expected:
            bad.append(((r, s, b), "degree"))
        elif expected >= 4 * n - 4:
            bad.append(((r, s, b), "bound"))
        elif f.degree_in(P.unit_var) > 1:
            bad.append(((r, s, b), "nonlinear"))
    rep.add("christoffel_degrees", n, not bad, [list(k) + [why] for k, why in bad[:3]] or None)
    return rep


# -- quasihomogeneity --------------------------------------------------------------------

@dataclass
class QuasiHomogeneityData:
    e: TensorField
    E: TensorField
    tau: MultiPoly
    d: mpq
    degrees: list


def tau_potential(n: int, normalization: str = "raw") -> MultiPoly:
    """``(u_2 - (n-2)/(2(n-1)) u_1^2) / (4(n-1))`` in the raw normalization."""
    ch = u_chart(n)
    u1 = MultiPoly.var(ch, "u1")
    u2 = MultiPoly.var(ch, "u2")
    raw = (u2 - (u1 * u1).scale(mpq(n - 2, 2 * (n - 1)))).scale(mpq(1, 4 * (n - 1)))
    return raw.scale(1 / normalization_scale(n, normalization))


def euler_field_u(n: int) -> TensorField:
    ch = u_chart(n)
    return TensorField.vector(ch, [MultiPoly.var(ch, f"u{k}").scale(mpq(k, n - 1)) for k in range(1, n + 1)])


def unit_field_u(n: int) -> TensorField:
    ch = u_chart(n)
    return TensorField(ch, 1, 0, {(n - 2,): 1})


def euler_from_p(n: int) -> TensorField:
    """Push ``(1/(2(n-1))) sum p_k d/dp_k`` to the u-chart."""
    pch = p_chart(n)
    us = elementary_invariants(n, pch)
    comps = []
    for u in us:
        f = MultiPoly.zero(pch)
        for v in pch.coords:
            f = f + MultiPoly.var(pch, v) * u.diff(v)
        comps.append(rewrite_in_u(f.scale(mpq(1, 2 * (n - 1))), n))
    return TensorField.vector(u_chart(n), comps)


def _contract(g: TensorField, f: MultiPoly) -> TensorField:
    ch = g.chart
    grad = [RatFun.lift(f.diff(v), ch) for v in ch.coords]
    return TensorField.vector(ch, [sum((g[i, s] * grad[s] for s in range(ch.dim)), RatFun.zero(ch))
                                   for i in range(ch.dim)])


def verify_quasihomogeneity(P: PencilData):
    n = P.n
    d = mpq(1) - mpq(2, n - 1)
    e = unit_field_u(n)
    E = euler_field_u(n)
    tau = tau_potential(n, P.normalization)
    data = QuasiHomogeneityData(e, E, tau, d, [mpq(i, n - 1) for i in range(1, n + 1)])
    rep = Report()
    rep.add("lie_e_g_equals_eta", n, lie_derivative(P.g_u, e) == P.eta_u)
    rep.add("lie_e_eta_vanishes", n, lie_derivative(P.eta_u, e).is_zero())
    rep.add("lie_E_g_homogeneous", n, lie_derivative(P.g_u, E) == P.g_u.scale(d - 1))
    rep.add("egorov_unit", n, _contract(P.eta_u, tau) == e)
    rep.add("egorov_euler", n, _contract(P.g_u, tau) == E)
    rep.add("bracket_e_E", n, lie_derivative(E, e) == e)
    rep.add("euler_from_p_chart", n, euler_from_p(n) == E)
    # E^i = g^{il} eta_{lj} e^j
    eta_cov = P.eta_u.matrix().inverse()
    ch = P.chart
    Ealt = TensorField.vector(ch, [sum((P.g_u[i, l] * eta_cov[l, n - 2] for l in range(n)), RatFun.zero(ch))
                                   for i in range(n)])
    rep.add("euler_from_pencil", n, Ealt == E)
    return data, rep


# -- generating identity --------------------------------------------------------------

def generating_identity_check(n: int, max_n: int = 8) -> Report:
    """``(1/4) sum g^{ij} x^{n-i} y^{n-j} = h'(x)h'(y) - (h'(y)h(x) - h'(x)h(y))/(x - y)``
    with ``h(x) = prod (x + p_l^2)``, as polynomials in ``p, x, y``."""
    if n > max_n:
        raise ValueError(f"n={n} exceeds the configured bound {max_n}")
    rep = Report()
    ch = p_chart(n, ("x", "y"))
    x = MultiPoly.var(ch, "x")
    y = MultiPoly.var(ch, "y")
    g = pushforward_cometric(cometric_p(n), n)
    lhs = MultiPoly.zero(ch)
    for (i, j), v in g.comps.items():
        lhs = lhs + u_to_p(v.as_poly(), n, ch) * x ** (n - 1 - i) * y ** (n - 1 - j)
    lhs = lhs.scale(mpq(1, 4))
    hx = MultiPoly.one(ch)
    hy = MultiPoly.one(ch)
    for v in ch.coords:
        pv = MultiPoly.var(ch, v, 2)
        hx = hx * (x + pv)
        hy = hy * (y + pv)
    dhx, dhy = hx.diff("x"), hy.diff("y")
    num = dhy * hx - dhx * hy
    try:
        quotient = num.divexact(x - y)
        divisible = True
    except ArithmeticError:
        quotient, divisible = None, False
    rep.add("divided_difference_polynomial", n, divisible)
    ok = divisible and lhs == dhx * dhy - quotient
    rep.add("generating_identity", n, ok)
    return rep


# -- the classical Euclidean pencil for B2 ---------------------------------------------

CLASSICAL_PARAM = "c"


def classical_basis(c=None) -> InvariantBasis:
    """``u_1 = (p_1^2 + p_2^2)/8``, ``u_2 = p_1^2 p_2^2 + c u_1^2``; symbolic ``c`` by default."""
    params = (CLASSICAL_PARAM,) if c is None else ()
    pch = p_chart(2, params)
    uch = u_chart(2, params)
    e1, e2 = elementary_invariants(2, pch)
    cp = MultiPoly.var(pch, CLASSICAL_PARAM) if c is None else MultiPoly.const(pch, c)
    cu = MultiPoly.var(uch, CLASSICAL_PARAM) if c is None else MultiPoly.const(uch, c)
    u1 = e1.scale(mpq(1, 8))
    u2 = e2 + cp * u1 * u1
    U1, U2 = MultiPoly.var(uch, "u1"), MultiPoly.var(uch, "u2")
    return InvariantBasis(2, uch, [u1, u2], [U1.scale(8), U2 - cu * U1 * U1])


def classical_pencil(c=None) -> PencilData:
    """Euclidean cometric on the B2 orbit space; the unit direction is ``u_2``."""
    basis = classical_basis(c)
    pch = basis.polys[0].chart
    G = TensorField(pch, 2, 0, {(0, 0): 1, (1, 1): 1})
    g = pushforward_cometric(G, 2, basis)
    eta = g.map(lambda f: f.diff("u2"))
    gam = contravariant_christoffel_from_metric(g)
    gam_eta = {k: v.diff("u2") for k, v in gam.items()}
    return PencilData(2, "classical", g, eta, gam, {k: v for k, v in gam_eta.items() if v}, "u2")


def eta_constancy_condition(eta: TensorField) -> list:
    """Polynomials in the chart parameters whose common zeros make eta constant."""
    ch = eta.chart
    conds = []
    for v in eta.comps.values():
        poly = v.as_poly()
        for exps, coeff in poly.coefficients_in(list(ch.coords)).items():
            if any(exps) and coeff:
                conds.append(coeff)
    return conds


def solve_constancy(eta: TensorField) -> list:
    """Rational parameter values (single-parameter charts) making eta constant."""
    import sympy

    ch = eta.chart
    if len(ch.params) != 1:
        raise ValueError("exactly one chart parameter is required")
    conds = eta_constancy_condition(eta)
    if not conds:
        return None
    c = sympy.Symbol(ch.params[0])
    polys = [sympy.Poly(sum(sympy.Rational(int(co.numerator), int(co.denominator)) * c ** e[-1]
                            for e, co in p.items()), c) for p in conds]
    common = polys[0]
    for q in polys[1:]:
        common = sympy.gcd(common, q)
    return sorted(mpq(int(r.p), int(r.q)) for r in sympy.roots(common, filter="Q"))


def classical_prepotential(c=-8) -> MultiPoly:
    """Solve ``((d_i + d_j - 2)/h) eta^{il} eta^{jk} d_l d_k F = g^{ij}`` with
    ``d = (2, 4)``, ``h = 4`` over polynomials of weighted degree ``2h + 2``."""
    P = classical_pencil(c)
    ch = P.chart
    if not all(v.is_constant() for v in P.eta_u.comps.values()):
        raise ValueError("eta is not constant for this choice of c")
    degs, h = (2, 4), 4
    basis = [MultiPoly.monomial(ch, e) for e in monomials_of_weight(ch.weights, 2 * h + 2)]
    eta = P.eta_u

    def op(F):
        out = []
        for i, j in product(range(2), repeat=2):
            acc = MultiPoly.zero(ch)
            for l, k in product(range(2), repeat=2):
                coeff = eta[i, l] * eta[j, k]
                if coeff:
                    acc = acc + F.diff(ch.coords[l]).diff(ch.coords[k]).scale(coeff.constant_value())
            out.append(acc.scale(mpq(degs[i] + degs[j] - 2, h)))
        return out

    rhs = [P.g_u[i, j].as_poly() for i, j in product(range(2), repeat=2)]
    sol = solve_ansatz(None, basis, op, rhs)
    if sol.status != "unique":
        raise ArithmeticError(f"ansatz system is {sol.status}")
    return combine(None, basis, sol.particular)


def verify_classical_pencil(c) -> Report:
    """Flat-pencil checks for the Euclidean B2 pencil plus constancy of eta."""
    P = classical_pencil(c)
    rep = verify_flat_pencil(P)
    bad = [v for v in P.eta_u.comps.values() if not v.is_constant()]
    rep.add("eta_constant", 2, not bad, bad[0] if bad else None)
    return rep
