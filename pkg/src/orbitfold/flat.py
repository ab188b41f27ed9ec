"""Flat coordinates of the Saito metric and chart changes u <-> t."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from gmpy2 import mpq

from .algebra import ExactMatrix, MultiPoly, RatFun, rational_sqrt
from .algebra.poly import monomials_of_weight
from .ansatz import combine, solve_ansatz
from .invariants import elementary_invariants, p_chart, t_chart, u_chart
from .pencil import PencilData, tau_potential
from .report import Report
from .tensors import TensorField, dot


class NormalizationError(ValueError):
    """The anti-identity normalization needs an irrational scale."""

    def __init__(self, index, entry):
        super().__init__(f"coordinate t{index + 1} needs scale 1/sqrt({entry}), which is irrational")
        self.index = index
        self.entry = entry


class FlatSolveError(ArithmeticError):
    """The flat-coordinate system has no solution of the expected shape."""


@dataclass
class FlatChart:
    n: int
    t_polys: list      # t_k as polynomials on the u-chart
    u_polys: list      # u_k as polynomials on the t-chart
    eta_t: ExactMatrix
    scales: list       # factor applied to the monic solution of each t_k

    @property
    def uchart(self):
        return self.t_polys[0].chart

    @property
    def tchart(self):
        return self.u_polys[0].chart

    def jacobian_t_u(self):
        """``dt_i/du_a`` on the u-chart."""
        ch = self.uchart
        return [[t.diff(v) for v in ch.coords] for t in self.t_polys]

    def jacobian_u_t(self):
        """``du_a/dt_b`` on the t-chart."""
        ch = self.tchart
        return [[u.diff(v) for v in ch.coords] for u in self.u_polys]

    def to_t(self, f):
        """Rewrite a u-chart polynomial or rational function in t."""
        bind = {f"u{k + 1}": self.u_polys[k] for k in range(self.n)}
        if isinstance(f, MultiPoly):
            return f.compose(bind, self.tchart)
        return RatFun.lift(f, self.uchart).substitute(bind, self.tchart)

    def to_u(self, f):
        bind = {f"t{k + 1}": self.t_polys[k] for k in range(self.n)}
        if isinstance(f, MultiPoly):
            return f.compose(bind, self.uchart)
        return RatFun.lift(f, self.tchart).substitute(bind, self.uchart)


def _pfaffian_operator(P: PencilData):
    """``f -> [eta^{ai} d_i d_j f + a^{ak}_j d_k f]`` over all ``(a, j)``."""
    n = P.n
    ch = P.chart
    eta = {k: v.as_poly() for k, v in P.eta_u.comps.items()}
    gam = {k: v.as_poly() for k, v in P.gamma_eta.items()}
    zero = MultiPoly.zero(ch)

    def op(f):
        grad = [f.diff(v) for v in ch.coords]
        hess = [[g.diff(v) for v in ch.coords] for g in grad]
        out = []
        for a, j in product(range(n), repeat=2):
            acc = zero
            for i in range(n):
                e = eta.get((a, i))
                if e is not None and hess[i][j]:
                    acc = acc + e * hess[i][j]
            for k in range(n):
                c = gam.get((a, k, j))
                if c is not None and grad[k]:
                    acc = acc + c * grad[k]
            out.append(acc)
        return out

    return op


def _gram(P: PencilData, polys) -> ExactMatrix:
    """``eta^{ab} d_a t_i d_b t_j``; must be constant."""
    n = P.n
    ch = P.chart
    grads = [[RatFun.lift(t.diff(v), ch) for v in ch.coords] for t in polys]
    rows = []
    for i in range(n):
        row = []
        left = [dot([P.eta_u[a, b] for a in range(n)], grads[i], ch) for b in range(n)]
        for j in range(n):
            v = dot(left, grads[j], ch)
            if not v.is_constant():
                raise FlatSolveError(f"eta(t) entry ({i + 1},{j + 1}) is not constant")
            row.append(v.constant_value())
        rows.append(row)
    return ExactMatrix(rows)


def flat_coordinates(P: PencilData) -> FlatChart:
    """Triangular flat coordinates ``t_k = u_k + (terms in u_1..u_{k-1})`` normalized so
    that ``eta(t)`` is the anti-identity."""
    n = P.n
    ch = P.chart
    op = _pfaffian_operator(P)
    monic = []
    for k in range(1, n + 1):
        base = MultiPoly.var(ch, f"u{k}")
        exps = [e for e in monomials_of_weight(ch.weights, 2 * k, upto=k - 1)]
        basis = [MultiPoly.monomial(ch, e) for e in exps]
        sol = solve_ansatz(base, basis, op)
        if sol.status == "inconsistent":
            raise FlatSolveError(f"no flat coordinate of degree {k}")
        if sol.status == "parametric":
            raise FlatSolveError(f"flat coordinate of degree {k} is not unique")
        monic.append(combine(base, basis, sol.particular) if basis else base)
    gram = _gram(P, monic)
    scales = [mpq(1)] * n
    for i in range(n):
        j = n - 1 - i
        if i < j:
            scales[j] = 1 / gram[i, j]
        elif i == j:
            r = rational_sqrt(gram[i, i])
            if r is None:
                raise NormalizationError(i, gram[i, i])
            scales[i] = 1 / r
    ts = [t.scale(s) for t, s in zip(monic, scales)]
    eta_t = _gram(P, ts)
    tch = t_chart(n, ch.params)
    us = []
    tvars = [MultiPoly.var(tch, f"t{k}") for k in range(1, n + 1)]
    for k in range(n):
        # t_k = s_k (u_k + lower(u_1..u_{k-1}))
        lower = monic[k] - MultiPoly.var(ch, f"u{k + 1}")
        bind = {f"u{j + 1}": us[j] for j in range(k)}
        lower_t = lower.compose(bind, tch) if lower else MultiPoly.zero(tch)
        us.append(tvars[k].scale(1 / scales[k]) - lower_t)
    return FlatChart(n, ts, us, eta_t, scales)


def anti_identity(n: int) -> ExactMatrix:
    return ExactMatrix([[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)])


def to_flat_chart(T: TensorField, F: FlatChart) -> TensorField:
    """Change a u-chart tensor to the t-chart."""
    n = F.n
    if T.chart != F.uchart:
        raise ValueError("tensor must live on the u-chart of the flat chart")
    uch = F.uchart
    dt = [[RatFun.lift(x, uch) for x in row] for row in F.jacobian_t_u()]
    tch = F.tchart
    du = [[RatFun.lift(x, tch) for x in row] for row in F.jacobian_u_t()]
    up, down = T.up, T.down
    # contravariant slots with dt/du on the u-chart
    comps = dict(T.comps)
    for slot in range(up):
        new = {}
        for idx, v in comps.items():
            a = idx[slot]
            for i in range(n):
                w = dt[i][a]
                if w:
                    key = idx[:slot] + (i,) + idx[slot + 1:]
                    new[key] = new[key] + v * w if key in new else v * w
        comps = new
    comps = {k: F.to_t(v) for k, v in comps.items() if v}
    for slot in range(up, up + down):
        new = {}
        for idx, v in comps.items():
            a = idx[slot]
            for b in range(n):
                w = du[a][b]
                if w:
                    key = idx[:slot] + (b,) + idx[slot + 1:]
                    new[key] = new[key] + v * w if key in new else v * w
        comps = new
    return TensorField(tch, up, down, comps)


def transform_contravariant_christoffel(g_u: TensorField, gamma_u: dict, F: FlatChart) -> dict:
    """``Gamma^{fd}_b(t) = [g^{ki} d_k t_f d_i d_j t_d + d_k t_f d_l t_d Gamma^{kl}_j(u)] du_j/dt_b``."""
    n = F.n
    uch = F.uchart
    tch = F.tchart
    tp = F.t_polys
    dt = [[RatFun.lift(t.diff(v), uch) for v in uch.coords] for t in tp]
    ddt = [[[RatFun.lift(t.diff(v).diff(w), uch) for w in uch.coords] for v in uch.coords] for t in tp]
    du = [[RatFun.lift(x, tch) for x in row] for row in F.jacobian_u_t()]
    zero = RatFun.zero(uch)
    out = {}
    for f, d in product(range(n), repeat=2):
        # g^{ki} d_k t_f, reused for every j
        gk = [dot([g_u[k, i] for k in range(n)], dt[f], uch) for i in range(n)]
        omega = []
        for j in range(n):
            v = dot(gk, [ddt[d][i][j] for i in range(n)], uch)
            for k, l in product(range(n), repeat=2):
                c = gamma_u.get((k, l, j))
                if c is not None and dt[f][k] and dt[d][l]:
                    v = v + dt[f][k] * dt[d][l] * c
            omega.append(F.to_t(v) if v else RatFun.zero(tch))
        for b in range(n):
            val = dot(omega, [du[j][b] for j in range(n)], tch)
            if val:
                out[(f, d, b)] = val
    return out


def verify_flat_chart(P: PencilData, F: FlatChart) -> Report:
    n = P.n
    rep = Report()
    rep.add("eta_t_anti_identity", n, F.eta_t == anti_identity(n))
    rep.add("eta_tensor_to_t", n, to_flat_chart(P.eta_u, F) == TensorField.from_matrix(F.tchart, anti_identity(n)))
    uch = F.uchart
    homogeneous = all(t.is_homogeneous() and t.weighted_degree() == 2 * (k + 1) for k, t in enumerate(F.t_polys))
    rep.add("t_homogeneous", n, homogeneous)
    tri = all(not (t - MultiPoly.var(uch, f"u{k + 1}").scale(F.scales[k])).variables_used()
              & {f"u{j}" for j in range(k + 1, n + 1)} for k, t in enumerate(F.t_polys))
    rep.add("t_triangular", n, tri)
    pch = p_chart(n)
    us = elementary_invariants(n, pch)
    bind = {f"u{i + 1}": us[i] for i in range(n)}
    degp = all(t.compose(bind, pch).is_homogeneous() and t.compose(bind, pch).degree() == 2 * (k + 1)
               for k, t in enumerate(F.t_polys))
    rep.add("t_invariant_p_degree", n, degp)
    t1, tn = F.t_polys[0], F.t_polys[-1]
    u1, un = MultiPoly.var(uch, "u1"), MultiPoly.var(uch, f"u{n}")
    rep.add("t1_proportional_u1", n, _proportional(t1, u1))
    rep.add("tn_proportional_un", n, _proportional(tn, un))
    if P.normalization in ("raw", "saito"):
        rep.add("tau_flat", n, _proportional(F.t_polys[1], tau_potential(n, P.normalization)))
    g_t = to_flat_chart(P.g_u, F)
    ok = g_t[0, 0].is_constant() and g_t[0, 0].constant_value() == (n if P.normalization == "saito" else 4 * n * (n - 1))
    rep.add("g11_t", n, ok, None if ok else g_t[0, 0])
    # the unit field keeps its form
    e = TensorField(uch, 1, 0, {(n - 2,): 1})
    e_t = to_flat_chart(e, F)
    rep.add("unit_field_t", n, e_t == TensorField(F.tchart, 1, 0, {(n - 2,): 1 / F.scales[n - 2]}))
    # round-trip of the coordinate maps
    rt = all(F.to_u(F.to_t(MultiPoly.var(uch, f"u{k + 1}"))) == MultiPoly.var(uch, f"u{k + 1}") for k in range(n))
    rep.add("inverse_map", n, rt)
    return rep


def _proportional(a: MultiPoly, b: MultiPoly) -> bool:
    if not a or not b:
        return not a and not b
    ka, ca = a.leading_term()
    kb, cb = b.leading_term()
    return a.scale(cb) == b.scale(ca)
