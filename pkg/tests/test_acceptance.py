"""Acceptance criteria 1 to 12, all exact.

Each test records its outcome in ``acceptance_log.RESULTS`` and prints a
single pass/fail line; the session summary repeats the table."""

from __future__ import annotations

import itertools

import sympy as sp
from gmpy2 import mpq

from acceptance_log import RESULTS
from oracle import b2_dual_oracle, cometric_in_u, same, to_sympy
from orbitfold.algebra import MultiPoly, RatFun
from orbitfold.dual import (b2_families, b2_pipeline, dual_connection_and_potential, verify_families)
from orbitfold.flat import flat_coordinates, to_flat_chart
from orbitfold.frobenius import (christoffel_ledger, frobenius_structure, integrate_prepotential, verify_axioms,
                                 wdvv_check)
from orbitfold.hierarchy import flows, hierarchy_vectors
from orbitfold.invariants import p_chart, u_chart
from orbitfold.pencil import (build_pencil, classical_pencil, classical_prepotential, covariant_metric_p,
                              solve_constancy, tau_potential, verify_flat_pencil, verify_quasihomogeneity)
from orbitfold.tensors import christoffel_covariant


def record(k, title, ok, detail=""):
    RESULTS[k] = (title, bool(ok))
    print(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail and not ok else ""))
    assert ok, detail


def _u(ch, k):
    """``u_k`` with ``u_0 = 1`` and zero outside ``0..n``."""
    n = ch.dim
    if k == 0:
        return MultiPoly.one(ch)
    if k < 0 or k > n:
        return MultiPoly.zero(ch)
    return MultiPoly.var(ch, f"u{k}")


# 1 ----------------------------------------------------------------------------------------

def test_criterion_01_eta_closed_form():
    bad = []
    for n in range(2, 7):
        P = build_pencil(n, "raw")
        ch = P.chart
        for i, j in itertools.product(range(1, n + 1), repeat=2):
            got = P.g_u[i - 1, j - 1].diff(f"u{n - 1}")
            want = _u(ch, i + j - n - 1).scale(4 * (2 * n - i - j))
            if got != RatFun.lift(want, ch):
                bad.append((n, i, j))
    # independent route for small n: push the p-chart cometric forward in sympy
    for n in (2, 3):
        u, g = cometric_in_u(n)
        P = build_pencil(n, "raw")
        for (i, j), expr in g.items():
            if not same(P.g_u[i, j], expr):
                bad.append((n, i, j, "oracle"))
    record(1, "eta = d g/d u_{n-1} = 4(2n-i-j) u_{i+j-n-1}, n=2..6", not bad, bad[:3])


# 2 ----------------------------------------------------------------------------------------

def test_criterion_02_g11():
    vals = {}
    for n in range(2, 9):
        g11 = build_pencil(n, "raw").g_u[0, 0]
        vals[n] = g11.constant_value() if g11.is_constant() else None
    ok = all(vals[n] == 4 * (n * n - n) for n in vals)
    record(2, "g^{11}(u) = 4(n^2 - n), n=2..8", ok, vals)


# 3 ----------------------------------------------------------------------------------------

def test_criterion_03_christoffel_and_flatness():
    bad = []
    for n in range(2, 7):
        ch = p_chart(n)
        want = {(i, i, i): RatFun(MultiPoly.one(ch), MultiPoly.var(ch, ch.coords[i])) for i in range(n)}
        got = christoffel_covariant(covariant_metric_p(n)).nonzero()
        if got != want:
            bad.append((n, "christoffel"))
    for n in range(2, 7):
        mode = "symbolic" if n <= 4 else "points"
        rep = verify_flat_pencil(build_pencil(n), mode=mode, npoints=10, seed=n)
        for name in ("curvature_g", "curvature_eta", "curvature_pencil", "levi_civita_g", "levi_civita_eta",
                     "levi_civita_pencil"):
            if not rep[name].passed:
                bad.append((n, name))
    record(3, "Gamma^i_ii = 1/p_i; g, eta, g - lam*eta flat (symbolic n<=4, 10 points n=5,6)", not bad, bad)


# 4 ----------------------------------------------------------------------------------------

def test_criterion_04_degree_ledger():
    bad = []
    for n in range(2, 6):
        P = build_pencil(n)
        w = dict(zip(P.chart.coords, P.chart.weights))
        assert all(w[f"u{k}"] == 2 * k for k in range(1, n + 1))
        for key, v in P.gamma_g.items():
            if not v.is_polynomial():
                bad.append((n, key, "not polynomial"))
                continue
            f = v.as_poly()
            if not f.is_homogeneous() or f.weighted_degree() >= 4 * n - 4 or f.degree_in(f"u{n - 1}") > 1:
                bad.append((n, key, str(f)))
    record(4, "Gamma^{si}_k(u) polynomial, homogeneous, deg < 4n-4, linear in u_{n-1}, n=2..5", not bad, bad[:3])


# 5 ----------------------------------------------------------------------------------------

def test_criterion_05_quasihomogeneity():
    bad = []
    for n in range(2, 6):
        data, rep = verify_quasihomogeneity(build_pencil(n))
        if data.d != 1 - mpq(2, n - 1):
            bad.append((n, "charge"))
        for name in ("lie_e_g_equals_eta", "lie_e_eta_vanishes", "lie_E_g_homogeneous", "egorov_unit",
                     "egorov_euler", "bracket_e_E"):
            if not rep[name].passed:
                bad.append((n, name))
    record(5, "L_e g = eta, L_e eta = 0, L_E g = (d-1) g, Egorov via tau, [e,E] = e, n=2..5", not bad, bad)


# 6 ----------------------------------------------------------------------------------------

def _proportional(a, b):
    ka, ca = a.leading_term()
    kb, cb = b.leading_term()
    return a.scale(cb) == b.scale(ca)


def test_criterion_06_flat_chart():
    bad = []
    for n in range(2, 6):
        P = build_pencil(n)
        F = flat_coordinates(P)
        anti = [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)]
        eta_t = to_flat_chart(P.eta_u, F)
        if any(eta_t[i, j] != anti[i][j] for i in range(n) for j in range(n)):
            bad.append((n, "eta_t"))
        uch = F.uchart
        if not _proportional(F.t_polys[0], MultiPoly.var(uch, "u1")):
            bad.append((n, "t1"))
        if not _proportional(F.t_polys[-1], MultiPoly.var(uch, f"u{n}")):
            bad.append((n, "tn"))
        g11 = to_flat_chart(P.g_u, F)[0, 0]
        if not (g11.is_constant() and g11.constant_value() == n):
            bad.append((n, "g11", str(g11)))
        if n == 3 and not _proportional(F.t_polys[1], tau_potential(3, "saito")):
            bad.append((n, "tau"))
    record(6, "eta(t) anti-identity, t1 ~ u1, tn ~ un, t2 ~ tau (n=3), g^{11}(t) = n, n=2..5", not bad, bad)


# 7 ----------------------------------------------------------------------------------------

def test_criterion_07_r_operator():
    got = {n: frobenius_structure(n).R.diagonal for n in range(2, 7)}
    ok = all(got[n] == [mpq(j - 1, n - 1) for j in range(1, n + 1)] for n in got)
    record(7, "R = diag((j-1)/(n-1)), n=2..6", ok, got)


# 8 ----------------------------------------------------------------------------------------

AXIOMS = ("commutativity", "unit", "eta_invariance", "nabla_c_symmetric", "intersection_form_affinor",
          "lie_E_c", "associativity_generic", "associativity_index_n")


def test_criterion_08_frobenius_axioms():
    bad = []
    for n in range(2, 6):
        S = frobenius_structure(n)
        rep = verify_axioms(S).extend(christoffel_ledger(S))
        bad += [(n, name) for name in AXIOMS + ("b_equals_christoffel",) if not rep[name].passed]
        # associativity, recomputed here over every index including n
        c, ch = S.c, S.chart
        for i, j, k, m in itertools.product(range(n), repeat=4):
            lhs = sum((c[i, j, l] * c[l, k, m] for l in range(n)), RatFun.zero(ch))
            rhs = sum((c[i, k, l] * c[l, j, m] for l in range(n)), RatFun.zero(ch))
            if lhs != rhs:
                bad.append((n, "assoc", (i, j, k, m)))
                break
    record(8, "Frobenius axioms and Christoffel ledger, n=2..5", not bad, bad[:4])


# 9 ----------------------------------------------------------------------------------------

DISPLAYED = {
    2: ("1/2*t1**2*t2 - 3/4*t2**2", sp.Rational(1, 2)),
    3: ("1/6*t2**3 + t1*t2*t3 + 1/12*t1**3*t3 - 3/2*t3**2", sp.Integer(1)),
    4: ("1/108*t1**4*t4 + 1/6*t1**2*t2*t4 - 1/72*t2**4 + t1*t3*t4 + 1/2*t2**2*t4 + 1/2*t2*t3**2 - 9/4*t4**2",
        sp.Rational(3, 2)),
}


def _cubic_part(expr, n):
    """Drop affine and quadratic monomials (total degree <= 2)."""
    t = sp.symbols(f"t1:{n + 1}")
    P = sp.Poly(sp.expand(expr), *t)
    return sp.Add(*[cf * sp.Mul(*[v ** e for v, e in zip(t, m)]) for m, cf in P.terms() if sum(m) > 2])


def _match_up_to_scaling(got, want, n):
    """``got(t) = want(lam^i t_i)`` for some rational ``lam``; the exact
    displayed form is tried first (``lam = 1``)."""
    t = sp.symbols(f"t1:{n + 1}")
    if sp.expand(got - want) == 0:
        return True
    lam = sp.Symbol("lam")
    diff = sp.expand(got - want.subs({t[i]: lam ** (i + 1) * t[i] for i in range(n)}))
    eqs = sp.Poly(diff, *t).coeffs()
    sols = sp.solve(eqs, lam, dict=True)
    return any(s[lam].is_rational and s[lam] != 0 for s in sols)


def test_criterion_09_prepotentials():
    bad = []
    for n, (poly, kappa) in DISPLAYED.items():
        F = integrate_prepotential(frobenius_structure(n))
        tn = sp.Symbol(f"t{n}")
        if to_sympy(F.kappa) != kappa:
            bad.append((n, "log coefficient", str(F.kappa)))
        if not _match_up_to_scaling(_cubic_part(to_sympy(F.poly), n), _cubic_part(sp.sympify(poly), n), n):
            bad.append((n, "polynomial part", str(F)))
        if not wdvv_check(F).passed:
            bad.append((n, "wdvv"))
        # third derivatives of the displayed function, with its log term, reproduce c
        Fd = sp.sympify(poly) + kappa * tn ** 2 * sp.log(tn)
        t = sp.symbols(f"t1:{n + 1}")
        for i, j, k in itertools.product(range(n), repeat=3):
            d3 = sp.simplify(sp.diff(Fd, t[i], t[j], t[k]) - to_sympy(F.third_derivative(i, j, k)))
            if d3 != 0:
                bad.append((n, "third derivative", (i, j, k)))
                break
    record(9, "F_B2 (+ branch), F_B3, F_B4 reproduced; WDVV exact", not bad, bad)


# 10 ---------------------------------------------------------------------------------------

def test_criterion_10_dual_pipeline():
    p1, p2, x, y, c = sp.symbols("p1 p2 x y c")
    D = p1 ** 2 - p2 ** 2
    cstar = {
        (0, 0, 0): ((x + y) * p1 ** 2 - x * p2 ** 2) / ((x + y) * p1 * D),
        (1, 0, 0): -y * p2 / ((x + y) * D), (0, 1, 0): -y * p2 / ((x + y) * D), (0, 0, 1): -y * p2 / ((x + y) * D),
        (1, 0, 1): y * p1 / ((x + y) * D), (1, 1, 0): y * p1 / ((x + y) * D), (0, 1, 1): y * p1 / ((x + y) * D),
        (1, 1, 1): (x * p1 ** 2 - (x + y) * p2 ** 2) / ((x + y) * p2 * D),
    }
    gamma = {
        (0, 0, 0): -((4 * c - 1) * p1 ** 2 + p2 ** 2) / (p1 * D), (1, 0, 0): 4 * c * p1 ** 2 / (p2 * D),
        (0, 0, 1): -2 * (2 * c + 1) * p2 / D, (0, 1, 0): -2 * (2 * c + 1) * p2 / D,
        (1, 0, 1): 2 * (2 * c + 1) * p1 / D, (1, 1, 0): 2 * (2 * c + 1) * p1 / D,
        (0, 1, 1): -4 * c * p2 ** 2 / (p1 * D), (1, 1, 1): ((4 * c - 1) * p2 ** 2 + p1 ** 2) / (p2 * D),
    }
    prod = {
        (0, 0, 0): -2 * x * p1 ** 3 / (x + y) + 2 * p1 * p2 ** 2,
        (1, 0, 0): 2 * y * p1 ** 2 * p2 / (x + y), (0, 0, 1): 2 * y * p1 ** 2 * p2 / (x + y),
        (0, 1, 0): 2 * y * p1 ** 2 * p2 / (x + y),
        (1, 0, 1): 2 * y * p2 ** 2 * p1 / (x + y), (1, 1, 0): 2 * y * p2 ** 2 * p1 / (x + y),
        (0, 1, 1): 2 * y * p2 ** 2 * p1 / (x + y),
        (1, 1, 1): 2 * p2 * p1 ** 2 - 2 * x * p2 ** 3 / (x + y),
    }
    pipe = b2_pipeline()
    bad = []
    for k, v in cstar.items():
        if not same(pipe.product.c[k], v):
            bad.append(("c*", k))
    for k, v in gamma.items():
        if not same(pipe.gamma[k], v):
            bad.append(("Gamma", k))
    # c for e = d/du2: e1 = 0, e2 = 1
    c_u2 = pipe.c.map(lambda f: f.partial_evaluate({"e1": 0, "e2": 1}))
    for k, v in prod.items():
        if not same(c_u2[k], v):
            bad.append(("c", k))
    # the sympy reconstruction from the definitions agrees too
    orc = b2_dual_oracle()
    for k in itertools.product(range(2), repeat=3):
        if sp.cancel(orc["cstar"][k] - cstar[k]) != 0 or sp.cancel(orc["product"][k] - prod[k]) != 0:
            bad.append(("oracle", k))
    rep = verify_families(pipe, npoints=5, seed=0)
    bad += [(chk.check,) for chk in rep.checks if not chk.passed]
    nonzero = [chk for chk in rep.checks if chk.check == "residual_nonzero_off_family"]
    if len(nonzero) < 6:
        bad.append(("too few off-family points",))
    fam = b2_families()[0]
    res, r = dual_connection_and_potential(fam, pipe)
    uch = u_chart(2, ("c",))
    u1, u2, cc = (MultiPoly.var(uch, v) for v in ("u1", "u2", "c"))
    F1 = u1 * u2 - (u1 ** 3 * (cc.scale(8) + 1)).scale(mpq(1, 12))
    F2 = -(cc * (cc.scale(4) + 1) * u1 ** 4).scale(mpq(1, 12)) + (u2 * u2).scale(mpq(1, 2))
    if res.vector_potential is None or [f.embed(uch) for f in res.vector_potential] != [F1, F2]:
        bad.append(("vector potential", [str(f) for f in res.vector_potential or []]))
    at = {"c": mpq(-1, 8)}
    cs = fam.apply(pipe.product.c)
    for k in itertools.product(range(2), repeat=3):
        b = res.b.get(k, RatFun.zero(fam.chart))
        if b.partial_evaluate(at) != -cs[k].partial_evaluate(at):
            bad.append(("b = -c*", k))
    record(10, "B2 dual: c*, Gamma, c, residual on families / off family, vector potential, b = -c* at c=-1/8",
           not bad, bad[:4])


# 11 ---------------------------------------------------------------------------------------

def test_criterion_11_classical():
    roots = solve_constancy(classical_pencil().eta_u)
    const8 = all(v.is_constant() for v in classical_pencil(-8).eta_u.comps.values())
    const7 = all(v.is_constant() for v in classical_pencil(-7).eta_u.comps.values())
    F = classical_prepotential(-8)
    u1, u2 = MultiPoly.var(F.chart, "u1"), MultiPoly.var(F.chart, "u2")
    want = (u1 * u2 * u2).scale(mpq(1, 2)) + (u1 ** 5).scale(mpq(64, 15))
    ok = roots == [mpq(-8)] and const8 and not const7 and F == want
    record(11, "classical B2: eta constant iff c = -8; F = u1 u2^2/2 + 64/15 u1^5", ok, (roots, str(F)))


# 12 ---------------------------------------------------------------------------------------

def test_criterion_12_hierarchy():
    S = frobenius_structure(2)
    fl = flows(S, 1, hierarchy_vectors(S, 1))
    jet = ["t1*t1_x + t2_x", "t2*t1_x + t1*t2_x"]
    t1, t2, t1x, t2x = sp.symbols("t1 t2 t1_x t2_x")
    got = [sum(to_sympy(fl.coefficient(i, k).to_ratfun()) * (t1x, t2x)[k] for k in range(2)) for i in range(2)]
    ok = (sp.expand(got[0] - (t1 * t1x + t2x)) == 0
          and sp.expand(got[1] - sp.diff(t1 * t2, t1) * t1x - sp.diff(t1 * t2, t2) * t2x) == 0
          and [fl.component_str(i).split(" = ")[1] for i in range(2)] == jet)
    record(12, "B2 level-1 flow: t1_t = t1 t1_x + t2_x, t2_t = (t1 t2)_x", ok, [fl.component_str(i) for i in range(2)])
