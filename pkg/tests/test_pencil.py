import itertools
import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from oracle import cometric_in_u, levi_civita, same, to_sympy
from orbitfold.algebra import MultiPoly, RatFun
from orbitfold.invariants import u_chart
from orbitfold.pencil import (build_pencil, christoffel_degree_report, classical_pencil, contravariant_christoffel_u,
                              eta_christoffel_closed_form, eta_closed_form, euler_field_u, generating_identity_check,
                              pullback_christoffel_residual, solve_constancy, tau_potential, unit_field_u,
                              verify_classical_pencil, verify_flat_pencil, verify_quasihomogeneity)
from orbitfold.tensors import TensorField, christoffel_covariant, contravariant_from_lower, generic_point, lie_derivative


def _rows(T):
    n = T.dim
    return [[T[i, j] for j in range(n)] for i in range(n)]


def test_raw_eta_for_n2():
    P = build_pencil(2, "raw")
    assert _rows(P.eta_u) == [[0, 4], [4, 0]]


def test_raw_eta_entries_for_n3():
    eta = build_pencil(3, "raw").eta_u
    u1 = RatFun.var(eta.chart, "u1")
    # 4(2n - i - j) u_{i+j-n-1}: at (2,2) the index is 0, so the entry is the constant 8
    assert eta[1, 1] == 8
    assert eta[0, 2] == 8 and eta[2, 0] == 8
    assert eta[1, 2] == u1 * 4
    # the (3,3) coefficient 4(2n - 6) vanishes
    assert not eta[2, 2]
    assert not eta[0, 0] and not eta[0, 1]


def test_saito_g11_is_n():
    for n in (2, 3, 4):
        g11 = build_pencil(n, "saito").g_u[0, 0]
        assert g11.is_constant() and g11.constant_value() == n


@pytest.mark.parametrize("n", [2, 3])
def test_cometric_against_sympy_pushforward(n):
    _, g = cometric_in_u(n)
    P = build_pencil(n, "raw")
    assert all(same(P.g_u[i, j], v) for (i, j), v in g.items())


@pytest.mark.parametrize("n", range(2, 7))
def test_eta_structure(n):
    P = build_pencil(n, "raw")
    assert P.eta_u == eta_closed_form(n)
    M = P.eta_u.matrix()
    assert all(M[i, n - 1 - i] == 4 * (n - 1) for i in range(n))
    assert all(not M[i, j] for i in range(n) for j in range(n) if i + j < n - 1)
    inv = M.inverse()
    assert all(inv[i, j].is_polynomial() for i in range(n) for j in range(n))
    assert all(not inv[i, j] for i in range(n) for j in range(n) if i + j > n - 1)
    det = M.det()
    assert det.is_constant() and det.constant_value() != 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_eta_contravariant_symbols(n):
    P = build_pencil(n, "raw")
    want = eta_christoffel_closed_form(n)
    z = RatFun.zero(P.chart)
    assert all(P.gamma_eta.get(k, z) == want.get(k, z) for k in set(P.gamma_eta) | set(want))
    for (i, j, k), v in want.items():
        assert k == i + j - n and v == 4 * (n - 1 - j)   # 0-based keys


def test_n2_symbols_against_sympy():
    (u1, u2), g = cometric_in_u(2)
    G = sp.Matrix(2, 2, lambda i, j: g[i, j])
    lower = levi_civita(G.inv(), (u1, u2))
    gam = contravariant_christoffel_u(2)
    for i, j, k in itertools.product(range(2), repeat=3):
        want = -sum(G[i, s] * lower[(j, s, k)] for s in range(2))
        assert same(gam.get((i, j, k), RatFun.zero(u_chart(2))), sp.cancel(want))
    # Gamma^{22}_1 is linear in u, in fact identically zero
    assert (1, 1, 0) not in gam


@pytest.mark.parametrize("n", range(2, 6))
def test_christoffel_degrees(n):
    assert christoffel_degree_report(build_pencil(n)).passed


@pytest.mark.parametrize("n", [2, 3, 4])
def test_contravariant_symbols_pull_back_to_the_p_chart(n):
    rng = random.Random(n)
    gam = contravariant_christoffel_u(n)
    for _ in range(4):
        assert pullback_christoffel_residual(n, gam, generic_point(n, rng)) == []


def test_perturbed_symbols_fail_the_pullback():
    gam = dict(contravariant_christoffel_u(3))
    key = next(iter(sorted(gam)))
    gam[key] = gam[key] + 1
    assert pullback_christoffel_residual(3, gam, generic_point(3, random.Random(1)))


def test_covariant_and_contravariant_symbols_agree():
    P = build_pencil(2, "raw")
    ch = P.chart
    inv = P.g_u.matrix().inverse()
    g_cov = TensorField(ch, 0, 2, {(i, j): inv[i, j] for i in range(2) for j in range(2)})
    contra = contravariant_from_lower(christoffel_covariant(g_cov), P.g_u)
    z = RatFun.zero(ch)
    assert all(contra.get(k, z) == P.gamma_g.get(k, z) for k in set(contra) | set(P.gamma_g))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_flat_pencil_symbolic(n):
    rep = verify_flat_pencil(build_pencil(n))
    assert rep.passed, rep.to_text()


def test_flat_pencil_at_points():
    rep = verify_flat_pencil(build_pencil(5), mode="points", npoints=3, seed=2)
    assert rep.passed, rep.to_text()


def test_broken_pencil_reports_a_witness():
    P = build_pencil(3)
    P.gamma_g = dict(P.gamma_g)
    key = sorted(P.gamma_g)[0]
    P.gamma_g[key] = P.gamma_g[key] + RatFun.var(P.chart, "u1")
    rep = verify_flat_pencil(P)
    assert not rep["levi_civita_g"].passed


def test_quasihomogeneity_n2_and_n3():
    data, rep = verify_quasihomogeneity(build_pencil(2, "raw"))
    assert rep.passed
    assert tau_potential(2) == MultiPoly.var(u_chart(2), "u2").scale(mpq(1, 4))
    data, rep = verify_quasihomogeneity(build_pencil(3, "raw"))
    assert rep.passed
    assert data.d - 1 == -1
    assert data.degrees == [mpq(1, 2), mpq(1), mpq(3, 2)]


@pytest.mark.parametrize("n", range(2, 7))
def test_unit_and_euler_bracket(n):
    e, E = unit_field_u(n), euler_field_u(n)
    assert lie_derivative(E, e) == e


def test_tau_for_n3_matches_the_stated_form():
    u1, u2 = sp.symbols("u1 u2")
    assert sp.expand(to_sympy(tau_potential(3)) - sp.Rational(1, 8) * (u2 - u1 ** 2 / 4)) == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generating_identity(n):
    assert generating_identity_check(n).passed


def test_generating_identity_bound():
    with pytest.raises(ValueError):
        generating_identity_check(9)


def test_generating_identity_independently_in_sympy():
    n = 3
    p = sp.symbols("p1:4")
    x, y = sp.symbols("x y")
    u, g = cometric_in_u(n)
    us = [sum(sp.Mul(*c) for c in itertools.combinations([v ** 2 for v in p], k)) for k in range(1, n + 1)]
    sub = dict(zip(u, us))
    lhs = sp.Rational(1, 4) * sum(g[i, j].subs(sub) * x ** (n - 1 - i) * y ** (n - 1 - j)
                                  for i in range(n) for j in range(n))
    h = sp.Mul(*[x + v ** 2 for v in p])
    hy = h.subs(x, y)
    rhs = sp.diff(h, x) * sp.diff(hy, y) - sp.cancel((sp.diff(hy, y) * h - sp.diff(h, x) * hy) / (x - y))
    assert sp.expand(lhs - rhs) == 0


def test_classical_pencil_constant_only_at_minus_eight():
    assert solve_constancy(classical_pencil().eta_u) == [mpq(-8)]
    assert verify_classical_pencil(-8).passed
    rep = verify_classical_pencil(0)
    assert not rep["eta_constant"].passed


def test_classical_eta_entries_symbolic_c():
    eta = classical_pencil().eta_u
    c = sp.Symbol("c")
    non_const = [k for k, v in eta.comps.items() if not to_sympy(v).free_symbols <= {c}]
    assert non_const
    for k in non_const:
        assert not to_sympy(eta[k]).subs(c, -8).free_symbols


@settings(max_examples=10)
@given(st.integers(2, 5), st.integers(0, 10 ** 6))
def test_curvature_of_pencil_vanishes_at_random_points(n, seed):
    rep = verify_flat_pencil(build_pencil(n), mode="points", npoints=1, seed=seed)
    assert rep["curvature_pencil"].passed and rep["curvature_g"].passed
