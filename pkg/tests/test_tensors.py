import itertools
import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, strategies as st

from oracle import cometric_in_u, levi_civita, riemann, same, to_sympy
from orbitfold.algebra import Chart, ExactMatrix, MultiPoly, RatFun
from orbitfold.invariants import elementary_invariants, p_chart, u_chart
from orbitfold.pencil import build_pencil, cometric_p, covariant_metric_p, eta_closed_form
from orbitfold.tensors import (TensorField, bracket, christoffel_covariant, contravariant_christoffel_from_metric,
                               contravariant_curvature, contravariant_from_lower, coordinate_field,
                               covariant_derivative_metric, generic_point, jacobian, lie_derivative,
                               pushforward_cometric, riemann_curvature)


def _metric(ch, rows):
    return TensorField(ch, 0, 2, {(i, j): rows[i][j] for i in range(ch.dim) for j in range(ch.dim)})


def test_jacobian_examples():
    ch = p_chart(2)
    J = jacobian(elementary_invariants(2, ch), ch)
    p1, p2 = (MultiPoly.var(ch, v) for v in ch.coords)
    assert J[0, 0] == p1.scale(2)
    p1s, p2s = sp.symbols("p1 p2")
    oracle = sp.Matrix([[sp.diff(u, v) for v in (p1s, p2s)] for u in (p1s ** 2 + p2s ** 2, p1s ** 2 * p2s ** 2)]).det()
    assert sp.expand(to_sympy(J.det()) - oracle) == 0
    assert sp.expand(oracle - 4 * p1s * p2s * (p1s ** 2 - p2s ** 2)) == 0
    assert jacobian([p1, p2], ch) == ExactMatrix.identity(2, ch)


def test_pushforward_n2_against_sympy():
    g = pushforward_cometric(cometric_p(2), 2)
    (u1, u2), oracle = cometric_in_u(2)
    assert oracle == {(0, 0): 8, (0, 1): 4 * u1, (1, 0): 4 * u1, (1, 1): 8 * u2}
    assert all(sp.expand(to_sympy(g[i, j]) - oracle[i, j]) == 0 for i in range(2) for j in range(2))


def test_pushforward_pullback_at_points():
    n = 3
    rng = random.Random(3)
    pch = p_chart(n)
    G = cometric_p(n)
    gu = pushforward_cometric(G, n)
    us = elementary_invariants(n, pch)
    J = jacobian(us, pch)
    for _ in range(10):
        pt = dict(zip(pch.coords, generic_point(n, rng)))
        uvals = {f"u{k + 1}": u.evaluate(pt) for k, u in enumerate(us)}
        for i, j in itertools.product(range(n), repeat=2):
            direct = sum(G[a, b].evaluate(pt) * J[i, a].evaluate(pt) * J[j, b].evaluate(pt)
                         for a in range(n) for b in range(n))
            assert gu[i, j].evaluate(uvals) == direct


@pytest.mark.parametrize("n", [2, 3, 4])
def test_christoffel_of_intersection_form(n):
    gam = christoffel_covariant(covariant_metric_p(n))
    ch = gam.chart
    assert gam.nonzero() == {(i, i, i): RatFun(MultiPoly.one(ch), MultiPoly.var(ch, ch.coords[i]))
                             for i in range(n)}
    assert covariant_derivative_metric(covariant_metric_p(n), gam).is_zero()
    assert riemann_curvature(gam).is_zero()


def test_euclidean_metric():
    ch = p_chart(2)
    gam = christoffel_covariant(_metric(ch, [[1, 0], [0, 1]]))
    assert not gam.nonzero()
    assert riemann_curvature(gam).is_zero()


def test_diagonal_metric_symbols():
    ch = p_chart(2)
    p1 = MultiPoly.var(ch, "p1")
    gam = christoffel_covariant(_metric(ch, [[p1 * p1, 0], [0, 1]]))
    assert gam.nonzero() == {(0, 0, 0): RatFun(MultiPoly.one(ch), p1)}


def test_polar_metric_is_flat_and_a_curved_toy_is_not():
    ch = p_chart(2)
    p1 = MultiPoly.var(ch, "p1")
    polar = christoffel_covariant(_metric(ch, [[1, 0], [0, p1 * p1]]))
    assert riemann_curvature(polar).is_zero()
    curved = christoffel_covariant(_metric(ch, [[1, 0], [0, p1 ** 4]]))
    R = riemann_curvature(curved)
    assert not R.is_zero()
    # sympy oracle for the same metric
    P1, P2 = sp.symbols("p1 p2")
    Rs = riemann(levi_civita(sp.Matrix([[1, 0], [0, P1 ** 4]]), (P1, P2)), (P1, P2))
    # oracle keys (a, b, c, d) = R^a_{bcd} with derivative index c; ours (k, i, j, l) with derivative i
    for (k, i, j, l), v in R.comps.items():
        assert sp.simplify(to_sympy(v) - Rs[(k, l, i, j)]) == 0


metric_entries = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


@given(metric_entries, metric_entries)
def test_bianchi_and_metricity_on_random_metrics(a, b):
    ch = Chart("q", ("x", "y"), (1, 1))
    x, y = MultiPoly.var(ch, "x"), MultiPoly.var(ch, "y")
    g11 = MultiPoly.const(ch, 2) + x * x.scale(abs(a[0]) + 1)
    g12 = (x * y).scale(a[1]) + MultiPoly.const(ch, b[0])
    g22 = MultiPoly.const(ch, 3) + y * y.scale(abs(b[1]) + 1) + x.scale(b[2])
    g = _metric(ch, [[g11, g12], [g12, g22]])
    if not g.matrix().det():
        return
    gam = christoffel_covariant(g)
    assert gam.is_torsion_free()
    assert covariant_derivative_metric(g, gam).is_zero()
    R = riemann_curvature(gam)
    d = 2
    for k, i, j, l in itertools.product(range(d), repeat=4):
        assert R[k, i, j, l] + R[k, j, l, i] + R[k, l, i, j] == 0


def test_contravariant_symbols_agree_with_lowered():
    n = 3
    P = build_pencil(n, "raw")
    gen = contravariant_christoffel_from_metric(P.g_u)
    z = RatFun.zero(P.chart)
    keys = set(gen) | set(P.gamma_g)
    assert all(gen.get(k, z) == P.gamma_g.get(k, z) for k in keys)


def test_contravariant_curvature_matches_lowered_riemann():
    ch = p_chart(2)
    g = covariant_metric_p(2)
    gam = christoffel_covariant(g)
    ginv = TensorField(ch, 2, 0, {(i, j): g.matrix().inverse()[i, j] for i in range(2) for j in range(2)})
    contra = contravariant_from_lower(gam, ginv)
    assert not contravariant_curvature(ginv, contra)


def test_lie_derivative_examples():
    n = 3
    uch = u_chart(n)
    e = coordinate_field(uch, f"u{n - 1}")
    eta = eta_closed_form(n)
    assert lie_derivative(eta, e).is_zero()
    X = TensorField.vector(uch, [RatFun.var(uch, "u1") * RatFun.var(uch, "u2"), 1, RatFun.var(uch, "u3")])
    assert lie_derivative(X, X).is_zero()
    # L_E du_k = (k/(n-1)) du_k for E = sum (k/(n-1)) u_k d/du_k
    E = TensorField.vector(uch, [RatFun.var(uch, f"u{k}") * mpq(k, n - 1) for k in range(1, n + 1)])
    for k in range(n):
        du = TensorField(uch, 0, 1, {(k,): 1})
        assert lie_derivative(du, E) == du.scale(mpq(k + 1, n - 1))


def test_bracket_is_antisymmetric():
    ch = u_chart(2)
    X = TensorField.vector(ch, [RatFun.var(ch, "u2"), RatFun.var(ch, "u1") ** 2])
    Y = TensorField.vector(ch, [1, RatFun.var(ch, "u1")])
    assert bracket(X, Y) == bracket(Y, X).scale(-1)


def test_lie_derivative_rejects_unsupported_rank():
    ch = u_chart(2)
    T = TensorField(ch, 3, 0, {(0, 0, 0): 1})
    with pytest.raises(ValueError):
        lie_derivative(T, coordinate_field(ch, "u1"))


def test_sympy_oracle_metric_of_intersection_form():
    P1, P2, P3 = sp.symbols("p1 p2 p3")
    p = (P1, P2, P3)
    g = sp.Matrix(3, 3, lambda i, j: (sp.Rational(1, 2) - (1 if i == j else 0)) * p[i] * p[j])
    gam = levi_civita(g, p)
    ours = christoffel_covariant(covariant_metric_p(3))
    for key, v in gam.items():
        assert same(ours[key], v)
