import itertools
import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from oracle import b2_dual_oracle, same
from orbitfold.algebra import ExactMatrix, MultiPoly, RatFun, SingularMatrix
from orbitfold.dual import (OFF_FAMILY_WITNESS, b2_families, b2_invariants, b2_pipeline, bn_arrangement, bridge_check,
                            build_dual_product, compatibility_residual, dual_connection_and_potential, dual_summary,
                            expected_family_prepotential, flat_chart_residual, matching_family_c, natural_connection,
                            on_some_family, point_family, product_from_dual, specialized_residual,
                            tensor_consistency, verify_dual, verify_dual_product, weights_from_cli)
from orbitfold.invariants import p_chart


@pytest.fixture(scope="module")
def pipe():
    return b2_pipeline()


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_arrangement(n):
    A = bn_arrangement(n)
    assert len(A.orbit("I")) == n and len(A.orbit("II")) == n * (n - 1)
    for m in A.mirrors:
        P = m.projection()
        assert P * P == P
        alpha = ExactMatrix([[x] for x in m.form])
        assert P * alpha == alpha
        # a vector orthogonal to alpha is annihilated
        i = next(k for k, x in enumerate(m.form) if x)
        j = (i + 1) % n
        v = [0] * n
        v[i], v[j] = -m.form[j], m.form[i]
        if sum(a * b for a, b in zip(v, m.form)) == 0:
            assert P * ExactMatrix([[x] for x in v]) == ExactMatrix([[0]] * n)


def test_arrangement_needs_two_coordinates():
    with pytest.raises(ValueError):
        bn_arrangement(1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_equal_weights_are_normalized(n):
    sI, sII = weights_from_cli(1, 1, n)
    assert sI == sII == mpq(1, n)
    W = build_dual_product(n, sI, sII)
    assert verify_dual_product(W).passed


def test_dual_product_input_checks():
    with pytest.raises(ValueError):
        build_dual_product(5, 1, 1)
    with pytest.raises(ValueError):
        build_dual_product(2, 0, 0)
    with pytest.raises(ValueError):
        weights_from_cli(1, -1, 2)


def test_weights_from_cli_order():
    # a is the weight of orbit II, b of orbit I
    assert weights_from_cli(0, 1, 2) == (1, 0)
    assert weights_from_cli(1, 0, 3) == (0, mpq(1, 2))


def test_matching_family_c():
    assert matching_family_c(1, 1) is None
    assert matching_family_c(0, 1) == 0
    assert matching_family_c(1, 0) == mpq(-1, 4)
    assert matching_family_c(1, 2) is None


def test_cstar_against_sympy(pipe):
    orc = b2_dual_oracle()
    for k, v in orc["cstar"].items():
        assert same(pipe.product.c[k], v)


def test_cstar_at_equal_weights(pipe):
    fam = point_family({"x": 1, "y": 1, "c": 0, "e1": 0, "e2": 1})
    p1, p2 = sp.symbols("p1 p2")
    assert same(fam.apply(pipe.product.c)[1, 0, 1], p1 / (2 * (p1 ** 2 - p2 ** 2)))


def test_natural_connection(pipe):
    orc = b2_dual_oracle()
    for k, v in orc["gamma"].items():
        assert same(pipe.gamma[k], v)
    assert pipe.gamma.is_torsion_free()
    ch = p_chart(2)
    g0 = natural_connection(b2_invariants(ch, 0), ch)
    assert not g0[1, 0, 0]
    p1, p2 = sp.symbols("p1 p2")
    assert same(g0[0, 0, 1], -2 * p2 / (p1 ** 2 - p2 ** 2))


def test_natural_connection_is_flat_in_its_invariants(pipe):
    # the invariants are flat coordinates: their Hessians are killed
    ch = pipe.chart
    for u in pipe.invariants:
        for i, j in itertools.product(range(2), repeat=2):
            h = RatFun.lift(u.diff(ch.coords[i]).diff(ch.coords[j]), ch)
            h = h - sum((pipe.gamma[l, i, j] * RatFun.lift(u.diff(ch.coords[l]), ch) for l in range(2)),
                        RatFun.zero(ch))
            assert not h


def test_product_unit_and_oracle(pipe):
    orc = b2_dual_oracle()
    fam = point_family({"x": 2, "y": 3, "c": 5, "e1": 0, "e2": 1})
    c = fam.apply(pipe.c)
    p1, p2, x, y, cc = orc["symbols"]
    sub = {x: 2, y: 3, cc: 5}
    for k, v in orc["product"].items():
        assert same(c[k], v.subs(sub))
    e = fam.apply(pipe.unit)
    for i, j in itertools.product(range(2), repeat=2):
        assert sum((c[i, j, k] * e[k] for k in range(2)), RatFun.zero(fam.chart)) == (1 if i == j else 0)


def test_singular_unit_is_rejected():
    W = build_dual_product(2, mpq(1, 2), mpq(1, 2))
    with pytest.raises(SingularMatrix):
        product_from_dual(W, [0, 0])


@pytest.mark.parametrize("index", [0, 1, 2])
def test_families_are_compatible(pipe, index):
    fam = b2_families()[index]
    assert specialized_residual(pipe, fam).is_zero()


def test_off_family_witness(pipe):
    assert not on_some_family(OFF_FAMILY_WITNESS)
    assert not specialized_residual(pipe, point_family(OFF_FAMILY_WITNESS)).is_zero()


param = st.builds(lambda p, q: mpq(p, q), st.integers(-5, 5), st.integers(1, 4))


@settings(max_examples=12)
@given(st.fixed_dictionaries({k: param for k in ("x", "y", "c", "e1", "e2")}))
def test_random_parameters_off_the_families_are_incompatible(vals):
    if vals["x"] + vals["y"] == 0 or (vals["e1"] == 0 and vals["e2"] == 0) or on_some_family(vals):
        return
    pipe = b2_pipeline()
    try:
        R = specialized_residual(pipe, point_family(vals))
    except (ArithmeticError, ValueError):
        return
    assert not R.is_zero()


def test_residual_is_a_tensor(pipe):
    assert tensor_consistency(pipe, OFF_FAMILY_WITNESS, npoints=3).passed
    assert tensor_consistency(pipe, {"x": 1, "y": 1, "c": 3, "e1": 0, "e2": 2}, npoints=2).passed


def test_invariant_chart_residual_vanishes_on_a_family(pipe):
    fam = b2_families()[2]
    c = fam.apply(pipe.c)
    us = [fam.apply(u) for u in pipe.invariants]
    assert flat_chart_residual(c, us).is_zero()
    assert compatibility_residual(fam.apply(pipe.gamma), c).is_zero()


def test_family_prepotentials(pipe):
    fams = b2_families()
    for fam, sign, branch in ((fams[1], 1, "defocusing"), (fams[2], -1, "focusing")):
        res, rep = dual_connection_and_potential(fam, pipe)
        assert rep.passed, rep.to_text()
        poly, kappa = expected_family_prepotential(sign)
        assert res.prepotential.kappa == kappa
        assert res.prepotential.poly.embed(poly.chart) == poly
        assert res.branch == branch


def test_family_one_vector_potential_and_dual_connection(pipe):
    fam = b2_families()[0]
    res, rep = dual_connection_and_potential(fam, pipe)
    assert rep.passed and res.b_status == "unique"
    assert res.branch is None
    # b is symmetric in its lower indices
    z = RatFun.zero(fam.chart)
    assert all(res.b.get((i, j, k), z) == res.b.get((i, k, j), z) for i, j, k in itertools.product(range(2), repeat=3))


def test_incompatible_family_is_rejected(pipe):
    from orbitfold.dual import Family
    ch = p_chart(2, ("e2",))
    fam = Family("bad", ch, {"x": 1, "y": 2, "c": 1, "e1": 0}, unit="u2")
    with pytest.raises(ValueError):
        dual_connection_and_potential(fam, pipe)
    with pytest.raises(ValueError):
        dual_connection_and_potential(point_family(OFF_FAMILY_WITNESS), pipe)


def test_full_dual_report(pipe):
    rep = verify_dual(pipe, npoints=3, seed=1)
    assert rep.passed, rep.to_text()


def test_dual_summary_for_fixed_weights(pipe):
    data, rep = dual_summary(mpq(1, 2), mpq(1, 2), pipe=pipe)
    assert rep.passed and data["compatible_units"] == ["u2"]
    data, rep = dual_summary(0, 1, c=0, pipe=pipe)
    assert "u1" in data["compatible_units"]
    assert data["results"]["u1"].branch == "defocusing"
    data, rep = dual_summary(mpq(1, 3), mpq(2, 3), c=1, pipe=pipe)
    assert not rep.passed and data["compatible_units"] == []


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bridge_to_the_intersection_form(n):
    assert bridge_check(n).passed


def test_bridge_weights_reproduce_the_cometric():
    # sigma_I = 0 with the normalization from the weight sum
    sI, sII = weights_from_cli(1, 0, 3)
    assert (sI, sII) == (0, mpq(1, 2))
    W = build_dual_product(3, sI, sII)
    ch = W.chart
    total = W.weight_sum()
    assert total == ExactMatrix.identity(3, ch)
    p = [MultiPoly.var(ch, v) for v in ch.coords]
    # c*(p, .) is the identity on the Euler field
    E = [RatFun.lift(x, ch) for x in p]
    assert W.endomorphism(E) == ExactMatrix.identity(3, ch)


def test_random_points_from_rng_are_generic():
    from orbitfold.dual import random_parameters
    rng = random.Random(5)
    for _ in range(20):
        v = random_parameters(rng)
        assert not on_some_family(v) and v["x"] + v["y"] != 0
