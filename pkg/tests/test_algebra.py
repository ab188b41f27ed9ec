import importlib
import os
import subprocess
import sys

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, strategies as st

from oracle import to_sympy
from orbitfold.algebra import (BACKEND, Chart, ExactMatrix, MultiPoly, RatFun, SingularMatrix, ZeroDenominator,
                               as_scalar, rational_sqrt, solve_linear, _pykernels)
from orbitfold.algebra.serialize import (chart_from_json, chart_to_json, dumps, poly_from_json, poly_to_json,
                                         ratfun_from_json, ratfun_to_json)

CH = Chart("xyz", ("x", "y", "z"), (1, 2, 3), ("a",))
X, Y, Z, A = (sp.Symbol(v) for v in ("x", "y", "z", "a"))

rationals = st.builds(lambda p, q: mpq(p, q), st.integers(-30, 30), st.integers(1, 9))
monomials = st.tuples(*[st.integers(0, 3)] * 4)
polys = st.lists(st.tuples(monomials, rationals), max_size=6).map(
    lambda terms: sum((MultiPoly.monomial(CH, e, c) for e, c in terms), MultiPoly.zero(CH)))
nonzero_polys = polys.filter(bool)
# rational-function checks go through sympy.cancel, so keep these small
small_polys = st.lists(st.tuples(st.tuples(*[st.integers(0, 2)] * 4), rationals), max_size=3).map(
    lambda terms: sum((MultiPoly.monomial(CH, e, c) for e, c in terms), MultiPoly.zero(CH)))
small_nonzero = small_polys.filter(bool)


# -- scalars and charts ----------------------------------------------------------------------

def test_as_scalar_rejects_floats_and_bools():
    assert as_scalar("3/4") == mpq(3, 4)
    with pytest.raises(TypeError):
        as_scalar(0.5)
    with pytest.raises(TypeError):
        as_scalar(True)
    with pytest.raises(ValueError):
        as_scalar("  ")


def test_rational_sqrt():
    assert rational_sqrt(mpq(9, 4)) == mpq(3, 2)
    assert rational_sqrt(mpq(1, 8)) is None


def test_chart_validation():
    with pytest.raises(ValueError):
        Chart("bad", ("x", "x"))
    with pytest.raises(ValueError):
        Chart("bad", ("x",), (0,))
    assert CH.weight_of("a") == 0
    with pytest.raises(KeyError):
        CH.coord_index("a")


# -- polynomial arithmetic against sympy ---------------------------------------------------------

@given(polys, polys)
def test_ring_operations_match_sympy(f, g):
    assert sp.expand(to_sympy(f + g) - (to_sympy(f) + to_sympy(g))) == 0
    assert sp.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0
    assert sp.expand(to_sympy(f - g) - (to_sympy(f) - to_sympy(g))) == 0


@given(polys, polys, polys)
def test_distributive(f, g, h):
    assert f * (g + h) == f * g + f * h


@given(polys, polys)
def test_leibniz_rule(f, g):
    for v in ("x", "y", "a"):
        assert (f * g).diff(v) == f.diff(v) * g + f * g.diff(v)


@given(polys)
def test_diff_matches_sympy(f):
    assert sp.expand(to_sympy(f.diff("z")) - sp.diff(to_sympy(f), Z)) == 0


@given(polys, polys, st.tuples(rationals, rationals, rationals, rationals))
def test_evaluation_is_a_homomorphism(f, g, pt):
    vals = dict(zip(CH.variables, pt))
    assert (f * g).evaluate(vals) == f.evaluate(vals) * g.evaluate(vals)
    assert (f + g).evaluate(vals) == f.evaluate(vals) + g.evaluate(vals)


@given(polys, nonzero_polys)
def test_exact_division(f, g):
    assert (f * g).divexact(g) == f


def test_weighted_degree():
    f = MultiPoly.var(CH, "x") ** 2 * MultiPoly.var(CH, "a") + MultiPoly.var(CH, "y")
    assert f.is_homogeneous() and f.weighted_degree() == 2


# -- rational functions -----------------------------------------------------------------------

@given(small_polys, small_nonzero, small_polys, small_nonzero)
def test_ratfun_field_operations(a, b, c, d):
    f, g = RatFun(a, b), RatFun(c, d)
    expr = to_sympy(f) * to_sympy(g) + to_sympy(f)
    assert sp.cancel(to_sympy(f * g + f) - expr) == 0
    if c:
        assert (f / g) * g == f


@given(polys, nonzero_polys)
def test_ratfun_equality_is_cross_multiplication(a, b):
    f = RatFun(a, b)
    h = RatFun(a * b, b * b)
    assert f == h
    assert f.reduced() == f


def test_ratfun_zero_denominator():
    with pytest.raises(ZeroDenominator):
        RatFun(MultiPoly.one(CH), MultiPoly.zero(CH))


@given(small_polys, small_nonzero)
def test_ratfun_quotient_rule(a, b):
    f = RatFun(a, b)
    d = f.diff("x")
    assert sp.cancel(to_sympy(d) - sp.diff(to_sympy(f), X)) == 0


# -- linear algebra ---------------------------------------------------------------------------

small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n))


@given(small_matrices)
def test_det_and_inverse_match_sympy(rows):
    M = ExactMatrix([[mpq(x) for x in r] for r in rows])
    S = sp.Matrix(rows)
    assert M.det() == mpq(int(S.det()))
    if S.det() != 0:
        Mi = M.inverse()
        assert M * Mi == ExactMatrix.identity(len(rows))
    else:
        with pytest.raises(SingularMatrix):
            M.inverse()


@given(small_matrices, st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_linear_is_sound(rows, rhs):
    n = len(rows)
    b = [mpq(v) for v in rhs[:n]]
    sol = solve_linear([[mpq(x) for x in r] for r in rows], b)
    S = sp.Matrix(rows)
    aug = S.row_join(sp.Matrix(rhs[:n]))
    if S.rank() < aug.rank():
        assert sol.status == "inconsistent"
        return
    assert sol.status == ("unique" if S.rank() == n else "parametric")
    x = sol.particular
    assert all(sum(mpq(rows[i][j]) * x[j] for j in range(n)) == b[i] for i in range(n))
    for v in sol.nullspace:
        assert all(sum(mpq(rows[i][j]) * v[j] for j in range(n)) == 0 for i in range(n))
    assert len(sol.nullspace) == n - S.rank()


def test_solve_linear_over_rational_functions():
    a = RatFun.var(CH, "a")
    x = RatFun.var(CH, "x")
    sol = solve_linear([[a, x], [x, a]], [a + x, a + x])
    assert sol.status == "unique"
    assert sol.particular == [RatFun.one(CH), RatFun.one(CH)]


# -- serialization ----------------------------------------------------------------------------

@given(polys, nonzero_polys)
def test_json_round_trip(f, g):
    assert poly_from_json(poly_to_json(f), CH) == f
    assert ratfun_from_json(ratfun_to_json(RatFun(f, g)), CH) == RatFun(f, g)
    assert chart_from_json(chart_to_json(CH)) == CH


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == dumps({"a": [1, 2], "b": 1})
    assert dumps({}).endswith("\n")


# -- kernel backends ----------------------------------------------------------------------------

def _compiled():
    try:
        return importlib.import_module("orbitfold.algebra._kernels")
    except ImportError:
        return None


@pytest.mark.skipif(_compiled() is None, reason="compiled kernels not built")
@given(polys, polys, rationals)
def test_backends_agree(f, g, s):
    fast = _compiled()
    assert fast.mul_terms(f.terms, g.terms) == _pykernels.mul_terms(f.terms, g.terms)
    assert fast.add_terms(f.terms, g.terms, s) == _pykernels.add_terms(f.terms, g.terms, s)
    assert fast.add_terms(f.terms, g.terms) == _pykernels.add_terms(f.terms, g.terms)
    assert fast.dot_terms([f.terms, g.terms], [g.terms, f.terms]) == \
        _pykernels.dot_terms([f.terms, g.terms], [g.terms, f.terms])


def test_pure_backend_selected_by_environment():
    env = dict(os.environ, ORBITFOLD_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import orbitfold.algebra as a; print(a.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert BACKEND in ("python", "cython")
