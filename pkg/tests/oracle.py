"""Independent sympy computations used as oracles by the tests."""

from __future__ import annotations

import itertools

import sympy as sp
from gmpy2 import mpq

from orbitfold.algebra import MultiPoly, RatFun


def rat(c) -> sp.Rational:
    c = mpq(c)
    return sp.Rational(int(c.numerator), int(c.denominator))


def to_sympy(f):
    if isinstance(f, RatFun):
        return to_sympy(f.num) / to_sympy(f.den)
    if isinstance(f, MultiPoly):
        syms = [sp.Symbol(v) for v in f.chart.variables]
        return sp.Add(*[rat(c) * sp.Mul(*[s ** e for s, e in zip(syms, exps)]) for exps, c in f.items()])
    return rat(f)


def same(f, expr) -> bool:
    return sp.cancel(sp.together(to_sympy(f) - sp.sympify(expr))) == 0


def syms(names):
    return sp.symbols(names)


# -- B_n orbit space ------------------------------------------------------------------------

def elementary(n):
    p = sp.symbols(f"p1:{n + 1}")
    x = sp.Symbol("X")
    h = sp.expand(sp.Mul(*[x + pi ** 2 for pi in p]))
    return p, [h.coeff(x, n - k) for k in range(1, n + 1)]


def cometric_in_u(n):
    """``g^{ij}(u)`` for ``g^{ab}(p) = (1 - delta)/(p_a p_b)``, expressed in u by
    solving a linear ansatz over invariant monomials of the right degree."""
    p, us = elementary(n)
    u = sp.symbols(f"u1:{n + 1}")
    out = {}
    for i, j in itertools.product(range(n), repeat=2):
        expr = sp.Add(*[sp.diff(us[i], p[a]) * sp.diff(us[j], p[b]) / (p[a] * p[b])
                        for a in range(n) for b in range(n) if a != b])
        expr = sp.expand(sp.cancel(expr))
        out[(i, j)] = _express_in_u(expr, p, us, u, 2 * (i + 1) + 2 * (j + 1) - 4)
    return u, out


def _express_in_u(expr, p, us, u, degree):
    n = len(p)
    monos = []
    for exps in itertools.product(*[range(degree // (2 * (k + 1)) + 1) for k in range(n)]):
        if sum(2 * (k + 1) * e for k, e in enumerate(exps)) == degree:
            monos.append(exps)
    coeffs = sp.symbols(f"a0:{len(monos)}")
    ansatz = sp.Add(*[a * sp.Mul(*[us[k] ** e for k, e in enumerate(m)]) for a, m in zip(coeffs, monos)])
    eqs = sp.Poly(sp.expand(ansatz - expr), *p).coeffs()
    sol = sp.solve(eqs, coeffs, dict=True)
    assert sol, "not expressible in the invariants"
    return sp.Add(*[sol[0].get(a, 0) * sp.Mul(*[u[k] ** e for k, e in enumerate(m)])
                    for a, m in zip(coeffs, monos)])


def levi_civita(g, coords):
    """``Gamma^k_ij`` of a covariant metric matrix."""
    n = len(coords)
    gi = sp.simplify(g.inv())
    return {(k, i, j): sp.simplify(sp.Rational(1, 2) * sum(
        gi[k, m] * (sp.diff(g[i, m], coords[j]) + sp.diff(g[j, m], coords[i]) - sp.diff(g[i, j], coords[m]))
        for m in range(n)))
        for k, i, j in itertools.product(range(n), repeat=3)}


def riemann(gamma, coords):
    n = len(coords)
    R = {}
    for a, b, c, d in itertools.product(range(n), repeat=4):
        v = (sp.diff(gamma[(a, b, d)], coords[c]) - sp.diff(gamma[(a, b, c)], coords[d])
             + sum(gamma[(a, c, e)] * gamma[(e, b, d)] - gamma[(a, d, e)] * gamma[(e, b, c)] for e in range(n)))
        R[(a, b, c, d)] = sp.simplify(v)
    return R


# -- the B_2 dual construction, from its definitions --------------------------------------

def b2_dual_oracle():
    """``c*``, the connection of the invariants, and ``c`` for ``e = d/du_2``.

    Everything is built from scratch in sympy: ``* = sum (d alpha/alpha) sigma pi``
    over the four mirrors, ``Gamma = J^{-1} Hess(u)``, and
    ``X o Y = (e *)^{-1} X * Y``."""
    p1, p2, x, y, c = sp.symbols("p1 p2 x y c")
    P = (p1, p2)
    mirrors = [((1, 0), x / (x + y)), ((0, 1), x / (x + y)), ((1, -1), y / (x + y)), ((1, 1), y / (x + y))]
    cstar = {k: sp.Integer(0) for k in itertools.product(range(2), repeat=3)}
    for (a, b), s in mirrors:
        alpha = a * p1 + b * p2
        form = (a, b)
        norm2 = a * a + b * b
        for i, j, k in itertools.product(range(2), repeat=3):
            # pi_H(X)^i = alpha^i alpha(X)/|alpha|^2 ; contribute (d alpha(Y)/alpha) sigma pi(X)
            cstar[(i, j, k)] += s * form[j] * form[i] * form[k] / (norm2 * alpha)
    cstar = {k: sp.cancel(v) for k, v in cstar.items()}
    u1 = p1 ** 2 + p2 ** 2
    u2 = p1 ** 2 * p2 ** 2 + c * u1 ** 2
    us = [u1, u2]
    J = sp.Matrix([[sp.diff(u, v) for v in P] for u in us])
    Ji = J.inv()
    gamma = {(l, i, j): sp.cancel(sum(Ji[l, a] * sp.diff(us[a], P[i], P[j]) for a in range(2)))
             for l, i, j in itertools.product(range(2), repeat=3)}
    e = [sp.cancel(Ji[l, 1]) for l in range(2)]
    L = sp.Matrix(2, 2, lambda i, k: sum(cstar[(i, j, k)] * e[j] for j in range(2)))
    Li = L.inv()
    prod = {(i, j, k): sp.cancel(sum(Li[i, m] * cstar[(m, j, k)] for m in range(2)))
            for i, j, k in itertools.product(range(2), repeat=3)}
    return {"symbols": (p1, p2, x, y, c), "cstar": cstar, "gamma": gamma, "product": prod, "unit": e}
