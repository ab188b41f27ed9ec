"""Rational functions as reduced quotients of :class:`MultiPoly`.

Reduction always removes common monomial factors and scalar content and
tries exact division by the denominator.  A full polynomial gcd (delegated
to sympy's sparse polynomial rings) runs only once the combined term count
exceeds :data:`GCD_THRESHOLD`, or when :meth:`RatFun.reduced` is called.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

from .chart import Chart
from .poly import MultiPoly, ChartMismatch, NotDivisible, pack, unpack
from .scalar import ONE, ZERO, as_scalar, is_scalar_like

GCD_THRESHOLD = 8


class ZeroDenominator(ZeroDivisionError):
    """A denominator vanished identically (or at an evaluation point)."""


@lru_cache(maxsize=64)
def _sympy_ring(nvars: int):
    from sympy import QQ
    from sympy.polys.rings import ring
    names = ",".join(f"z{i}" for i in range(nvars)) if nvars > 1 else "z0"
    R = ring(names, QQ)[0]
    return R


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic polynomial gcd (via sympy)."""
    if a.chart != b.chart:
        raise ChartMismatch("gcd operands in different charts")
    n = a.chart.nvars
    if n == 0:
        return MultiPoly.one(a.chart)
    R = _sympy_ring(n)
    fa = R.from_dict({unpack(k, n): c for k, c in a.terms.items()})
    fb = R.from_dict({unpack(k, n): c for k, c in b.terms.items()})
    g = fa.gcd(fb)
    return MultiPoly(a.chart, {pack(e, n): mpq(c) for e, c in g.items()})


def _as_poly(x, chart):
    if isinstance(x, MultiPoly):
        if x.chart != chart:
            raise ChartMismatch(f"{x.chart.name!r} vs {chart.name!r}")
        return x
    return MultiPoly.const(chart, x)


def _normalize(num: MultiPoly, den: MultiPoly, full_gcd=False):
    if not den.terms:
        raise ZeroDenominator("zero denominator")
    chart = num.chart
    if not num.terms:
        return num, MultiPoly.one(chart)
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num.scale(1 / c)), MultiPoly.one(chart)
    # common monomial factor
    mn = num.monomial_content()
    md = den.monomial_content()
    common = tuple(min(a, b) for a, b in zip(mn, md))
    if any(common):
        num = num.shift_down(common)
        den = den.shift_down(common)
    if len(den.terms) == 1:
        (k, c), = den.terms.items()
        if c != 1:
            num = num.scale(1 / c)
            den = MultiPoly(chart, {k: ONE})
        if k == 0:
            return num, den
        return num, den
    lc = den.leading_term()[1]
    if lc != 1:
        inv = 1 / lc
        num = num.scale(inv)
        den = den.scale(inv)
    # exact division is common (polynomial results written as quotients)
    if len(den.terms) <= len(num.terms):
        q, r = num.divmod(den, stop_early=True)
        if not r.terms:
            return q, MultiPoly.one(chart)
    if full_gcd or len(num.terms) + len(den.terms) > GCD_THRESHOLD:
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = num.divexact(g)
            den = den.divexact(g)
            lc = den.leading_term()[1]
            if lc != 1:
                num = num.scale(1 / lc)
                den = den.scale(1 / lc)
            if den.is_constant():
                return num, MultiPoly.one(chart)
    return num, den


class RatFun:
    """Immutable quotient ``num/den`` of polynomials in one chart."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, chart: Chart | None = None, _raw=False):
        if chart is None:
            if isinstance(num, MultiPoly):
                chart = num.chart
            elif isinstance(den, MultiPoly):
                chart = den.chart
            else:
                raise ValueError("a chart is required for scalar rational functions")
        num = _as_poly(num, chart)
        den = MultiPoly.one(chart) if den is None else _as_poly(den, chart)
        if not _raw:
            num, den = _normalize(num, den)
        elif not den.terms:
            raise ZeroDenominator("zero denominator")
        self.num = num
        self.den = den

    @property
    def chart(self) -> Chart:
        return self.num.chart

    # -- construction ---------------------------------------------------
    @classmethod
    def zero(cls, chart):
        return cls(MultiPoly.zero(chart), None, chart, _raw=True)

    @classmethod
    def one(cls, chart):
        return cls(MultiPoly.one(chart), None, chart, _raw=True)

    @classmethod
    def const(cls, chart, c):
        return cls(MultiPoly.const(chart, c), None, chart, _raw=True)

    @classmethod
    def var(cls, chart, name):
        return cls(MultiPoly.var(chart, name), None, chart, _raw=True)

    @classmethod
    def lift(cls, x, chart):
        if isinstance(x, RatFun):
            if x.chart != chart:
                raise ChartMismatch(f"{x.chart.name!r} vs {chart.name!r}")
            return x
        if isinstance(x, MultiPoly):
            return cls(x, None, chart, _raw=True)
        return cls.const(chart, x)

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MultiPoly:
        if not self.den.is_constant():
            r = self.reduced()
            if not r.den.is_constant():
                raise ValueError(f"not a polynomial: {self}")
            return r.num.scale(1 / r.den.constant_value())
        c = self.den.constant_value()
        return self.num if c == 1 else self.num.scale(1 / c)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("rational function is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def weighted_degree(self):
        """Weighted degree of a quotient of homogeneous polynomials."""
        a = self.num.weighted_degree()
        b = self.den.weighted_degree()
        if a is None:
            return None
        return a - b

    def is_homogeneous(self) -> bool:
        return self.num.is_homogeneous() and self.den.is_homogeneous()

    def reduced(self) -> "RatFun":
        num, den = _normalize(self.num, self.den, full_gcd=True)
        return RatFun(num, den, self.chart, _raw=True)

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, RatFun):
            if other.chart != self.chart:
                raise ChartMismatch(f"{self.chart.name!r} vs {other.chart.name!r}")
            return other
        if isinstance(other, MultiPoly):
            if other.chart != self.chart:
                raise ChartMismatch(f"{self.chart.name!r} vs {other.chart.name!r}")
            return RatFun(other, None, self.chart, _raw=True)
        if is_scalar_like(other):
            return RatFun.const(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num.terms:
            return self
        if not self.num.terms:
            return o
        d1, d2 = self.den, o.den
        if d1 == d2:
            if d1.is_constant():
                return RatFun(self.num + o.num, d1, self.chart, _raw=True)
            return RatFun(self.num + o.num, d1)
        if len(d1.terms) == 1 and len(d2.terms) == 1:
            e1 = unpack(next(iter(d1.terms)), self.chart.nvars)
            e2 = unpack(next(iter(d2.terms)), self.chart.nvars)
            c1 = next(iter(d1.terms.values()))
            c2 = next(iter(d2.terms.values()))
            lcm = tuple(max(a, b) for a, b in zip(e1, e2))
            n1 = self.num.shift_up(tuple(l - a for l, a in zip(lcm, e1))).scale(1 / c1)
            n2 = o.num.shift_up(tuple(l - b for l, b in zip(lcm, e2))).scale(1 / c2)
            return RatFun(n1 + n2, MultiPoly.monomial(self.chart, lcm))
        return RatFun(self.num * d2 + o.num * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, self.chart, _raw=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if is_scalar_like(other):
            c = as_scalar(other)
            if not c:
                return RatFun.zero(self.chart)
            return RatFun(self.num.scale(c), self.den, self.chart, _raw=True)
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.num.terms or not o.num.terms:
            return RatFun.zero(self.chart)
        if self.den.is_constant() and o.den.is_constant():
            return RatFun(self.num * o.num, None, self.chart, _raw=True)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if not self.num.terms:
            raise ZeroDenominator("inverse of zero")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        if is_scalar_like(other):
            c = as_scalar(other)
            if not c:
                raise ZeroDenominator("division by zero")
            return self * (1 / c)
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise ValueError("integer powers only")
        if e < 0:
            return self.inverse() ** (-e)
        return RatFun(self.num ** e, self.den ** e, self.chart, _raw=True)

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, RatFun) else other
        if o is NotImplemented:
            return NotImplemented
        if o.chart != self.chart:
            return False
        if self.den == o.den:
            return self.num == o.num
        return self.num * o.den == o.num * self.den

    __hash__ = None

    # -- calculus ---------------------------------------------------------
    def diff(self, var) -> "RatFun":
        dn = self.num.diff(var)
        if self.den.is_constant():
            return RatFun(dn, self.den, self.chart, _raw=True)
        dd = self.den.diff(var)
        if not dd.terms:
            return RatFun(dn, self.den)
        return RatFun(dn * self.den - self.num * dd, self.den * self.den)

    # -- evaluation and substitution --------------------------------------
    def evaluate(self, values) -> mpq:
        d = self.den.evaluate(values)
        if not d:
            raise ZeroDenominator("denominator vanishes at the evaluation point")
        return self.num.evaluate(values) / d

    def partial_evaluate(self, values: dict) -> "RatFun":
        den = self.den.partial_evaluate(values)
        if not den.terms:
            raise ZeroDenominator("denominator vanishes identically after evaluation")
        return RatFun(self.num.partial_evaluate(values), den)

    def embed(self, target: Chart) -> "RatFun":
        if target == self.chart:
            return self
        return RatFun(self.num.embed(target), self.den.embed(target), target, _raw=True)

    def substitute(self, bindings: dict, target: Chart | None = None) -> "RatFun":
        """Compose with ``bindings`` (variable -> RatFun, MultiPoly or scalar).

        Unbound variables map to the same-named variable of ``target``.
        """
        if target is None:
            for im in bindings.values():
                if isinstance(im, (RatFun, MultiPoly)):
                    target = im.chart
                    break
            else:
                target = self.chart
        if all(not isinstance(im, RatFun) or im.den.is_constant() for im in bindings.values()):
            polys = {}
            for v, im in bindings.items():
                if isinstance(im, RatFun):
                    im = im.as_poly()
                polys[v] = im
            num = self.num.compose(polys, target)
            den = self.den.compose(polys, target)
            if not den.terms:
                raise ZeroDenominator("substitution sends the denominator to zero")
            return RatFun(num, den)
        imgs = {self.chart.index(v): RatFun.lift(im, target) for v, im in bindings.items()}
        num = _rational_compose(self.num, imgs, target)
        den = _rational_compose(self.den, imgs, target)
        if not den.num.terms:
            raise ZeroDenominator("substitution sends the denominator to zero")
        return num / den

    # -- display ----------------------------------------------------------
    def __repr__(self):
        return f"RatFun({self.chart.name}, {self})"

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        n = str(self.num)
        d = str(self.den)
        if len(self.num.terms) > 1:
            n = f"({n})"
        if len(self.den.terms) > 1 or any(ch in d for ch in "*/"):
            d = f"({d})"
        return f"{n}/{d}"


def _rational_compose(p: MultiPoly, imgs: dict, target: Chart) -> RatFun:
    n = p.chart.nvars
    vars_ = p.chart.variables
    cache: dict = {}
    total = RatFun.zero(target)
    for k, c in p.terms.items():
        e = unpack(k, n)
        t = RatFun.const(target, c)
        for i, x in enumerate(e):
            if not x:
                continue
            if i in imgs:
                f = cache.get((i, x))
                if f is None:
                    f = imgs[i] ** x
                    cache[(i, x)] = f
            else:
                f = RatFun(MultiPoly.var(target, vars_[i], x), None, target, _raw=True)
            t = t * f
        total = total + t
    return total


def as_ratfun(x, chart) -> RatFun:
    return RatFun.lift(x, chart)


__all__ = ["RatFun", "ZeroDenominator", "poly_gcd", "as_ratfun", "GCD_THRESHOLD", "NotDivisible"]
