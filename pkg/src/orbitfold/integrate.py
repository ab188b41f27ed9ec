"""Potentials of closed forms: a radial homotopy for polynomials and a
sequential integrator for expressions polynomial in ``t_1..t_{n-1}``,
Laurent in ``t_n`` and polynomial in ``log t_n``."""

from __future__ import annotations

from .algebra import MultiPoly, RatFun
from .algebra.scalar import ZERO, as_scalar, scalar_str


class IntegrabilityError(ArithmeticError):
    """The form to integrate is not closed or has an unsupported shape."""


def radial_potential(omega, chart) -> MultiPoly:
    """Potential vanishing at the origin of the closed polynomial one-form
    ``sum omega_v dt_v``.  Each monomial of coordinate degree ``m`` in
    ``t_v * omega_v`` picks up the factor ``1/m``; chart parameters are
    constants."""
    dim = chart.dim
    out = MultiPoly.zero(chart)
    for v, w in zip(chart.coords, omega):
        if not w:
            continue
        f = MultiPoly.var(chart, v) * w
        terms = {}
        for exps, coeff in f.items():
            terms[exps] = coeff / sum(exps[:dim])
        out = out + MultiPoly.from_dict(chart, terms)
    return out


class LogLaurent:
    """Finite sum ``c * t^a * log(t_n)^k`` with the exponent of ``t_n`` allowed
    to be negative.  Keys are ``(exponents, k)``."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart, terms=None):
        self.chart = chart
        self.terms = {k: as_scalar(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def zero(cls, chart):
        return cls(chart)

    @classmethod
    def from_poly(cls, f: MultiPoly):
        return cls(f.chart, {(e, 0): c for e, c in f.items()})

    @classmethod
    def lift(cls, f, chart=None):
        if isinstance(f, LogLaurent):
            return f
        if isinstance(f, MultiPoly):
            return cls.from_poly(f)
        if isinstance(f, RatFun):
            return cls.from_ratfun(f)
        return cls(chart, {((0,) * chart.nvars, 0): f})

    @classmethod
    def from_ratfun(cls, f: RatFun):
        ch = f.chart
        last = ch.dim - 1
        den = f.den
        if len(den.terms) != 1:
            f = f.reduced()
            den = f.den
        if len(den.terms) != 1:
            raise IntegrabilityError("denominator is not a monomial")
        (de, dc), = den.items()
        if any(x for i, x in enumerate(de) if i != last):
            raise IntegrabilityError("denominator involves variables other than the last coordinate")
        out = {}
        for e, c in f.num.items():
            e = list(e)
            e[last] -= de[last]
            out[(tuple(e), 0)] = c / dc
        return cls(ch, out)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LogLaurent):
            other = LogLaurent.lift(other, self.chart)
        return self.chart == other.chart and self.terms == other.terms

    __hash__ = None

    def __add__(self, other):
        other = LogLaurent.lift(other, self.chart)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return LogLaurent(self.chart, out)

    def __neg__(self):
        return LogLaurent(self.chart, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-LogLaurent.lift(other, self.chart))

    def __mul__(self, other):
        if not isinstance(other, (LogLaurent, MultiPoly, RatFun)):
            c = as_scalar(other)
            return LogLaurent(self.chart, {k: v * c for k, v in self.terms.items()})
        other = LogLaurent.lift(other, self.chart)
        out = {}
        for (e1, k1), c1 in self.terms.items():
            for (e2, k2), c2 in other.terms.items():
                key = (tuple(a + b for a, b in zip(e1, e2)), k1 + k2)
                out[key] = out.get(key, ZERO) + c1 * c2
        return LogLaurent(self.chart, out)

    __rmul__ = __mul__

    def has_log(self) -> bool:
        return any(k for (_, k) in self.terms)

    def diff(self, var) -> "LogLaurent":
        i = self.chart.index(var)
        last = self.chart.dim - 1
        out = {}
        for (e, k), c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                key = (tuple(ne), k)
                out[key] = out.get(key, ZERO) + c * e[i]
            if i == last and k:
                ne = list(e)
                ne[i] -= 1
                key = (tuple(ne), k - 1)
                out[key] = out.get(key, ZERO) + c * k
        return LogLaurent(self.chart, out)

    def integrate(self, var) -> "LogLaurent":
        """Antiderivative in ``var`` with zero integration constant."""
        i = self.chart.index(var)
        last = self.chart.dim - 1
        out = LogLaurent.zero(self.chart)
        for (e, k), c in self.terms.items():
            if i != last:
                ne = list(e)
                ne[i] += 1
                out = out + LogLaurent(self.chart, {(tuple(ne), k): c / ne[i]})
            else:
                out = out + _integrate_log_power(self.chart, e, k, c, i)
        return out

    def depends_on(self, var) -> bool:
        i = self.chart.index(var)
        last = self.chart.dim - 1
        return any(e[i] or (i == last and k) for (e, k) in self.terms)

    def to_ratfun(self) -> RatFun:
        if self.has_log():
            raise ValueError("expression contains log terms")
        ch = self.chart
        last = ch.dim - 1
        shift = max([0] + [-e[last] for (e, _) in self.terms])
        num = {}
        for (e, _), c in self.terms.items():
            ne = list(e)
            ne[last] += shift
            num[tuple(ne)] = c
        den = [0] * ch.nvars
        den[last] = shift
        return RatFun(MultiPoly.from_dict(ch, num), MultiPoly.monomial(ch, den))

    def __str__(self):
        if not self.terms:
            return "0"
        ch = self.chart
        parts = []
        for (e, k), c in sorted(self.terms.items(), reverse=True):
            factors = [f"{v}^{x}" if x != 1 else v for v, x in zip(ch.variables, e) if x]
            if k:
                lg = f"log({ch.coords[-1]})"
                factors.append(lg if k == 1 else f"{lg}^{k}")
            mono = "*".join(factors)
            coeff = scalar_str(c)
            if not mono:
                parts.append(coeff)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _integrate_log_power(chart, e, k, c, i):
    """``int t^m log(t)^k dt`` in the variable at position ``i``."""
    m = e[i]
    if m == -1:
        ne = list(e)
        ne[i] = 0
        return LogLaurent(chart, {(tuple(ne), k + 1): c / (k + 1)})
    ne = list(e)
    ne[i] = m + 1
    first = LogLaurent(chart, {(tuple(ne), k): c / (m + 1)})
    if not k:
        return first
    # int t^m log^k = t^(m+1) log^k/(m+1) - k/(m+1) int t^m log^(k-1)
    return first - _integrate_log_power(chart, e, k - 1, c * k / (m + 1), i)


def sequential_potential(omega, chart) -> LogLaurent:
    """``f`` with ``df = sum omega_j dt_j`` and no additive constant."""
    om = [LogLaurent.lift(w, chart) for w in omega]
    f = LogLaurent.zero(chart)
    for j, v in enumerate(chart.coords):
        r = om[j] - f.diff(v)
        for earlier in chart.coords[:j]:
            if r.depends_on(earlier):
                raise IntegrabilityError("one-form is not closed")
        f = f + r.integrate(v)
    for j, v in enumerate(chart.coords):
        if f.diff(v) != om[j]:
            raise IntegrabilityError("one-form is not closed")
    return f


__all__ = ["radial_potential", "LogLaurent", "sequential_potential", "IntegrabilityError"]
