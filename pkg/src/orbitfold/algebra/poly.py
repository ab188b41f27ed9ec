"""Sparse multivariate polynomials over the rationals.

A monomial is stored as one packed integer.  For a chart with ``N``
variables, variable ``i`` occupies 16 bits at offset ``16*(N-1-i)`` and the
total degree sits above all of them.  Two consequences:

* multiplying monomials is integer addition of keys;
* comparing keys as integers is graded-lex order (total degree first,
  then lexicographic with the first variable most significant).

Exponents are guarded below ``2**15`` so fields never carry into each other.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as _iproduct

from gmpy2 import mpq, mpz

from . import kernels as _K
from .chart import Chart
from .scalar import ONE, ZERO, Scalar, as_scalar, is_scalar_like, scalar_str

BITS = 16
MASK = (1 << BITS) - 1
MAX_DEGREE = (1 << (BITS - 1)) - 1


class ChartMismatch(ValueError):
    """Operands live in different charts."""


class NotDivisible(ArithmeticError):
    """Exact division left a remainder."""


@lru_cache(maxsize=None)
def _layout(nvars: int):
    shifts = tuple(BITS * (nvars - 1 - i) for i in range(nvars))
    return shifts, BITS * nvars


def pack(exps, nvars=None) -> int:
    nvars = len(exps) if nvars is None else nvars
    shifts, dshift = _layout(nvars)
    key = 0
    deg = 0
    for e, s in zip(exps, shifts):
        if e < 0:
            raise ValueError("negative exponent")
        key |= e << s
        deg += e
    if deg > MAX_DEGREE:
        raise OverflowError("total degree exceeds the packed-key limit")
    return key | (deg << dshift)


def unpack(key: int, nvars: int) -> tuple:
    shifts, _ = _layout(nvars)
    return tuple((key >> s) & MASK for s in shifts)


def key_degree(key: int, nvars: int) -> int:
    return key >> (BITS * nvars)


class MultiPoly:
    """Immutable sparse polynomial attached to a :class:`Chart`."""

    __slots__ = ("chart", "terms", "_deg", "_hash")

    def __init__(self, chart: Chart, terms: dict | None = None):
        self.chart = chart
        self.terms = terms if terms is not None else {}
        self._deg = None
        self._hash = None

    # -- construction ---------------------------------------------------
    @classmethod
    def zero(cls, chart):
        return cls(chart, {})

    @classmethod
    def const(cls, chart, c):
        c = as_scalar(c)
        return cls(chart, {pack((0,) * chart.nvars): c} if c else {})

    @classmethod
    def one(cls, chart):
        return cls.const(chart, 1)

    @classmethod
    def var(cls, chart, name, power=1):
        i = chart.index(name)
        exps = [0] * chart.nvars
        exps[i] = power
        return cls(chart, {pack(exps): ONE})

    @classmethod
    def monomial(cls, chart, exps, coeff=1):
        if len(exps) != chart.nvars:
            raise ValueError("exponent vector length must equal the number of chart variables")
        c = as_scalar(coeff)
        return cls(chart, {pack(tuple(exps)): c} if c else {})

    @classmethod
    def from_dict(cls, chart, data: dict):
        """Build from ``{exponent tuple: coefficient}``."""
        terms: dict = {}
        n = chart.nvars
        for exps, c in data.items():
            if len(exps) != n:
                raise ValueError("exponent vector length must equal the number of chart variables")
            c = as_scalar(c)
            if not c:
                continue
            k = pack(tuple(exps), n)
            v = terms.get(k, ZERO) + c
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        return cls(chart, terms)

    # -- basic queries ----------------------------------------------------
    def __len__(self):
        return len(self.terms)

    @property
    def nterms(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if self._deg is None:
            self._deg = key_degree(max(self.terms), self.chart.nvars) if self.terms else -1
        return self._deg

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values())) if self.terms else ZERO

    def constant_term(self) -> mpq:
        return self.terms.get(0, ZERO) if self.chart.nvars else self.terms.get(0, ZERO)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def exponents(self, key) -> tuple:
        return unpack(key, self.chart.nvars)

    def items(self):
        """``(exponent tuple, coefficient)`` pairs in descending graded-lex order."""
        n = self.chart.nvars
        for k in sorted(self.terms, reverse=True):
            yield unpack(k, n), self.terms[k]

    def as_dict(self) -> dict:
        n = self.chart.nvars
        return {unpack(k, n): c for k, c in self.terms.items()}

    def leading_term(self):
        k = max(self.terms)
        return k, self.terms[k]

    def coefficient(self, exps) -> mpq:
        return self.terms.get(pack(tuple(exps), self.chart.nvars), ZERO)

    def degree_in(self, var) -> int:
        i = self.chart.index(var)
        if not self.terms:
            return -1
        s = _layout(self.chart.nvars)[0][i]
        return max((k >> s) & MASK for k in self.terms)

    def variables_used(self) -> set:
        n = self.chart.nvars
        used = set()
        for k in self.terms:
            e = unpack(k, n)
            used.update(i for i, x in enumerate(e) if x)
        return {self.chart.variables[i] for i in used}

    def weighted_degrees(self) -> set:
        """Set of weighted degrees of the terms (parameters weigh zero)."""
        w = self.chart.weights
        d = self.chart.dim
        out = set()
        for k in self.terms:
            e = unpack(k, self.chart.nvars)
            out.add(sum((w[i] * e[i] for i in range(d)), ZERO))
        return out

    def is_homogeneous(self) -> bool:
        return len(self.weighted_degrees()) <= 1

    def weighted_degree(self):
        degs = self.weighted_degrees()
        if len(degs) > 1:
            raise ValueError("polynomial is not weighted-homogeneous")
        return next(iter(degs)) if degs else None

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.chart != self.chart:
                raise ChartMismatch(f"{self.chart.name!r} vs {other.chart.name!r}")
            return other
        if is_scalar_like(other):
            return MultiPoly.const(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        return MultiPoly(self.chart, _K.add_terms(self.terms, o.terms))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.chart, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.terms:
            return self
        return MultiPoly(self.chart, _K.add_terms(self.terms, o.terms, mpq(-1)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def scale(self, c) -> "MultiPoly":
        c = as_scalar(c)
        if not c:
            return MultiPoly(self.chart, {})
        if c == 1:
            return self
        return MultiPoly(self.chart, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if is_scalar_like(other):
            return self.scale(other)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.terms or not o.terms:
            return MultiPoly(self.chart, {})
        if self.degree() + o.degree() > MAX_DEGREE:
            raise OverflowError("product degree exceeds the packed-key limit")
        if len(o.terms) == 1:
            (kb, cb), = o.terms.items()
            return MultiPoly(self.chart, {k + kb: c * cb for k, c in self.terms.items()})
        if len(self.terms) == 1:
            (ka, ca), = self.terms.items()
            return MultiPoly(self.chart, {k + ka: c * ca for k, c in o.terms.items()})
        return MultiPoly(self.chart, _K.mul_terms(self.terms, o.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_scalar_like(other):
            c = as_scalar(other)
            if not c:
                raise ZeroDivisionError("division by zero scalar")
            return self.scale(1 / c)
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.one(self.chart)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.chart == other.chart and self.terms == other.terms
        if is_scalar_like(other):
            c = as_scalar(other)
            if not c:
                return not self.terms
            return len(self.terms) == 1 and self.terms.get(0) == c
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self.terms.items())))
        return self._hash

    # -- calculus ---------------------------------------------------------
    def diff(self, var) -> "MultiPoly":
        i = self.chart.index(var)
        n = self.chart.nvars
        shifts, dshift = _layout(n)
        s = shifts[i]
        step = (1 << s) + (1 << dshift)
        out = {}
        for k, c in self.terms.items():
            e = (k >> s) & MASK
            if e:
                out[k - step] = c * e
        return MultiPoly(self.chart, out)

    # -- evaluation and composition ----------------------------------------
    def evaluate(self, values) -> mpq:
        """Evaluate at a full point (sequence or mapping by name)."""
        n = self.chart.nvars
        if isinstance(values, dict):
            vals = [as_scalar(values[v]) for v in self.chart.variables]
        else:
            vals = [as_scalar(v) for v in values]
            if len(vals) != n:
                raise ValueError("point has the wrong number of coordinates")
        total = ZERO
        cache: dict = {}
        for k, c in self.terms.items():
            e = unpack(k, n)
            t = c
            for i, x in enumerate(e):
                if x:
                    p = cache.get((i, x))
                    if p is None:
                        p = vals[i] ** x
                        cache[(i, x)] = p
                    t = t * p
            total += t
        return total

    def partial_evaluate(self, values: dict) -> "MultiPoly":
        """Set some variables to scalars; the chart is unchanged."""
        n = self.chart.nvars
        shifts, dshift = _layout(n)
        idx = [(self.chart.index(v), as_scalar(x)) for v, x in values.items()]
        out: dict = {}
        for k, c in self.terms.items():
            for i, x in idx:
                e = (k >> shifts[i]) & MASK
                if e:
                    c = c * x ** e
                    k = k - (e << shifts[i]) - (e << dshift)
            if c:
                v = out.get(k, ZERO) + c
                if v:
                    out[k] = v
                else:
                    out.pop(k)
        return MultiPoly(self.chart, out)

    def embed(self, target: Chart) -> "MultiPoly":
        """Re-express in a chart that contains every used variable by name."""
        if target == self.chart:
            return self
        n = self.chart.nvars
        m = target.nvars
        pos = []
        for v in self.chart.variables:
            pos.append(target._index.get(v))
        out = {}
        for k, c in self.terms.items():
            e = unpack(k, n)
            new = [0] * m
            for i, x in enumerate(e):
                if x:
                    j = pos[i]
                    if j is None:
                        raise ChartMismatch(
                            f"variable {self.chart.variables[i]!r} missing from chart {target.name!r}")
                    new[j] = x
            out[pack(new, m)] = c
        return MultiPoly(target, out)

    def compose(self, images: dict, target: Chart | None = None) -> "MultiPoly":
        """Substitute polynomials for variables.

        ``images`` maps variable names (or indices) to :class:`MultiPoly`
        in ``target``.  Unbound variables map to the same-named variable of
        ``target``.
        """
        if target is None:
            imgs = [im for im in images.values() if isinstance(im, MultiPoly)]
            target = imgs[0].chart if imgs else self.chart
        bound = {}
        for v, im in images.items():
            i = self.chart.index(v)
            if is_scalar_like(im):
                im = MultiPoly.const(target, im)
            if not isinstance(im, MultiPoly):
                raise TypeError("polynomial images are required; use RatFun.substitute for rational ones")
            if im.chart != target:
                raise ChartMismatch("all images must share the target chart")
            bound[i] = im
        n = self.chart.nvars
        img = []
        for i, v in enumerate(self.chart.variables):
            if i in bound:
                img.append(bound[i])
            elif v in target._index:
                img.append(MultiPoly.var(target, v))
            else:
                img.append(None)
        rows = [(unpack(k, n), c) for k, c in self.terms.items()]
        for e, _ in rows:
            for i, x in enumerate(e):
                if x and img[i] is None:
                    raise ChartMismatch(f"no image for variable {self.chart.variables[i]!r}")
        return _horner(rows, 0, img, target)

    # -- division ---------------------------------------------------------
    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Exact quotient; raises :class:`NotDivisible` otherwise."""
        q, r = self.divmod(other)
        if r.terms:
            raise NotDivisible("polynomial division is not exact")
        return q

    def divides(self, other: "MultiPoly") -> bool:
        """True if ``self`` divides ``other``."""
        _, r = other.divmod(self, stop_early=True)
        return not r.terms

    def divmod(self, other: "MultiPoly", stop_early=False):
        """Graded-lex division by a single divisor.

        Only leading terms are reduced, so for non-exact division the
        remainder is not canonical; with ``stop_early`` the loop ends at the
        first irreducible leading term.
        """
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        n = self.chart.nvars
        shifts, _ = _layout(n)
        kb, cb = other.leading_term()
        eb = unpack(kb, n)
        inv = 1 / cb
        rest = {k: c for k, c in other.terms.items() if k != kb}
        rem = dict(self.terms)
        quo = {}
        out_rem = {}
        while rem:
            k = max(rem)
            c = rem[k]
            ek = unpack(k, n)
            if all(a >= b for a, b in zip(ek, eb)):
                qk = k - kb
                qc = c * inv
                quo[qk] = qc
                del rem[k]
                get = rem.get
                for k2, c2 in rest.items():
                    kk = qk + k2
                    v = get(kk, ZERO) - qc * c2
                    if v:
                        rem[kk] = v
                    else:
                        rem.pop(kk, None)
            else:
                if stop_early:
                    out_rem.update(rem)
                    break
                out_rem[k] = c
                del rem[k]
        return MultiPoly(self.chart, quo), MultiPoly(self.chart, out_rem)

    # -- content ----------------------------------------------------------
    def monomial_content(self) -> tuple:
        """Componentwise minimum exponent vector."""
        n = self.chart.nvars
        if not self.terms:
            return (0,) * n
        it = iter(self.terms)
        m = list(unpack(next(it), n))
        for k in it:
            e = unpack(k, n)
            for i in range(n):
                if e[i] < m[i]:
                    m[i] = e[i]
        return tuple(m)

    def shift_down(self, exps) -> "MultiPoly":
        """Divide by the monomial with exponent vector ``exps``."""
        if not any(exps):
            return self
        d = pack(tuple(exps), self.chart.nvars)
        return MultiPoly(self.chart, {k - d: c for k, c in self.terms.items()})

    def shift_up(self, exps) -> "MultiPoly":
        if not any(exps):
            return self
        d = pack(tuple(exps), self.chart.nvars)
        return MultiPoly(self.chart, {k + d: c for k, c in self.terms.items()})

    def integer_content(self):
        """Return ``(c, p)`` with ``self == c*p`` and ``p`` primitive integral,
        leading coefficient positive."""
        if not self.terms:
            return ZERO, self
        from gmpy2 import gcd, lcm
        num = mpz(0)
        den = mpz(1)
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        content = mpq(num, den)
        if self.leading_term()[1] < 0:
            content = -content
        return content, self.scale(1 / content)

    def map_coefficients(self, f) -> "MultiPoly":
        out = {}
        for k, c in self.terms.items():
            v = as_scalar(f(c))
            if v:
                out[k] = v
        return MultiPoly(self.chart, out)

    def coefficients_in(self, vars) -> dict:
        """Split by exponents of ``vars``: returns ``{exps: MultiPoly}`` where
        each value no longer involves ``vars``."""
        n = self.chart.nvars
        shifts, dshift = _layout(n)
        idx = [self.chart.index(v) for v in vars]
        out: dict = {}
        for k, c in self.terms.items():
            e = tuple((k >> shifts[i]) & MASK for i in idx)
            kk = k
            for i, x in zip(idx, e):
                if x:
                    kk -= (x << shifts[i]) + (x << dshift)
            out.setdefault(e, {})[kk] = c
        return {e: MultiPoly(self.chart, t) for e, t in out.items()}

    # -- display ----------------------------------------------------------
    def __repr__(self):
        return f"MultiPoly({self.chart.name}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.chart.variables
        parts = []
        for e, c in self.items():
            mono = "*".join(
                names[i] if x == 1 else f"{names[i]}^{x}" for i, x in enumerate(e) if x)
            if not mono:
                s = scalar_str(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{scalar_str(abs(c))}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + s)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[1:]


def _horner(rows, i, img, target):
    """Substitute variables ``i..`` by Horner's scheme on variable ``i``."""
    if not rows:
        return MultiPoly(target, {})
    n = len(img)
    while i < n and all(e[i] == 0 for e, _ in rows):
        i += 1
    if i == n:
        total = sum((c for _, c in rows), ZERO)
        return MultiPoly.const(target, total)
    groups: dict = {}
    for e, c in rows:
        groups.setdefault(e[i], []).append((e, c))
    top = max(groups)
    base = img[i]
    acc = MultiPoly(target, {})
    for d in range(top, -1, -1):
        if d != top:
            acc = acc * base
        g = groups.get(d)
        if g:
            acc = acc + _horner(g, i + 1, img, target)
    return acc


def monomials_of_weight(weights, total, upto=None):
    """Exponent vectors ``e`` with ``sum(w_i e_i) == total`` using the first
    ``upto`` variables (all if ``None``), in descending lexicographic order."""
    weights = [as_scalar(w) for w in weights]
    m = len(weights) if upto is None else upto
    total = as_scalar(total)
    out = []

    def rec(i, rem, cur):
        if i < 0:
            if rem == 0:
                out.append(tuple(cur))
            return
        w = weights[i]
        k = 0
        while k * w <= rem:
            cur[i] = k
            rec(i - 1, rem - k * w, cur)
            k += 1
        cur[i] = 0

    if total < 0:
        return []
    rec(m - 1, total, [0] * len(weights))
    out.sort(reverse=True)
    return out
