"""The hyperoctahedral group B_n acting on the p-chart, its basic
invariants, and rewriting of invariant polynomials in those invariants.

Basic invariants are ``u_i = e_i(p_1^2, ..., p_n^2)``.  Rewriting works in
the squared variables ``q_i = p_i^2`` with the classical leading-term
elimination for symmetric polynomials.  Only coefficients of sorted
(partition) monomials are tracked; the coefficient of a monomial
``q^nu`` in a product of elementary symmetric polynomials is the number of
0-1 matrices with the matching row and column sums.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from .algebra import Chart, MultiPoly, RatFun
from .algebra.poly import pack, unpack
from .algebra.scalar import ZERO, as_scalar


class NotInvariant(ValueError):
    """Input to a rewrite is not B_n-invariant."""


class NotPolynomial(ValueError):
    """Input to a rewrite is a genuine rational function."""


# -- charts -------------------------------------------------------------------

@lru_cache(maxsize=None)
def p_chart(n: int, params: tuple = ()) -> Chart:
    _check_n(n)
    name = f"p{n}" + (f"[{','.join(params)}]" if params else "")
    return Chart(name, tuple(f"p{i}" for i in range(1, n + 1)), tuple(1 for _ in range(n)), params)


@lru_cache(maxsize=None)
def u_chart(n: int, params: tuple = ()) -> Chart:
    _check_n(n)
    name = f"u{n}" + (f"[{','.join(params)}]" if params else "")
    return Chart(name, tuple(f"u{i}" for i in range(1, n + 1)), tuple(2 * i for i in range(1, n + 1)), params)


@lru_cache(maxsize=None)
def t_chart(n: int, params: tuple = ()) -> Chart:
    _check_n(n)
    name = f"t{n}" + (f"[{','.join(params)}]" if params else "")
    return Chart(name, tuple(f"t{i}" for i in range(1, n + 1)), tuple(2 * i for i in range(1, n + 1)), params)


def _check_n(n):
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")


# -- invariants ---------------------------------------------------------------

def elementary_invariants(n: int, chart: Chart | None = None) -> list:
    """``[u_1, ..., u_n]`` as polynomials in the p-chart."""
    _check_n(n)
    ch = chart or p_chart(n)
    nv = ch.nvars
    out = []
    for k in range(1, n + 1):
        terms = {}
        for sub in combinations(range(n), k):
            e = [0] * nv
            for i in sub:
                e[i] = 2
            terms[pack(e, nv)] = as_scalar(1)
        out.append(MultiPoly(ch, terms))
    return out


def invariant_or_zero(us: list, k: int, chart: Chart):
    """``u_k`` with the conventions ``u_0 = 1`` and ``u_k = 0`` outside 0..n."""
    if k == 0:
        return MultiPoly.one(chart)
    if k < 0 or k > len(us):
        return MultiPoly.zero(chart)
    return us[k - 1]


# -- group ----------------------------------------------------------------------

@dataclass(frozen=True)
class SignedPermutation:
    """Acts on polynomials by ``p_i -> signs[i] * p_{perm[i]}``."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)) or len(self.signs) != n:
            raise ValueError("not a signed permutation")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def n(self):
        return len(self.perm)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)), (1,) * n)

    @classmethod
    def sign_flip(cls, n, j):
        """Reflection in the hyperplane ``p_j = 0`` (0-based ``j``)."""
        s = [1] * n
        s[j] = -1
        return cls(tuple(range(n)), tuple(s))

    @classmethod
    def swap(cls, n, i, j, sign=1):
        """Reflection in ``p_i - p_j = 0`` (``sign=1``) or ``p_i + p_j = 0``."""
        perm = list(range(n))
        perm[i], perm[j] = j, i
        s = [1] * n
        if sign == -1:
            s[i] = s[j] = -1
        return cls(tuple(perm), tuple(s))

    def then(self, other: "SignedPermutation") -> "SignedPermutation":
        """Substitution by ``self`` followed by ``other``."""
        # p_i -> s_i p_{a(i)} -> s_i t_{a(i)} p_{b(a(i))}
        perm = tuple(other.perm[self.perm[i]] for i in range(self.n))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(self.n))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        perm = [0] * self.n
        signs = [1] * self.n
        for i, j in enumerate(self.perm):
            perm[j] = i
            signs[j] = self.signs[i]
        return SignedPermutation(tuple(perm), tuple(signs))


def generators(n: int) -> list:
    """``A_{p_1}`` and the adjacent transpositions ``A_{p_i - p_{i+1}}``."""
    return [SignedPermutation.sign_flip(n, 0)] + [SignedPermutation.swap(n, i, i + 1) for i in range(n - 1)]


def all_reflections(n: int) -> list:
    out = [SignedPermutation.sign_flip(n, j) for j in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out.append(SignedPermutation.swap(n, i, j))
            out.append(SignedPermutation.swap(n, i, j, -1))
    return out


def random_element(n: int, rng: random.Random) -> SignedPermutation:
    perm = list(range(n))
    rng.shuffle(perm)
    return SignedPermutation(tuple(perm), tuple(rng.choice((1, -1)) for _ in range(n)))


def _apply_poly(f: MultiPoly, g: SignedPermutation) -> MultiPoly:
    ch = f.chart
    n = g.n
    if ch.dim < n:
        raise ValueError("group element acts on more coordinates than the chart has")
    nv = ch.nvars
    out = {}
    for k, c in f.terms.items():
        e = unpack(k, nv)
        new = list(e)
        sign = 1
        for i in range(n):
            new[i] = 0
        for i in range(n):
            x = e[i]
            new[g.perm[i]] += x
            if g.signs[i] < 0 and x & 1:
                sign = -sign
        out[pack(new, nv)] = c if sign > 0 else -c
    return MultiPoly(ch, out)


def apply_group(f, g: SignedPermutation):
    """Image of ``f`` (MultiPoly or RatFun in a p-chart) under ``g``."""
    if isinstance(f, MultiPoly):
        return _apply_poly(f, g)
    if isinstance(f, RatFun):
        return RatFun(_apply_poly(f.num, g), _apply_poly(f.den, g))
    raise TypeError("expected a MultiPoly or RatFun")


def is_invariant(f, n: int) -> bool:
    """Invariance under the generators ``A_{p_1}``, ``A_{p_i - p_{i+1}}``."""
    if isinstance(f, MultiPoly):
        f = RatFun.lift(f, f.chart)
    return all(apply_group(f, g) == f for g in generators(n))


# -- symmetric reduction ----------------------------------------------------------

@lru_cache(maxsize=None)
def _count01(rows: tuple, cols: tuple) -> int:
    """Number of 0-1 matrices with row sums ``rows`` and column sums ``cols``.

    ``rows`` is sorted descending without zeros; ``cols`` is any tuple.
    """
    if not cols:
        return 1 if not rows else 0
    if sum(rows) != sum(cols):
        return 0
    if rows and rows[0] > len(cols):
        return 0
    need = cols[0]
    rest = cols[1:]
    groups = {}
    for r in rows:
        groups[r] = groups.get(r, 0) + 1
    values = sorted(groups, reverse=True)
    total = 0

    def rec(i, left, chosen):
        nonlocal total
        if i == len(values):
            if left:
                return
            ways = 1
            new_rows = []
            for v, x in zip(values, chosen):
                ways *= comb(groups[v], x)
                new_rows.extend([v - 1] * x)
                new_rows.extend([v] * (groups[v] - x))
            nr = tuple(sorted((r for r in new_rows if r), reverse=True))
            total += ways * _count01(nr, rest)
            return
        v = values[i]
        for x in range(min(groups[v], left) + 1):
            rec(i + 1, left - x, chosen + [x])

    rec(0, need, [])
    return total


@lru_cache(maxsize=None)
def _partitions(total: int, parts: int, maxpart: int) -> tuple:
    """Partitions of ``total`` into at most ``parts`` parts each <= ``maxpart``
    (padded with zeros to length ``parts``)."""
    out = []

    def rec(rem, k, cap, cur):
        if rem == 0:
            out.append(tuple(cur) + (0,) * (parts - len(cur)))
            return
        if k == 0:
            return
        for x in range(min(rem, cap), 0, -1):
            if x * k < rem:
                break
            rec(rem - x, k - 1, x, cur + [x])

    rec(total, parts, maxpart, [])
    return tuple(out)


def _dominated(nu, lam) -> bool:
    a = b = 0
    for x, y in zip(nu, lam):
        a += x
        b += y
        if a > b:
            return False
    return True


@lru_cache(maxsize=None)
def _elementary_expansion(lam: tuple) -> tuple:
    """Coefficients of sorted monomials in ``prod_k e_k^{lam_k - lam_{k+1}}``.

    Returns ``((nu, count), ...)`` over partitions ``nu`` dominated by ``lam``.
    """
    n = len(lam)
    rows = []
    for k in range(n):
        b = lam[k] - (lam[k + 1] if k + 1 < n else 0)
        rows.extend([k + 1] * b)
    rows = tuple(sorted(rows, reverse=True))
    total = sum(lam)
    out = []
    for nu in _partitions(total, n, lam[0] if lam else 0):
        if not _dominated(nu, lam):
            continue
        c = _count01(rows, nu)
        if c:
            out.append((nu, c))
    return tuple(out)


def symmetric_reduce(partition_coeffs: dict, n: int) -> dict:
    """Express a symmetric polynomial, given by its coefficients on sorted
    monomials ``q^lam``, in elementary symmetric polynomials.

    Returns ``{b: coeff}`` meaning ``sum coeff * prod e_k^{b_k}``.
    """
    f = {k: as_scalar(v) for k, v in partition_coeffs.items() if v}
    out = {}
    while f:
        lam = max(f)
        c = f[lam]
        b = tuple(lam[k] - (lam[k + 1] if k + 1 < n else 0) for k in range(n))
        out[b] = out.get(b, ZERO) + c
        for nu, cnt in _elementary_expansion(lam):
            v = f.get(nu, ZERO) - c * cnt
            if v:
                f[nu] = v
            else:
                f.pop(nu, None)
    return {b: c for b, c in out.items() if c}


def _as_polynomial(f) -> MultiPoly:
    if isinstance(f, MultiPoly):
        return f
    if isinstance(f, RatFun):
        if not f.den.is_constant():
            r = f.reduced()
            if not r.den.is_constant():
                raise NotPolynomial(f"not a polynomial: {f}")
            return r.as_poly()
        return f.as_poly()
    raise TypeError("expected a MultiPoly or RatFun")


def check_invariant_exponents(f: MultiPoly, n: int):
    """Raise :class:`NotInvariant` unless ``f`` is even in each of the first
    ``n`` coordinates and symmetric under their permutations."""
    nv = f.chart.nvars
    data = {unpack(k, nv): c for k, c in f.terms.items()}
    for e, c in data.items():
        if any(x & 1 for x in e[:n]):
            raise NotInvariant("odd exponent: not invariant under sign changes")
        for i in range(n - 1):
            if e[i] != e[i + 1]:
                s = list(e)
                s[i], s[i + 1] = s[i + 1], s[i]
                if data.get(tuple(s)) != c:
                    raise NotInvariant("not symmetric under permutations of the coordinates")


def rewrite_in_u(f, n: int, target: Chart | None = None, check: bool = True) -> MultiPoly:
    """The unique polynomial ``q(u_1..u_n)`` with ``q(u(p)) = f``.

    ``f`` may carry extra chart parameters after the ``n`` coordinates;
    they are copied to ``target`` (default: the u-chart with the same
    parameters).
    """
    f = _as_polynomial(f)
    src = f.chart
    if src.dim != n:
        raise ValueError("the p-chart dimension must equal n")
    target = target or u_chart(n, src.params)
    if check:
        check_invariant_exponents(f, n)
    nv = src.nvars
    groups: dict = {}
    for k, c in f.terms.items():
        e = unpack(k, nv)
        q = tuple(x // 2 for x in e[:n])
        if all(q[i] >= q[i + 1] for i in range(n - 1)):
            groups.setdefault(e[n:], {})[q] = c
    tv = target.nvars
    extra = [target.index(v) for v in src.params]
    terms = {}
    for par, part in groups.items():
        for b, c in symmetric_reduce(part, n).items():
            e = [0] * tv
            e[:n] = b
            for j, x in zip(extra, par):
                e[j] = x
            terms[pack(e, tv)] = c
    return MultiPoly(target, terms)


def u_to_p(f, n: int, target: Chart | None = None):
    """Substitute ``u_i -> e_i(p^2)`` (MultiPoly or RatFun in a u-chart)."""
    src = f.chart
    target = target or p_chart(n, src.params)
    us = elementary_invariants(n, target)
    bind = {f"u{i + 1}": us[i] for i in range(n)}
    if isinstance(f, MultiPoly):
        return f.compose(bind, target)
    return f.substitute(bind, target)


@dataclass
class InvariantBasis:
    """A basis of invariants other than the elementary one.

    ``polys`` are the basis elements in a p-chart; ``from_elementary[k]``
    expresses ``e_{k+1}(p^2)`` as a polynomial in ``chart``.
    """

    n: int
    chart: Chart
    polys: list
    from_elementary: list

    def rewrite(self, f, check=True) -> MultiPoly:
        q = rewrite_in_u(f, self.n, check=check)
        bind = {f"u{i + 1}": self.from_elementary[i] for i in range(self.n)}
        return q.compose(bind, self.chart)

    def to_p(self, f):
        bind = {v: self.polys[i] for i, v in enumerate(self.chart.coords)}
        pch = self.polys[0].chart
        if isinstance(f, MultiPoly):
            return f.compose(bind, pch)
        return f.substitute(bind, pch)


def standard_basis(n: int, params: tuple = ()) -> InvariantBasis:
    uch = u_chart(n, params)
    return InvariantBasis(n, uch, elementary_invariants(n, p_chart(n, params)),
                          [MultiPoly.var(uch, f"u{i}") for i in range(1, n + 1)])
