"""Tensor fields with rational-function components, and the differential
geometry built on them: Jacobians, pushforwards, Christoffel symbols
(covariant and contravariant), curvature and Lie derivatives.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from .algebra import Chart, ExactMatrix, MultiPoly, RatFun, SingularMatrix
from .algebra import kernels as _K
from .algebra.scalar import ZERO, as_scalar
from .invariants import InvariantBasis, standard_basis


class DegeneratePoint(ValueError):
    """Evaluation point lies on an excluded locus."""


def _lift(x, chart):
    return RatFun.lift(x, chart)


def dot(left, right, chart) -> RatFun:
    """``sum(left[i] * right[i])`` with a fast path for polynomials."""
    pairs = [(a, b) for a, b in zip(left, right) if a and b]
    if not pairs:
        return RatFun.zero(chart)
    if all(a.den.is_constant() and b.den.is_constant()
           and a.den.constant_value() == 1 and b.den.constant_value() == 1 for a, b in pairs):
        terms = _K.dot_terms([a.num.terms for a, _ in pairs], [b.num.terms for _, b in pairs])
        return RatFun(MultiPoly(chart, terms), None, chart, _raw=True)
    acc = RatFun.zero(chart)
    for a, b in pairs:
        acc = acc + a * b
    return acc


class TensorField:
    """``(up, down)`` tensor on a chart; components keyed by index tuples
    (contravariant indices first).  Missing keys are zero."""

    __slots__ = ("chart", "up", "down", "comps")

    def __init__(self, chart: Chart, up: int, down: int, comps: dict | None = None):
        self.chart = chart
        self.up = up
        self.down = down
        self.comps = {}
        dim = chart.dim
        for idx, v in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != up + down or any(not 0 <= i < dim for i in idx):
                raise IndexError(f"bad index {idx} for a ({up},{down}) tensor in dimension {dim}")
            v = _lift(v, chart)
            if v:
                self.comps[idx] = v

    @property
    def dim(self):
        return self.chart.dim

    @property
    def rank(self):
        return self.up + self.down

    @classmethod
    def from_function(cls, chart, up, down, f):
        dim = chart.dim
        return cls(chart, up, down, {idx: f(*idx) for idx in product(range(dim), repeat=up + down)})

    @classmethod
    def from_matrix(cls, chart, M, up=2, down=0):
        rows = M.entries if isinstance(M, ExactMatrix) else M
        return cls(chart, up, down, {(i, j): rows[i][j] for i in range(len(rows)) for j in range(len(rows))})

    @classmethod
    def vector(cls, chart, comps):
        return cls(chart, 1, 0, {(i,): c for i, c in enumerate(comps)})

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        v = self.comps.get(idx)
        return v if v is not None else RatFun.zero(self.chart)

    def indices(self):
        return product(range(self.dim), repeat=self.rank)

    def items(self):
        return sorted(self.comps.items())

    def is_zero(self) -> bool:
        return not self.comps

    def nonzero(self):
        return [idx for idx, v in sorted(self.comps.items()) if v]

    def map(self, f) -> "TensorField":
        return TensorField(self.chart, self.up, self.down, {k: f(v) for k, v in self.comps.items()})

    def __add__(self, o):
        self._same(o)
        out = dict(self.comps)
        for k, v in o.comps.items():
            out[k] = out[k] + v if k in out else v
        return TensorField(self.chart, self.up, self.down, out)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c) -> "TensorField":
        if isinstance(c, (RatFun, MultiPoly)):
            c = _lift(c, self.chart)
        return TensorField(self.chart, self.up, self.down, {k: v * c for k, v in self.comps.items()})

    def _same(self, o):
        if (o.chart, o.up, o.down) != (self.chart, self.up, self.down):
            raise ValueError("tensor type or chart mismatch")

    def __eq__(self, o):
        if not isinstance(o, TensorField):
            return NotImplemented
        if (o.chart, o.up, o.down) != (self.chart, self.up, self.down):
            return False
        keys = set(self.comps) | set(o.comps)
        return all(self[k] == o[k] for k in keys)

    __hash__ = None

    def matrix(self) -> ExactMatrix:
        if self.rank != 2:
            raise ValueError("only rank-2 tensors have a matrix")
        d = self.dim
        return ExactMatrix([[self[i, j] for j in range(d)] for i in range(d)])

    def evaluate(self, point) -> dict:
        return {k: v.evaluate(point) for k, v in self.comps.items()}

    def partial_evaluate(self, values) -> "TensorField":
        return TensorField(self.chart, self.up, self.down,
                           {k: v.partial_evaluate(values) for k, v in self.comps.items()})

    def substitute(self, bindings, target) -> "TensorField":
        return TensorField(target, self.up, self.down,
                           {k: v.substitute(bindings, target) for k, v in self.comps.items()})

    def embed(self, target) -> "TensorField":
        return TensorField(target, self.up, self.down, {k: v.embed(target) for k, v in self.comps.items()})

    def is_symmetric(self, a=0, b=1) -> bool:
        for idx, v in self.comps.items():
            s = list(idx)
            s[a], s[b] = s[b], s[a]
            if self[tuple(s)] != v:
                return False
        return True

    def __repr__(self):
        return f"TensorField({self.chart.name}, ({self.up},{self.down}), {len(self.comps)} nonzero)"


# -- points -------------------------------------------------------------------

def assert_generic(point) -> None:
    """Reject points with a vanishing coordinate or coinciding squares."""
    vals = [as_scalar(x) for x in point]
    if any(not v for v in vals):
        raise DegeneratePoint("a coordinate vanishes")
    sq = [v * v for v in vals]
    if len(set(sq)) != len(sq):
        raise DegeneratePoint("two coordinates have equal squares")


def generic_point(n: int, rng: random.Random, size: int = 9) -> list:
    """Random rational point with nonzero coordinates and distinct squares."""
    from gmpy2 import mpq
    while True:
        pt = [mpq(rng.randint(-size, size), rng.randint(1, size)) for _ in range(n)]
        try:
            assert_generic(pt)
            return pt
        except DegeneratePoint:
            continue


# -- Jacobians and pushforwards --------------------------------------------------

def jacobian(targets, chart: Chart) -> ExactMatrix:
    """Entry ``(i, k)`` is ``d targets[i] / d coords[k]``."""
    rows = []
    for f in targets:
        f = _lift(f, chart)
        rows.append([f.diff(v) for v in chart.coords])
    return ExactMatrix(rows)


def pushforward_cometric(G: TensorField, n: int, basis: InvariantBasis | None = None,
                         check: bool = True) -> TensorField:
    """Rewrite the cometric ``G`` (p-chart) in the invariant basis."""
    if G.up != 2 or G.down != 0:
        raise ValueError("a (2,0) tensor is required")
    basis = basis or standard_basis(n, G.chart.params)
    ch = G.chart
    grads = [[_lift(u, ch).diff(v) for v in ch.coords] for u in basis.polys]
    dim = n
    pairs = sorted(G.comps.items())
    comps = {}
    for i in range(dim):
        for j in range(i, dim):
            # term-wise products let monomial denominators cancel early
            val = RatFun.zero(ch)
            for (k, l), Gkl in pairs:
                a, b = grads[i][k], grads[j][l]
                if a and b:
                    val = val + Gkl * a * b
            comps[(i, j)] = comps[(j, i)] = basis.rewrite(val, check=check)
    return TensorField(basis.chart, 2, 0, comps)


# -- Christoffel symbols --------------------------------------------------------------

@dataclass
class ChristoffelData:
    """Levi-Civita data on a chart.

    ``lower[(k, i, j)]`` is ``Gamma^k_{ij}``; ``contra[(i, j, k)]`` is
    ``Gamma^{ij}_k`` when available.
    """

    chart: Chart
    lower: dict = field(default_factory=dict)
    contra: dict | None = None
    inverse_metric: TensorField | None = None

    def __getitem__(self, kij):
        v = self.lower.get(kij)
        return v if v is not None else RatFun.zero(self.chart)

    def nonzero(self):
        return {k: v for k, v in sorted(self.lower.items()) if v}

    def is_torsion_free(self) -> bool:
        d = self.chart.dim
        return all(self[k, i, j] == self[k, j, i] for k in range(d) for i in range(d) for j in range(i + 1, d))


def christoffel_covariant(g_cov: TensorField) -> ChristoffelData:
    """Levi-Civita symbols of a covariant metric."""
    if g_cov.up != 0 or g_cov.down != 2:
        raise ValueError("a (0,2) metric is required")
    if not g_cov.is_symmetric():
        raise ValueError("metric is not symmetric")
    ch = g_cov.chart
    d = ch.dim
    try:
        inv = g_cov.matrix().inverse()
    except SingularMatrix:
        raise SingularMatrix("metric is singular") from None
    ginv = TensorField(ch, 2, 0, {(i, j): inv[i, j] for i in range(d) for j in range(d)})
    dg = {(m, i, j): g_cov[i, j].diff(ch.coords[m]) for m in range(d) for i in range(d) for j in range(i, d)}

    def dgs(m, i, j):
        return dg[(m, i, j)] if i <= j else dg[(m, j, i)]

    lower = {}
    for i in range(d):
        for j in range(i, d):
            first = [(dgs(i, m, j) + dgs(j, m, i) - dgs(m, i, j)) for m in range(d)]
            for k in range(d):
                v = dot([ginv[k, m] for m in range(d)], first, ch) * as_scalar("1/2")
                if v:
                    lower[(k, i, j)] = v
                    lower[(k, j, i)] = v
    data = ChristoffelData(ch, lower, None, ginv)
    return data


def contravariant_from_lower(gamma: ChristoffelData, ginv: TensorField) -> dict:
    """``Gamma^{ij}_k = -g^{is} Gamma^j_{sk}``."""
    ch = gamma.chart
    d = ch.dim
    out = {}
    for i, j, k in product(range(d), repeat=3):
        v = -dot([ginv[i, s] for s in range(d)], [gamma[j, s, k] for s in range(d)], ch)
        if v:
            out[(i, j, k)] = v
    return out


def covariant_derivative_metric(g_cov: TensorField, gamma: ChristoffelData) -> TensorField:
    """``nabla_k g_{ij}`` as a (0,3) tensor indexed ``(k, i, j)``."""
    ch = g_cov.chart
    d = ch.dim
    comps = {}
    for k, i, j in product(range(d), repeat=3):
        v = g_cov[i, j].diff(ch.coords[k])
        v = v - dot([gamma[m, k, i] for m in range(d)], [g_cov[m, j] for m in range(d)], ch)
        v = v - dot([gamma[m, k, j] for m in range(d)], [g_cov[i, m] for m in range(d)], ch)
        comps[(k, i, j)] = v
    return TensorField(ch, 0, 3, comps)


def riemann_curvature(gamma: ChristoffelData) -> TensorField:
    """``R^k_{ijl} = d_i G^k_{jl} - d_j G^k_{il} + G^k_{im} G^m_{jl} - G^k_{jm} G^m_{il}``,
    stored under index ``(k, i, j, l)``."""
    ch = gamma.chart
    d = ch.dim
    dG = {}
    for (k, j, l), v in gamma.lower.items():
        for i in range(d):
            w = v.diff(ch.coords[i])
            if w:
                dG[(i, k, j, l)] = w
    zero = RatFun.zero(ch)
    comps = {}
    for k, i, j, l in product(range(d), repeat=4):
        if i == j:
            continue
        v = dG.get((i, k, j, l), zero) - dG.get((j, k, i, l), zero)
        v = v + dot([gamma[k, i, m] for m in range(d)], [gamma[m, j, l] for m in range(d)], ch)
        v = v - dot([gamma[k, j, m] for m in range(d)], [gamma[m, i, l] for m in range(d)], ch)
        if v:
            comps[(k, i, j, l)] = v
    return TensorField(ch, 1, 3, comps)


def contravariant_curvature(g: TensorField, contra: dict, coords=None, point=None) -> dict:
    """Nonzero components of
    ``R^{ijk}_l = g^{is}(d_s G^{jk}_l - d_l G^{jk}_s) + G^{ik}_s G^{sj}_l - G^{ij}_s G^{sk}_l``,
    which equals ``g^{ia} g^{jb} R^k_{lab}`` for the (1,3) tensor of
    :func:`riemann_curvature`.

    With ``point`` (a mapping for some chart variables) every quantity is
    partially evaluated after differentiation, which keeps parameters such
    as a pencil variable symbolic.
    """
    ch = g.chart
    d = ch.dim
    zero = RatFun.zero(ch)

    def ev(f):
        return f.partial_evaluate(point) if point is not None else f

    dG = {}
    for (j, k, l), v in contra.items():
        for s in range(d):
            w = v.diff(ch.coords[s])
            if w:
                dG[(s, j, k, l)] = ev(w)
    Gv = {key: ev(v) for key, v in contra.items()}
    gv = {key: ev(v) for key, v in g.comps.items()}
    gch = ch

    def Ge(i, j, k):
        v = Gv.get((i, j, k))
        return v if v is not None else zero

    def ge(i, j):
        v = gv.get((i, j))
        return v if v is not None else zero

    out = {}
    for i, j, k, l in product(range(d), repeat=4):
        terms_l = [ge(i, s) for s in range(d)]
        terms_r = [dG.get((s, j, k, l), zero) - dG.get((l, j, k, s), zero) for s in range(d)]
        v = dot(terms_l, terms_r, gch)
        v = v + dot([Ge(i, k, s) for s in range(d)], [Ge(s, j, l) for s in range(d)], gch)
        v = v - dot([Ge(i, j, s) for s in range(d)], [Ge(s, k, l) for s in range(d)], gch)
        if v:
            out[(i, j, k, l)] = v
    return out


def levi_civita_residuals(g: TensorField, contra: dict) -> list:
    """Failures of ``d_k g^{ij} = G^{ij}_k + G^{ji}_k`` and
    ``g^{is} G^{jk}_s = g^{js} G^{ik}_s``; empty when both hold."""
    ch = g.chart
    d = ch.dim
    zero = RatFun.zero(ch)

    def G(i, j, k):
        v = contra.get((i, j, k))
        return v if v is not None else zero

    bad = []
    for i, j, k in product(range(d), repeat=3):
        r = g[i, j].diff(ch.coords[k]) - G(i, j, k) - G(j, i, k)
        if r:
            bad.append(("metricity", (i, j, k), r))
    for i, j, k in product(range(d), repeat=3):
        if i >= j:
            continue
        a = dot([g[i, s] for s in range(d)], [G(j, k, s) for s in range(d)], ch)
        b = dot([g[j, s] for s in range(d)], [G(i, k, s) for s in range(d)], ch)
        if a != b:
            bad.append(("torsion", (i, j, k), a - b))
    return bad


def contravariant_christoffel_from_metric(g: TensorField) -> dict:
    """Contravariant symbols of a (2,0) metric by inverting it (generic route)."""
    ch = g.chart
    d = ch.dim
    cov = g.matrix().inverse()
    g_cov = TensorField(ch, 0, 2, {(i, j): cov[i, j] for i in range(d) for j in range(d)})
    gam = christoffel_covariant(g_cov)
    return contravariant_from_lower(gam, g)


# -- Lie derivatives ----------------------------------------------------------------------

def lie_derivative(T: TensorField, X: TensorField) -> TensorField:
    """Lie derivative of ``T`` along the vector field ``X``.

    Supported types: (1,0), (0,1), (2,0), (0,2), (1,2).
    """
    if X.up != 1 or X.down != 0:
        raise ValueError("X must be a vector field")
    if X.chart != T.chart:
        raise ValueError("chart mismatch")
    ch = T.chart
    d = ch.dim
    c = ch.coords
    dX = {(i, k): X[i].diff(c[k]) for i in range(d) for k in range(d)}
    Xs = [X[k] for k in range(d)]

    def along(f):
        return dot(Xs, [f.diff(v) for v in c], ch)

    kind = (T.up, T.down)
    comps = {}
    if kind == (1, 0):
        for i in range(d):
            comps[(i,)] = along(T[i]) - dot([T[k] for k in range(d)], [dX[(i, k)] for k in range(d)], ch)
    elif kind == (0, 1):
        for i in range(d):
            comps[(i,)] = along(T[i]) + dot([T[k] for k in range(d)], [dX[(k, i)] for k in range(d)], ch)
    elif kind == (2, 0):
        for i, j in product(range(d), repeat=2):
            v = along(T[i, j])
            v = v - dot([T[k, j] for k in range(d)], [dX[(i, k)] for k in range(d)], ch)
            v = v - dot([T[i, k] for k in range(d)], [dX[(j, k)] for k in range(d)], ch)
            comps[(i, j)] = v
    elif kind == (0, 2):
        for i, j in product(range(d), repeat=2):
            v = along(T[i, j])
            v = v + dot([T[k, j] for k in range(d)], [dX[(k, i)] for k in range(d)], ch)
            v = v + dot([T[i, k] for k in range(d)], [dX[(k, j)] for k in range(d)], ch)
            comps[(i, j)] = v
    elif kind == (1, 2):
        for i, j, k in product(range(d), repeat=3):
            v = along(T[i, j, k])
            v = v - dot([T[m, j, k] for m in range(d)], [dX[(i, m)] for m in range(d)], ch)
            v = v + dot([T[i, m, k] for m in range(d)], [dX[(m, j)] for m in range(d)], ch)
            v = v + dot([T[i, j, m] for m in range(d)], [dX[(m, k)] for m in range(d)], ch)
            comps[(i, j, k)] = v
    else:
        raise ValueError(f"unsupported tensor type {kind}")
    return TensorField(ch, T.up, T.down, comps)


def bracket(X: TensorField, Y: TensorField) -> TensorField:
    return lie_derivative(Y, X)


def coordinate_field(chart: Chart, var) -> TensorField:
    i = chart.coord_index(var)
    return TensorField(chart, 1, 0, {(i,): RatFun.one(chart)})
