"""Matrices over rationals or rational functions, and exact linear solving.

Linear systems use fraction-free (Bareiss) elimination: scalar systems are
cleared to integers, rational-function systems to polynomials, so every
intermediate division is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import lcm, mpq, mpz

from .poly import MultiPoly
from .ratfun import RatFun, ZeroDenominator, poly_gcd
from .scalar import ONE, ZERO, as_scalar, is_scalar_like


class SingularMatrix(ArithmeticError):
    pass


def _is_zero(x) -> bool:
    return not x


class ExactMatrix:
    """Rectangular matrix whose entries are ``mpq`` or :class:`RatFun`."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        rows = [list(r) for r in entries]
        if not rows:
            raise ValueError("empty matrix")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("matrix rows must have equal length")
        self.entries = [[as_scalar(x) if is_scalar_like(x) else x for x in r] for r in rows]
        self.rows = len(rows)
        self.cols = cols

    @classmethod
    def identity(cls, n, chart=None):
        if chart is None:
            return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])
        return cls([[RatFun.one(chart) if i == j else RatFun.zero(chart) for j in range(n)]
                    for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self):
        return self.rows, self.cols

    def is_scalar(self) -> bool:
        return all(not isinstance(x, (RatFun, MultiPoly)) for r in self.entries for x in r)

    def _chart(self):
        for r in self.entries:
            for x in r:
                if isinstance(x, (RatFun, MultiPoly)):
                    return x.chart
        return None

    def lifted(self):
        """Copy with every entry a :class:`RatFun` (requires a chart)."""
        ch = self._chart()
        if ch is None:
            raise ValueError("scalar matrix has no chart")
        return [[RatFun.lift(x, ch) for x in r] for r in self.entries]

    def transpose(self):
        return ExactMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = ZERO
                    for k in range(self.cols):
                        a = self.entries[i][k]
                        b = other.entries[k][j]
                        if a and b:
                            acc = a * b + acc
                    row.append(acc)
                out.append(row)
            return ExactMatrix(out)
        return ExactMatrix([[x * other for x in r] for r in self.entries])

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix) or self.shape != other.shape:
            return False
        return all(self.entries[i][j] == other.entries[i][j]
                   for i in range(self.rows) for j in range(self.cols))

    __hash__ = None

    def map(self, f):
        return ExactMatrix([[f(x) for x in r] for r in self.entries])

    def __repr__(self):
        return "ExactMatrix([" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries) + "])"

    # -- determinant and inverse -----------------------------------------
    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if self.is_scalar():
            return _bareiss_det_scalar(self.entries)
        return _gauss_det(self.lifted())

    def inverse(self) -> "ExactMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        if self.is_scalar():
            a = [[mpq(x) for x in r] + [ONE if i == j else ZERO for j in range(n)]
                 for i, r in enumerate(self.entries)]
            one, zero = ONE, ZERO
        else:
            ch = self._chart()
            a = [r + [RatFun.one(ch) if i == j else RatFun.zero(ch) for j in range(n)]
                 for i, r in enumerate(self.lifted())]
        for c in range(n):
            piv = _choose_pivot(a, c, c)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c] if not isinstance(a[c][c], RatFun) else a[c][c].inverse()
            a[c] = [x * inv if x else x for x in a[c]]
            for i in range(n):
                if i != c and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y if y else x for x, y in zip(a[i], a[c])]
        return ExactMatrix([r[n:] for r in a])


def _size(x) -> int:
    if isinstance(x, RatFun):
        return len(x.num.terms) + len(x.den.terms)
    return 1


def _choose_pivot(a, row0, col):
    best = None
    best_size = None
    for i in range(row0, len(a)):
        x = a[i][col]
        if x:
            s = _size(x)
            if best is None or s < best_size:
                best, best_size = i, s
    return best


def _bareiss_det_scalar(entries):
    n = len(entries)
    den = mpz(1)
    rows = []
    for r in entries:
        l = mpz(1)
        for x in r:
            l = lcm(l, mpq(x).denominator)
        den *= l
        rows.append([mpz(mpq(x) * l) for x in r])
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return ZERO
        pk = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            ri = rows[i]
            rk = rows[k]
            for j in range(k + 1, n):
                ri[j] = (pk * ri[j] - rik * rk[j]) // prev
            ri[k] = mpz(0)
        prev = pk
    return mpq(sign * rows[n - 1][n - 1], den)


def _gauss_det(a):
    n = len(a)
    a = [list(r) for r in a]
    ch = a[0][0].chart
    det = RatFun.one(ch)
    for c in range(n):
        piv = _choose_pivot(a, c, c)
        if piv is None:
            return RatFun.zero(ch)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det = det * p
        inv = p.inverse()
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y if y else x for x, y in zip(a[i], a[c])]
    return det


@dataclass
class LinearSolution:
    """Result of :func:`solve_linear`.

    ``status`` is ``"unique"``, ``"parametric"`` or ``"inconsistent"``.
    ``particular`` has free variables set to zero; ``nullspace`` holds one
    basis vector per free variable.
    """

    status: str
    particular: list | None = None
    nullspace: list = field(default_factory=list)
    pivots: tuple = ()
    free: tuple = ()

    @property
    def consistent(self) -> bool:
        return self.status != "inconsistent"


def solve_linear(A, b) -> LinearSolution:
    """Solve ``A x = b`` exactly.

    ``A`` is an :class:`ExactMatrix` or nested list; entries may be
    scalars (integer Bareiss) or rational functions (polynomial Bareiss).
    """
    if not isinstance(A, ExactMatrix):
        A = ExactMatrix(A)
    b = [as_scalar(x) if is_scalar_like(x) else x for x in b]
    if len(b) != A.rows:
        raise ValueError("right-hand side length does not match the matrix")
    scalar = A.is_scalar() and all(not isinstance(x, (RatFun, MultiPoly)) for x in b)
    if scalar:
        return _solve_scalar(A.entries, b, A.cols)
    ch = A._chart()
    if ch is None:
        ch = next(x.chart for x in b if isinstance(x, (RatFun, MultiPoly)))
    return _solve_ratfun([[RatFun.lift(x, ch) for x in r] for r in A.entries],
                         [RatFun.lift(x, ch) for x in b], A.cols, ch)


def _echelon(M, ncols, zero, divide):
    """Fraction-free forward elimination in place.

    ``divide(x, d)`` must be exact.  Returns the pivot columns.
    """
    m = len(M)
    r = 0
    prev = None
    pivots = []
    for c in range(ncols):
        if r >= m:
            break
        piv = None
        best = None
        for i in range(r, m):
            x = M[i][c]
            if x:
                s = len(x.terms) if isinstance(x, MultiPoly) else 1
                if piv is None or s < best:
                    piv, best = i, s
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        pk = pr[c]
        for i in range(r + 1, m):
            ri = M[i]
            f = ri[c]
            if f:
                for j in range(c + 1, len(ri)):
                    x = pk * ri[j] - f * pr[j]
                    ri[j] = divide(x, prev) if prev is not None else x
            elif prev is not None:
                for j in range(c + 1, len(ri)):
                    if ri[j]:
                        ri[j] = divide(pk * ri[j], prev)
            else:
                for j in range(c + 1, len(ri)):
                    if ri[j]:
                        ri[j] = pk * ri[j]
            ri[c] = zero
        prev = pk
        pivots.append(c)
        r += 1
    return pivots


def _solve_scalar(entries, b, ncols) -> LinearSolution:
    M = []
    for row, rhs in zip(entries, b):
        l = mpz(1)
        for x in row:
            l = lcm(l, x.denominator)
        l = lcm(l, rhs.denominator)
        M.append([mpz(x * l) for x in row] + [mpz(rhs * l)])
    pivots = _echelon(M, ncols, mpz(0), lambda x, d: x // d)
    rank = len(pivots)
    for i in range(rank, len(M)):
        if M[i][ncols]:
            return LinearSolution("inconsistent", pivots=tuple(pivots))
    free = [c for c in range(ncols) if c not in pivots]

    def back(rhs_col, fixed):
        x = [ZERO] * ncols
        for c, v in fixed.items():
            x[c] = v
        for i in range(rank - 1, -1, -1):
            c = pivots[i]
            s = mpq(rhs_col[i])
            row = M[i]
            for j in range(c + 1, ncols):
                if row[j] and x[j]:
                    s -= row[j] * x[j]
            x[c] = s / row[c]
        return x

    rhs = [M[i][ncols] for i in range(rank)]
    particular = back(rhs, {})
    null = [back([0] * rank, {f: ONE}) for f in free]
    status = "unique" if not free else "parametric"
    return LinearSolution(status, particular, null, tuple(pivots), tuple(free))


def _poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a == b or b.is_constant():
        return a
    if a.is_constant():
        return b
    g = poly_gcd(a, b)
    return (a * b).divexact(g) if not g.is_constant() else a * b


def _solve_ratfun(entries, b, ncols, ch) -> LinearSolution:
    M = []
    for row, rhs in zip(entries, b):
        l = MultiPoly.one(ch)
        for x in row + [rhs]:
            if x and not x.den.is_constant():
                l = _poly_lcm(l, x.den)
        prow = []
        for x in row + [rhs]:
            if not x:
                prow.append(MultiPoly.zero(ch))
            else:
                prow.append((RatFun.lift(l, ch) * x).as_poly())
        M.append(prow)
    pivots = _echelon(M, ncols, MultiPoly.zero(ch), lambda x, d: x.divexact(d))
    rank = len(pivots)
    for i in range(rank, len(M)):
        if M[i][ncols]:
            return LinearSolution("inconsistent", pivots=tuple(pivots))
    free = [c for c in range(ncols) if c not in pivots]
    zero = RatFun.zero(ch)

    def back(rhs_col, fixed):
        x = [zero] * ncols
        for c, v in fixed.items():
            x[c] = v
        for i in range(rank - 1, -1, -1):
            c = pivots[i]
            s = RatFun.lift(rhs_col[i], ch)
            row = M[i]
            for j in range(c + 1, ncols):
                if row[j] and x[j]:
                    s = s - RatFun.lift(row[j], ch) * x[j]
            x[c] = s / RatFun.lift(row[c], ch)
        return x

    rhs = [M[i][ncols] for i in range(rank)]
    particular = back(rhs, {})
    null = [back([MultiPoly.zero(ch)] * rank, {f: RatFun.one(ch)}) for f in free]
    status = "unique" if not free else "parametric"
    return LinearSolution(status, particular, null, tuple(pivots), tuple(free))
