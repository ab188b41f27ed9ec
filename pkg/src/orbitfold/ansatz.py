"""Undetermined-coefficient solves for polynomial ansatze."""

from __future__ import annotations

from .algebra import MultiPoly, RatFun, solve_linear
from .algebra.matrix import LinearSolution
from .algebra.scalar import ZERO


def _poly(x):
    if isinstance(x, RatFun):
        return x.as_poly()
    return x


def solve_ansatz(base, basis, operator, rhs=None):
    """Coefficients ``lam`` with ``operator(base + sum lam_j basis_j) == rhs``.

    ``operator`` is linear and maps a polynomial to a list of polynomials
    (one per equation); ``rhs`` defaults to zeros.  Returns the
    :class:`LinearSolution` of the induced scalar system, whose unknowns
    are listed in the order of ``basis``.
    """
    op_base = [_poly(x) for x in operator(base)] if base is not None else None
    cols = [[_poly(x) for x in operator(m)] for m in basis]
    neq = len(op_base) if op_base is not None else len(cols[0]) if cols else 0
    if rhs is None:
        rhs = [None] * neq
    rhs = [_poly(x) for x in rhs]
    rows, vals = [], []
    for e in range(neq):
        keys = set()
        for col in cols:
            keys.update(col[e].terms)
        if op_base is not None:
            keys.update(op_base[e].terms)
        if rhs[e] is not None:
            keys.update(rhs[e].terms)
        for k in sorted(keys, reverse=True):
            rows.append([col[e].terms.get(k, ZERO) for col in cols])
            target = rhs[e].terms.get(k, ZERO) if rhs[e] is not None else ZERO
            if op_base is not None:
                target = target - op_base[e].terms.get(k, ZERO)
            vals.append(target)
    if not rows:
        rows, vals = [[ZERO] * len(basis)], [ZERO]
    if not basis:
        ok = all(v == 0 for v in vals)
        return LinearSolution("unique" if ok else "inconsistent", [] if ok else None)
    return solve_linear(rows, vals)


def combine(base, basis, coeffs):
    out = base if base is not None else MultiPoly.zero(basis[0].chart)
    for m, c in zip(basis, coeffs):
        if c:
            out = out + m.scale(c)
    return out


__all__ = ["solve_ansatz", "combine"]
