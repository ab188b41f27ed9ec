"""Exact algebra substrate: scalars, charts, polynomials, rational
functions, matrices and linear solving."""

import os

if os.environ.get("ORBITFOLD_PURE"):
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _pykernels as kernels

from .scalar import as_scalar, mpq, rational_sqrt
from .chart import Chart, chart
from .poly import MultiPoly, ChartMismatch
from .ratfun import RatFun, ZeroDenominator
from .matrix import ExactMatrix, LinearSolution, solve_linear, SingularMatrix

BACKEND = kernels.BACKEND

__all__ = [
    "BACKEND", "Chart", "chart", "MultiPoly", "RatFun", "ExactMatrix",
    "LinearSolution", "solve_linear", "as_scalar", "mpq", "rational_sqrt",
    "ChartMismatch", "ZeroDenominator", "SingularMatrix",
]
