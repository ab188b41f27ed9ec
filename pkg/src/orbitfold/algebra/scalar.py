"""Exact rational scalars.

Everything numeric in the package is a :class:`gmpy2.mpq`.  This module
only normalises the various ways a caller may spell a rational.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

Scalar = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)


def as_scalar(x) -> mpq:
    """Convert ``x`` to an exact rational or raise ``TypeError``."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, type(mpz(0)))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational literal")
        return mpq(s)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def is_scalar_like(x) -> bool:
    return isinstance(x, (Scalar, int, Fraction, type(mpz(0)))) and not isinstance(x, bool)


def scalar_str(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def rational_sqrt(c: mpq):
    """Return the rational square root of ``c`` or ``None``."""
    c = as_scalar(c)
    if c < 0:
        return None
    num, den = mpz(c.numerator), mpz(c.denominator)
    if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
        return None
    return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
