"""Pure-Python term kernels (fallback for the compiled extension).

Terms are dicts mapping a packed exponent key to a nonzero ``mpq``.
Packed keys add under monomial multiplication, so a product is a double
loop over key sums.
"""

from gmpy2 import mpq

BACKEND = "python"

_ZERO = mpq(0)


def mul_terms(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    bl = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bl:
            k = ka + kb
            out[k] = get(k, _ZERO) + ca * cb
    return {k: v for k, v in out.items() if v}


def dot_terms(left: list, right: list) -> dict:
    """Sum of products ``left[i] * right[i]`` of term dicts."""
    out = {}
    get = out.get
    for a, b in zip(left, right):
        if not a or not b:
            continue
        bl = list(b.items())
        for ka, ca in a.items():
            for kb, cb in bl:
                k = ka + kb
                out[k] = get(k, _ZERO) + ca * cb
    return {k: v for k, v in out.items() if v}


def add_terms(a: dict, b: dict, scale=None) -> dict:
    """``a + scale*b`` as a new dict."""
    out = dict(a)
    get = out.get
    if scale is None:
        for k, c in b.items():
            out[k] = get(k, _ZERO) + c
    else:
        for k, c in b.items():
            out[k] = get(k, _ZERO) + scale * c
    return {k: v for k, v in out.items() if v}
