# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels.

Same contract as ``_pykernels``.  Coefficients are multiplied and
accumulated with GMP directly; accumulator objects are created inside
each call, so in-place updates never touch caller-visible values.
"""

from cpython.dict cimport PyDict_GetItem, PyDict_SetItem
from cpython.ref cimport PyObject
from gmpy2 cimport *

cdef extern from "gmp.h":
    void mpq_init(mpq_ptr)
    void mpq_clear(mpq_ptr)
    void mpq_mul(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_add(mpq_ptr, mpq_srcptr, mpq_srcptr)
    int mpq_sgn(mpq_srcptr)

import_gmpy2()

BACKEND = "cython"


cdef dict _strip(dict out):
    cdef list dead = []
    cdef mpq v
    for k, v in out.items():
        if mpq_sgn(v.q) == 0:
            dead.append(k)
    for k in dead:
        del out[k]
    return out


cdef void _accumulate(dict out, dict a, list bl, mpq_t tmp):
    cdef mpq ca, cb, acc
    cdef object ka, kb, key
    cdef PyObject* slot
    cdef tuple pair
    for ka, ca in a.items():
        for pair in bl:
            kb = pair[0]
            cb = <mpq>pair[1]
            key = ka + kb
            slot = PyDict_GetItem(out, key)
            if slot is NULL:
                acc = GMPy_MPQ_New(NULL)
                mpq_mul(acc.q, ca.q, cb.q)
                PyDict_SetItem(out, key, acc)
            else:
                acc = <mpq>slot
                mpq_mul(tmp, ca.q, cb.q)
                mpq_add(acc.q, acc.q, tmp)


def mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef mpq_t tmp
    if len(a) < len(b):
        a, b = b, a
    mpq_init(tmp)
    try:
        _accumulate(out, a, list(b.items()), tmp)
    finally:
        mpq_clear(tmp)
    return _strip(out)


def dot_terms(list left, list right):
    cdef dict out = {}
    cdef mpq_t tmp
    cdef dict a, b
    mpq_init(tmp)
    try:
        for a, b in zip(left, right):
            if not a or not b:
                continue
            if len(a) < len(b):
                a, b = b, a
            _accumulate(out, a, list(b.items()), tmp)
    finally:
        mpq_clear(tmp)
    return _strip(out)


def add_terms(dict a, dict b, scale=None):
    cdef dict out = dict(a)
    cdef PyObject* slot
    cdef mpq acc, c, s
    cdef mpq_t tmp
    mpq_init(tmp)
    try:
        if scale is not None:
            s = <mpq>scale
        for k, c in b.items():
            slot = PyDict_GetItem(out, k)
            acc = GMPy_MPQ_New(NULL)
            if scale is None:
                if slot is NULL:
                    mpq_set(acc.q, c.q)
                else:
                    mpq_add(acc.q, (<mpq>slot).q, c.q)
            else:
                mpq_mul(tmp, s.q, c.q)
                if slot is NULL:
                    mpq_set(acc.q, tmp)
                else:
                    mpq_add(acc.q, (<mpq>slot).q, tmp)
            PyDict_SetItem(out, k, acc)
    finally:
        mpq_clear(tmp)
    return _strip(out)
