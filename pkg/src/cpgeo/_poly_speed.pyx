# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled polynomial kernels; semantics identical to cpgeo._poly_pure.

Coefficients stay generic Python objects (int / Fraction / float) so exact
arithmetic is preserved; the speedup comes from removing interpreter
overhead in the monomial loops.
"""

BACKEND = "compiled"


def poly_add(dict a, dict b):
    """Sum of two polynomial dicts; zero coefficients are dropped."""
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    cdef dict out = dict(a)
    cdef object mono, coeff, cur
    for mono, coeff in b.items():
        cur = out.get(mono)
        if cur is None:
            out[mono] = coeff
        else:
            cur = cur + coeff
            if cur:
                out[mono] = cur
            else:
                del out[mono]
    return out


def poly_neg(dict a):
    cdef dict out = {}
    cdef object mono, coeff
    for mono, coeff in a.items():
        out[mono] = -coeff
    return out


def poly_scale(dict a, c):
    """Multiply every coefficient by the scalar ``c``."""
    if not c:
        return {}
    cdef dict out = {}
    cdef object mono, coeff
    for mono, coeff in a.items():
        out[mono] = coeff * c
    return out


def poly_mul(dict a, dict b):
    """Product of two polynomial dicts."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef list bitems = list(b.items())
    cdef object mono1, mono2, coeff1, coeff2, cur, coeff
    cdef tuple t1, t2, mono
    cdef Py_ssize_t n, i
    for mono1, coeff1 in a.items():
        t1 = <tuple> mono1
        n = len(t1)
        for mono2, coeff2 in bitems:
            t2 = <tuple> mono2
            mono = tuple([t1[i] + t2[i] for i in range(n)])
            coeff = coeff1 * coeff2
            cur = out.get(mono)
            if cur is None:
                out[mono] = coeff
            else:
                cur = cur + coeff
                if cur:
                    out[mono] = cur
                else:
                    del out[mono]
    return out
