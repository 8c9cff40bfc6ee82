"""Pure-Python polynomial kernels.

A polynomial is a dict mapping exponent tuples to nonzero coefficients
(int, Fraction or float).  These four functions are the hot inner loop of
every tensor computation; ``cpgeo._poly_speed`` provides a compiled twin
with identical semantics.
"""

from __future__ import annotations

BACKEND = "pure"


def poly_add(a: dict, b: dict) -> dict:
    """Sum of two polynomial dicts; zero coefficients are dropped."""
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
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


def poly_neg(a: dict) -> dict:
    return {mono: -coeff for mono, coeff in a.items()}


def poly_scale(a: dict, c) -> dict:
    """Multiply every coefficient by the scalar ``c``."""
    if not c:
        return {}
    return {mono: coeff * c for mono, coeff in a.items()}


def poly_mul(a: dict, b: dict) -> dict:
    """Product of two polynomial dicts."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    bitems = list(b.items())
    for mono1, coeff1 in a.items():
        for mono2, coeff2 in bitems:
            mono = tuple(e1 + e2 for e1, e2 in zip(mono1, mono2))
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
