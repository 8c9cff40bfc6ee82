"""Pure and compiled polynomial kernels must agree exactly."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from cpgeo import _poly_pure

speed = pytest.importorskip("cpgeo._poly_speed")


def _random_poly(rng, nvars=3, terms=6, coeff_type=int):
    out = {}
    for _ in range(terms):
        mono = tuple(rng.randint(0, 4) for _ in range(nvars))
        if coeff_type is int:
            c = rng.randint(-10, 10)
        elif coeff_type is float:
            c = rng.uniform(-4, 4)
        else:
            c = Fraction(rng.randint(-8, 8), rng.randint(1, 8))
        if c:
            out[mono] = c
    return out


@pytest.mark.parametrize("coeff_type", [int, float, Fraction])
def test_kernels_agree(coeff_type):
    rng = random.Random(13)
    for _ in range(200):
        a = _random_poly(rng, coeff_type=coeff_type)
        b = _random_poly(rng, coeff_type=coeff_type)
        assert _poly_pure.poly_add(a, b) == speed.poly_add(a, b)
        assert _poly_pure.poly_mul(a, b) == speed.poly_mul(a, b)
        assert _poly_pure.poly_neg(a) == speed.poly_neg(a)
        c = rng.randint(-5, 5)
        assert _poly_pure.poly_scale(a, c) == speed.poly_scale(a, c)


def test_kernels_empty_and_zero():
    assert speed.poly_add({}, {}) == {}
    assert speed.poly_mul({(0,): 2}, {}) == {}
    assert speed.poly_scale({(1,): 3}, 0) == {}
    a = {(1, 0): 2, (0, 1): -2}
    b = {(1, 0): -2, (0, 1): 2}
    assert speed.poly_add(a, b) == {}


def test_backend_names():
    assert _poly_pure.BACKEND == "pure"
    assert speed.BACKEND == "compiled"
