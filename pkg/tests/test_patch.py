"""Framed patches: brackets, coframes, derivations, Jacobi enforcement."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from cpgeo import FramedPatch, FrameError, coframe, directional_derivative, lie_bracket
from cpgeo.linalg import mat_mul


def identity_rows(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


@pytest.fixture(scope="module")
def chart4():
    return FramedPatch(4, ("x", "y", "z", "t"), frame_matrix=identity_rows(4))


def test_nilpotent_bracket_values(nilpotent6):
    p = nilpotent6.patch
    e = p.basis()
    # [e3, e5] = -e4, forced by d(omega_4) = omega_3 ^ omega_5
    assert lie_bracket(p, e[2], e[4]).components[3].as_fraction() == -1
    # the Reeb frame directions are central
    for j in range(6):
        assert lie_bracket(p, e[0], e[j]).is_zero()
        assert lie_bracket(p, e[1], e[j]).is_zero()


def test_chart_bracket(chart4):
    # [d/dx, x d/dy] = d/dy
    x_dy = chart4.vector(["0", "x", "0", "0"])
    dx = chart4.basis_vector(0)
    result = lie_bracket(chart4, dx, x_dy)
    assert [str(c) for c in result.components] == ["0", "1", "0", "0"]


def test_bracket_antisymmetry_random(chart4):
    rng = random.Random(5)

    def rand_field():
        comps = []
        for _ in range(4):
            s = chart4.ctx.constant(rng.randint(-2, 2))
            for name in chart4.ctx.names:
                if rng.random() < 0.4:
                    s = s * chart4.ctx.variable(name)
            comps.append(s)
        return chart4.vector(comps)

    for _ in range(20):
        x, y = rand_field(), rand_field()
        assert (lie_bracket(chart4, x, y) + lie_bracket(chart4, y, x)).is_zero()


def test_bracket_leibniz_random(chart4):
    # [X, f Y] = (X f) Y + f [X, Y]
    rng = random.Random(11)

    def rand_scalar():
        s = chart4.ctx.constant(rng.randint(-2, 2))
        for name in chart4.ctx.names:
            s = s + chart4.ctx.constant(rng.randint(-1, 1)) * chart4.ctx.variable(name)
        return s

    def rand_field():
        return chart4.vector([rand_scalar() for _ in range(4)])

    for _ in range(50):
        x, y, f = rand_field(), rand_field(), rand_scalar()
        lhs = lie_bracket(chart4, x, y.scale(f))
        xf = directional_derivative(chart4, x, f)
        rhs = y.scale(xf) + lie_bracket(chart4, x, y).scale(f)
        assert (lhs - rhs).is_zero()


def test_jacobi_holds_on_catalog(nilpotent6, heisenberg, flat_e2r, flat_e2r2):
    # construction re-checks Jacobi; re-run explicitly over all triples
    for example in (nilpotent6, heisenberg, flat_e2r, flat_e2r2):
        p = example.patch
        e = p.basis()
        n = p.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    total = (
                        lie_bracket(p, e[i], lie_bracket(p, e[j], e[k]))
                        + lie_bracket(p, e[j], lie_bracket(p, e[k], e[i]))
                        + lie_bracket(p, e[k], lie_bracket(p, e[i], e[j]))
                    )
                    assert total.is_zero()


def test_jacobi_violation_is_hard_error():
    # [e1,e2]=e3, [e1,e3]=e1 violates Jacobi on (e1, e2, e3)
    bad = {(0, 1): (0, 0, 1), (0, 2): (1, 0, 0)}
    with pytest.raises(FrameError, match="Jacobi"):
        FramedPatch(3, structure_constants=bad)


def test_coframe_identity(chart4):
    cof = coframe(chart4)
    for i in range(4):
        for j in range(4):
            expected = 1 if i == j else 0
            assert cof[i][j].as_fraction() == expected


def test_coframe_lie_frame_identity(nilpotent6):
    cof = coframe(nilpotent6.patch)
    assert all(cof[i][i].as_fraction() == 1 for i in range(6))


def test_coframe_nontrivial_frame():
    # e1 = d/dx, e2 = x d/dx + d/dy on an x > 0 patch
    p = FramedPatch(
        2,
        ("x", "y"),
        frame_matrix=[["1", "0"], ["x", "1"]],
        sample_points=[(Fraction(1), Fraction(1)), (Fraction(2), Fraction(1, 3))],
    )
    cof = p.coframe()
    assert [[str(c) for c in row] for row in cof] == [["1", "-x"], ["0", "1"]]
    # duality oracle: omega^i(e_j) = delta via matrix product against the frame
    prod = mat_mul(p.frame_matrix, [[cof[0][0], cof[1][0]], [cof[0][1], cof[1][1]]])
    for i in range(2):
        for j in range(2):
            assert prod[i][j].as_fraction() == (1 if i == j else 0)


def test_singular_frame_rejected():
    with pytest.raises(FrameError):
        FramedPatch(2, ("x", "y"), frame_matrix=[["x", "1"], ["x", "1"]])


def test_directional_derivative(chart4):
    xy = chart4.ctx.parse("x*y")
    dx = chart4.basis_vector(0)
    assert directional_derivative(chart4, dx, xy) == chart4.ctx.variable("y")
    assert directional_derivative(chart4, dx, chart4.ctx.parse("3/4")).is_zero()


def test_directional_derivative_constant_on_lie_frame(nilpotent6):
    p = nilpotent6.patch
    f = p.ctx.constant(Fraction(1, 2))
    assert directional_derivative(p, p.basis_vector(2), f).is_zero()


def test_default_sample_points_avoid_hyperplanes(chart4):
    assert len(chart4.sample_points) == 5
    for point in chart4.sample_points:
        assert all(x != 0 for x in point)


def test_lie_frame_rejects_chart_vars():
    with pytest.raises(FrameError):
        FramedPatch(2, ("x", "y"), structure_constants={})


def test_exactly_one_presentation():
    with pytest.raises(FrameError):
        FramedPatch(2, ("x", "y"))
