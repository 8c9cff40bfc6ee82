"""Exterior calculus under the fixed half-convention."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from cpgeo import (
    DiffForm,
    EndoField,
    FramedPatch,
    ext_d,
    interior,
    lie_derivative_endo,
    lie_derivative_form,
    nijenhuis,
    wedge,
    wedge_power,
)


@pytest.fixture(scope="module")
def chart4():
    ident = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    return FramedPatch(4, ("x", "y", "z", "t"), frame_matrix=ident)


def _rand_scalar(rng, ctx, degree=2):
    s = ctx.constant(rng.randint(-2, 2))
    for name in ctx.names:
        if rng.random() < 0.5:
            s = s + ctx.constant(rng.randint(-2, 2)) * ctx.variable(name) ** rng.randint(1, degree)
    return s


def _rand_form(rng, patch, p):
    comps = {idx: _rand_scalar(rng, patch.ctx) for idx in combinations(range(patch.dim), p)}
    return DiffForm.from_components(patch, p, comps)


def _rand_field(rng, patch):
    return patch.vector([_rand_scalar(rng, patch.ctx, degree=1) for _ in range(patch.dim)])


def _covector(patch, i):
    return DiffForm.covector(patch, [1 if j == i else 0 for j in range(patch.dim)])


# -- wedge ---------------------------------------------------------------------


def test_wedge_self_is_zero(nilpotent6):
    w1 = _covector(nilpotent6.patch, 0)
    assert wedge(w1, w1).is_zero()


def test_wedge_half_convention(nilpotent6):
    p = nilpotent6.patch
    w3, w4 = _covector(p, 2), _covector(p, 3)
    assert wedge(w3, w4).component((2, 3)).as_fraction() == Fraction(1, 2)


def test_volume_form_nonzero(nilpotent6):
    # alpha1 ^ d alpha1 ^ alpha2 ^ d alpha2 evaluated on the full frame
    pair = nilpotent6.structure.pair
    vol = wedge(wedge(wedge(pair.alpha1, pair.dalpha1), pair.alpha2), pair.dalpha2)
    top = vol.components.get((0, 1, 2, 3, 4, 5))
    assert top is not None and top.is_constant() and top.as_fraction() != 0
    # oracle: full alternating-sum evaluation on the frame basis
    val = vol.evaluate(*nilpotent6.patch.basis())
    assert val == top


def test_wedge_graded_commutative_and_associative(chart4):
    rng = random.Random(3)
    for _ in range(10):
        a, b = _rand_form(rng, chart4, 1), _rand_form(rng, chart4, 1)
        c = _rand_form(rng, chart4, 2)
        assert (wedge(a, b) + wedge(b, a)).is_zero()
        assert (wedge(a, c) - wedge(c, a)).is_zero()
        assert (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).is_zero()


def test_wedge_above_top_degree_is_zero(chart4):
    rng = random.Random(4)
    a = _rand_form(rng, chart4, 2)
    b = _rand_form(rng, chart4, 3)
    assert wedge(a, b).degree == 5
    assert wedge(a, b).is_zero()


# -- exterior derivative ---------------------------------------------------------


def test_darboux_dalpha(chart4):
    alpha1 = DiffForm.covector(chart4, ["-y", "0", "1", "0"])
    da = ext_d(alpha1)
    assert da.component((0, 1)).as_fraction() == Fraction(1, 2)


def test_structure_equation_calibration(nilpotent6):
    # d omega_1 = omega_3 ^ omega_4 under the half convention
    p = nilpotent6.patch
    dw1 = ext_d(_covector(p, 0))
    assert (dw1 - wedge(_covector(p, 2), _covector(p, 3))).is_zero()
    assert dw1.component((2, 3)).as_fraction() == Fraction(1, 2)


def test_d_squared_zero_catalog(nilpotent6):
    assert ext_d(nilpotent6.structure.pair.dalpha1).is_zero()
    assert ext_d(nilpotent6.structure.pair.dalpha2).is_zero()


def test_d_squared_zero_random(chart4):
    rng = random.Random(17)
    for p in (1, 2):
        for _ in range(25):
            w = _rand_form(rng, chart4, p)
            assert ext_d(ext_d(w)).is_zero()


def test_cartan_formula_degree_weighted(chart4):
    # with plain contraction and the half-convention d:
    #   L_X w = (p+1) i_X dw + p d i_X w on p-forms
    rng = random.Random(23)
    for p in (1, 2):
        for _ in range(13):
            w = _rand_form(rng, chart4, p)
            x = _rand_field(rng, chart4)
            lhs = lie_derivative_form(x, w)
            rhs = interior(x, ext_d(w)).scale(p + 1) + ext_d(interior(x, w)).scale(p)
            assert (lhs - rhs).is_zero()


def test_leibniz_rule_for_d(chart4):
    rng = random.Random(29)
    for _ in range(10):
        f = _rand_scalar(rng, chart4.ctx)
        w = _rand_form(rng, chart4, 1)
        f0 = DiffForm.function(chart4, f)
        lhs = ext_d(wedge(f0, w))
        rhs = wedge(ext_d(f0), w) + wedge(f0, ext_d(w))
        assert (lhs - rhs).is_zero()


# -- contraction -------------------------------------------------------------


def test_interior_reeb_condition(nilpotent6):
    s = nilpotent6.structure
    assert interior(s.z1, s.pair.dalpha1).is_zero()
    assert interior(s.z1, s.pair.dalpha2).is_zero()
    assert interior(s.z2, s.pair.dalpha1).is_zero()


def test_interior_half_value(nilpotent6):
    p = nilpotent6.patch
    w34 = wedge(_covector(p, 2), _covector(p, 3))
    got = interior(p.basis_vector(2), w34)
    assert got.component((3,)).as_fraction() == Fraction(1, 2)
    assert len(got.components) == 1


def test_interior_squared_zero(chart4):
    rng = random.Random(31)
    for _ in range(10):
        w = _rand_form(rng, chart4, 2)
        x = _rand_field(rng, chart4)
        assert interior(x, interior(x, w)).is_zero()


# -- wedge powers ---------------------------------------------------------------


def test_wedge_power_nilpotency(nilpotent6):
    assert wedge_power(nilpotent6.structure.pair.dalpha1, 2).is_zero()


def test_wedge_power_identity_cases(nilpotent6):
    da = nilpotent6.structure.pair.dalpha1
    assert wedge_power(da, 1) is da or (wedge_power(da, 1) - da).is_zero()
    one = wedge_power(da, 0)
    assert one.degree == 0 and one.component(()).as_fraction() == 1


def test_darboux_h2_wedge_square_nonzero():
    # alpha = dz - y1 dx1 - y2 dx2 on a 5-var chart: (d alpha)^2 != 0
    ident = [[1 if i == j else 0 for j in range(5)] for i in range(5)]
    p = FramedPatch(5, ("x1", "x2", "y1", "y2", "z"), frame_matrix=ident)
    alpha = DiffForm.covector(p, ["-y1", "-y2", "0", "0", "1"])
    sq = wedge_power(ext_d(alpha), 2)
    assert sq.degree == 4 and not sq.is_zero()


# -- Lie derivative of endomorphisms and Nijenhuis torsion -----------------------


def test_lie_derivative_identity_endo(nilpotent6):
    p = nilpotent6.patch
    assert lie_derivative_endo(nilpotent6.structure.z, EndoField.identity(p)).is_zero()


def test_h_vanishes_nilpotent(nilpotent6):
    s = nilpotent6.structure
    assert lie_derivative_endo(s.z, s.phi).is_zero()


def test_flat_model_h_eigenvalues(flat_e2r):
    from cpgeo import h_tensors

    h = h_tensors(flat_e2r.structure).h
    diag = [h.matrix[i][i].as_fraction() for i in range(4)]
    assert sorted(diag) == [-1, 0, 0, 1]
    off = [h.matrix[i][j] for i in range(4) for j in range(4) if i != j]
    assert all(not x.num for x in off)


def test_nijenhuis_abelian_constant_phi():
    p = FramedPatch(4, structure_constants={})
    phi = EndoField.from_matrix(
        p, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    )
    torsion = nijenhuis(phi)
    for i in range(4):
        for j in range(4):
            assert torsion(p.basis_vector(i), p.basis_vector(j)).is_zero()


def test_nijenhuis_witness_nilpotent(nilpotent6):
    torsion = nijenhuis(nilpotent6.structure.phi)
    p = nilpotent6.patch
    val = torsion(p.basis_vector(2), p.basis_vector(4))
    assert [str(c) for c in val.components] == ["0", "0", "0", "1", "0", "1"]


def test_nijenhuis_heisenberg(heisenberg):
    torsion = nijenhuis(heisenberg.structure.phi)
    p = heisenberg.patch
    val = torsion(p.basis_vector(0), p.basis_vector(1))
    assert [str(c) for c in val.components] == ["0", "0", "2", "0"]


def test_nijenhuis_tensorial(chart4):
    # [phi, phi](f X, Y) = f [phi, phi](X, Y) for polynomial f
    rng = random.Random(37)
    phi = EndoField.from_matrix(
        chart4, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    )
    torsion = nijenhuis(phi)
    for _ in range(10):
        f = _rand_scalar(rng, chart4.ctx)
        x, y = _rand_field(rng, chart4), _rand_field(rng, chart4)
        lhs = torsion(x.scale(f), y)
        rhs = torsion(x, y).scale(f)
        assert (lhs - rhs).is_zero()
