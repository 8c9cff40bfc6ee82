"""Contact pairs: axioms, Reeb fields, splittings, normality, h tensors.

A contact pair of type (h, k) on a 2h+2k+2 dimensional patch is a pair of
1-forms with ``alpha1 ^ (d alpha1)^h ^ alpha2 ^ (d alpha2)^k`` a volume form
and ``(d alpha1)^(h+1) = (d alpha2)^(k+1) = 0``.  The Reeb fields are the
unique solution of ``alpha_i(Z_j) = delta_ij`` and ``i_{Z_i} d alpha_j = 0``,
solved symbolically over the scalar field.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from cpgeo import linalg
from cpgeo.errors import ContactPairError, StructureError
from cpgeo.exterior import DiffForm, EndoField, ext_d, lie_derivative_endo, lie_derivative_form, nijenhuis, wedge, wedge_power
from cpgeo.field import Scalar
from cpgeo.patch import FramedPatch, VectorField


@dataclass(frozen=True)
class ContactPair:
    """Validated pair of contact forms with cached differentials."""

    patch: FramedPatch
    alpha1: DiffForm
    alpha2: DiffForm
    h: int
    k: int
    dalpha1: DiffForm
    dalpha2: DiffForm
    volume_status: str  # "global-exact" | "sample-verified"
    volume_coefficient: Scalar

    @property
    def pair_type(self) -> tuple[int, int]:
        return (self.h, self.k)


def validate_contact_pair(
    patch: FramedPatch, alpha1: DiffForm, alpha2: DiffForm, h: int, k: int, tol: float = 1e-9
) -> ContactPair:
    """Check the contact-pair axioms and return the validated pair."""
    n = patch.dim
    if 2 * h + 2 * k + 2 != n:
        raise ContactPairError(
            f"type ({h}, {k}) needs dimension {2 * h + 2 * k + 2}, patch has {n}"
        )
    if alpha1.degree != 1 or alpha2.degree != 1:
        raise ContactPairError("contact pair entries must be 1-forms")
    da1, da2 = ext_d(alpha1), ext_d(alpha2)
    samples = patch.sample_points
    if not wedge_power(da1, h + 1).is_zero(samples=samples, tol=tol):
        raise ContactPairError(f"wedge-power nilpotency fails: (d alpha1)^{h + 1} != 0")
    if not wedge_power(da2, k + 1).is_zero(samples=samples, tol=tol):
        raise ContactPairError(f"wedge-power nilpotency fails: (d alpha2)^{k + 1} != 0")
    volume = wedge(wedge(wedge(alpha1, wedge_power(da1, h)), alpha2), wedge_power(da2, k))
    top = tuple(range(n))
    coeff = volume.components.get(top)
    if coeff is None or not coeff.num:
        raise ContactPairError("volume form identically zero")
    if coeff.is_constant():
        status = "global-exact"
    else:
        for p in samples:
            val = coeff.evaluate(p)
            if val == 0 or (coeff.is_float and abs(val) <= tol):
                raise ContactPairError(f"volume coefficient vanishes at sample point {p}")
        status = "sample-verified"
    return ContactPair(patch, alpha1, alpha2, h, k, da1, da2, status, coeff)


def solve_reeb(patch: FramedPatch, pair: ContactPair) -> tuple[VectorField, VectorField]:
    """Unique symbolic solution of the Reeb conditions for both fields."""
    n = patch.dim
    a1 = pair.alpha1.coefficients()
    a2 = pair.alpha2.coefficients()
    rows: list[list[Scalar]] = [a1, a2]
    for da in (pair.dalpha1, pair.dalpha2):
        for i in range(n):
            rows.append([da.component((j, i)) for j in range(n)])
    ctx = patch.ctx
    one, zero = ctx.one(), ctx.zero()
    out = []
    for rhs_head in ((one, zero), (zero, one)):
        rhs = list(rhs_head) + [zero] * (2 * n)
        try:
            sol = linalg.solve(rows, rhs, ctx)
        except Exception as exc:
            raise ContactPairError(f"singular Reeb system: {exc}") from exc
        out.append(VectorField(patch, tuple(sol)))
    return out[0], out[1]


@dataclass(frozen=True)
class Splittings:
    """Frame bases of the canonical subbundles."""

    g1: list[VectorField]  # ker d alpha1 ∩ ker alpha1 ∩ ker alpha2, dim 2k
    g2: list[VectorField]  # ker d alpha2 ∩ ker alpha1 ∩ ker alpha2, dim 2h
    v: list[VectorField]  # [Z1, Z2]
    f1: list[VectorField]  # g1 + [Z2]
    f2: list[VectorField]  # g2 + [Z1]

    @property
    def horizontal(self) -> list[VectorField]:
        return self.g1 + self.g2


def splittings(
    patch: FramedPatch, pair: ContactPair, z1: VectorField, z2: VectorField
) -> Splittings:
    """Exact kernel bases for the tangent-bundle splittings."""
    ctx = patch.ctx
    n = patch.dim
    a1 = pair.alpha1.coefficients()
    a2 = pair.alpha2.coefficients()

    def kernel_basis(da: DiffForm) -> list[VectorField]:
        rows = [[da.component((j, i)) for j in range(n)] for i in range(n)]
        rows.append(a1)
        rows.append(a2)
        return [
            VectorField(patch, tuple(linalg.clear_scalar_denominators(vec)))
            for vec in linalg.nullspace(rows, ctx)
        ]

    g1 = kernel_basis(pair.dalpha1)
    g2 = kernel_basis(pair.dalpha2)
    if len(g1) != 2 * pair.k:
        raise ContactPairError(f"dim T_G1 = {len(g1)}, expected {2 * pair.k}")
    if len(g2) != 2 * pair.h:
        raise ContactPairError(f"dim T_G2 = {len(g2)}, expected {2 * pair.h}")
    for da, basis, label in ((pair.dalpha1, g2, "T_G2"), (pair.dalpha2, g1, "T_G1")):
        if basis:
            gram = [[da.evaluate(x, y) for y in basis] for x in basis]
            if linalg.rank(gram) != len(basis):
                raise ContactPairError(f"d alpha degenerates on {label}")
    return Splittings(g1=g1, g2=g2, v=[z1, z2], f1=g1 + [z2], f2=g2 + [z1])


@dataclass
class PhiReport:
    """Outcome of the structure-tensor axioms for a candidate phi."""

    valid: bool
    phi_squared_ok: bool
    reeb_annihilated: bool
    alpha_compose_ok: bool
    rank_ok: bool
    failures: list[str] = dc_field(default_factory=list)


class ContactPairStructure:
    """Contact pair plus Reeb fields, splittings and structure tensor."""

    def __init__(
        self,
        patch: FramedPatch,
        pair: ContactPair,
        phi: EndoField,
        z1: VectorField,
        z2: VectorField,
        split: Splittings,
        reeb_commute: bool,
    ):
        self.patch = patch
        self.pair = pair
        self.phi = phi
        self.z1 = z1
        self.z2 = z2
        self.splittings = split
        self.reeb_commute = reeb_commute
        self._decomposable: Optional[bool] = None

    @property
    def z(self) -> VectorField:
        return self.z1 + self.z2

    @property
    def alpha(self) -> tuple[DiffForm, DiffForm]:
        return (self.pair.alpha1, self.pair.alpha2)

    @property
    def reeb(self) -> tuple[VectorField, VectorField]:
        return (self.z1, self.z2)

    def is_decomposable(self) -> bool:
        if self._decomposable is None:
            self._decomposable = all(
                linalg.in_span(
                    [list(b.components) for b in basis],
                    list(self.phi.apply(b).components),
                )
                for basis in (self.splittings.f1, self.splittings.f2)
                for b in basis
            )
        return self._decomposable


def build_structure(
    patch: FramedPatch,
    alpha1: DiffForm,
    alpha2: DiffForm,
    h: int,
    k: int,
    phi: EndoField,
    *,
    tol: float = 1e-9,
    strict: bool = False,
) -> ContactPairStructure:
    """Validate the pair, solve the Reeb fields, and assemble the structure."""
    pair = validate_contact_pair(patch, alpha1, alpha2, h, k, tol=tol)
    z1, z2 = solve_reeb(patch, pair)
    commute = patch.lie_bracket(z1, z2).is_zero(tol=tol)
    split = splittings(patch, pair, z1, z2)
    structure = ContactPairStructure(patch, pair, phi, z1, z2, split, commute)
    if strict:
        report = validate_phi(structure, tol=tol)
        if not report.valid:
            raise StructureError("; ".join(report.failures))
    return structure


def validate_phi(structure: ContactPairStructure, tol: float = 1e-9) -> PhiReport:
    """Check phi^2 = -Id + alpha_i (x) Z_i, phi Z_i = 0, alpha_i o phi = 0, rank."""
    patch = structure.patch
    phi = structure.phi
    samples = patch.sample_points
    failures = []

    target = EndoField.identity(patch).scale(-1)
    for alpha, z in ((structure.pair.alpha1, structure.z1), (structure.pair.alpha2, structure.z2)):
        coeffs = alpha.coefficients()
        rows = tuple(
            tuple(z.components[i] * coeffs[j] for j in range(patch.dim))
            for i in range(patch.dim)
        )
        target = target + EndoField(patch, rows)
    phi2_ok = (phi.compose(phi) - target).is_zero(samples=samples, tol=tol)
    if not phi2_ok:
        failures.append("phi^2 != -Id + alpha1 (x) Z1 + alpha2 (x) Z2")

    reeb_ok = all(
        phi.apply(z).is_zero(samples=samples, tol=tol) for z in (structure.z1, structure.z2)
    )
    if not reeb_ok:
        failures.append("phi does not annihilate the Reeb fields")

    alpha_ok = True
    for alpha in structure.alpha:
        for j in range(patch.dim):
            val = alpha.evaluate(phi.column(j))
            if not val.is_zero(samples=samples, tol=tol):
                alpha_ok = False
                failures.append(f"(alpha o phi)(e_{j + 1}) != 0")
                break
    expected_rank = patch.dim - 2
    rank_ok = all(phi.rank_at(p) == expected_rank for p in samples)
    if not rank_ok:
        failures.append(f"rank phi != {expected_rank} at a sample point")

    return PhiReport(
        valid=not failures,
        phi_squared_ok=phi2_ok,
        reeb_annihilated=reeb_ok,
        alpha_compose_ok=alpha_ok,
        rank_ok=rank_ok,
        failures=failures,
    )


def is_decomposable(structure: ContactPairStructure) -> bool:
    return structure.is_decomposable()


@dataclass
class NormalityReport:
    """N^1 and N^2_i on frame pairs plus the normality verdict."""

    n1: dict  # (i, j) -> VectorField, i < j
    n2_1: dict  # (i, j) -> Scalar
    n2_2: dict
    is_normal: bool
    witness: tuple | None  # (i, j, VectorField) with nonzero N^1


def normality_tensors(structure: ContactPairStructure, tol: float = 1e-9) -> NormalityReport:
    """Evaluate N^1 and N^2_i on all frame pairs."""
    patch = structure.patch
    torsion = nijenhuis(structure.phi)
    da1, da2 = structure.pair.dalpha1, structure.pair.dalpha2
    basis = patch.basis()
    samples = patch.sample_points

    n1: dict = {}
    witness = None
    for i in range(patch.dim):
        for j in range(i + 1, patch.dim):
            val = torsion(basis[i], basis[j])
            val = val + structure.z1.scale(da1.component((i, j)) * 2)
            val = val + structure.z2.scale(da2.component((i, j)) * 2)
            n1[(i, j)] = val
            if witness is None and not val.is_zero(samples=samples, tol=tol):
                witness = (i, j, val)

    lie_alpha = {}
    for j in range(patch.dim):
        phi_ej = structure.phi.column(j)
        lie_alpha[j] = (
            lie_derivative_form(phi_ej, structure.pair.alpha1),
            lie_derivative_form(phi_ej, structure.pair.alpha2),
        )
    n2_1: dict = {}
    n2_2: dict = {}
    for i in range(patch.dim):
        for j in range(i + 1, patch.dim):
            n2_1[(i, j)] = lie_alpha[i][0].component((j,)) - lie_alpha[j][0].component((i,))
            n2_2[(i, j)] = lie_alpha[i][1].component((j,)) - lie_alpha[j][1].component((i,))

    return NormalityReport(
        n1=n1, n2_1=n2_1, n2_2=n2_2, is_normal=witness is None, witness=witness
    )


@dataclass
class HTensors:
    """The h-tensor family: h = L_Z phi / 2 and its restrictions."""

    h: EndoField
    h1: EndoField | None  # h restricted to T_F2 (zero off the block)
    h2: EndoField | None  # h restricted to T_F1
    big_h1: EndoField  # L_{Z1} phi / 2
    big_h2: EndoField  # L_{Z2} phi / 2


def projector_onto(
    patch: FramedPatch, target: list[VectorField], complement: list[VectorField]
) -> EndoField:
    """Projector onto span(target) along span(complement)."""
    ctx = patch.ctx
    n = patch.dim
    full = target + complement
    if len(full) != n:
        raise StructureError("projector needs a full direct-sum basis")
    s = [[full[a].components[i] for a in range(n)] for i in range(n)]
    s_inv = linalg.inverse(s, ctx)
    d = [
        [ctx.one() if (a == b and a < len(target)) else ctx.zero() for b in range(n)]
        for a in range(n)
    ]
    mat = linalg.mat_mul(linalg.mat_mul(s, d), s_inv)
    return EndoField(patch, tuple(tuple(row) for row in mat))


def h_tensors(structure: ContactPairStructure) -> HTensors:
    """h = L_Z phi / 2, H_i = L_{Z_i} phi / 2, and the foliation blocks."""
    half = structure.patch.ctx.constant(1) / 2
    h = lie_derivative_endo(structure.z, structure.phi).scale(half)
    big_h1 = lie_derivative_endo(structure.z1, structure.phi).scale(half)
    big_h2 = lie_derivative_endo(structure.z2, structure.phi).scale(half)
    h1 = h2 = None
    if structure.is_decomposable():
        p_f2 = projector_onto(structure.patch, structure.splittings.f2, structure.splittings.f1)
        p_f1 = projector_onto(structure.patch, structure.splittings.f1, structure.splittings.f2)
        h1 = h.compose(p_f2)
        h2 = h.compose(p_f1)
    return HTensors(h=h, h1=h1, h2=h2, big_h1=big_h1, big_h2=big_h2)
