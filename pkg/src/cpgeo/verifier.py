"""The identity suite: every checkable statement as a named check.

Each check evaluates one tensor identity on all frame tuples (exact backend)
or against the patch sample points (float backend) and returns a
:class:`CheckResult` with one of four statuses: ``holds_exact``,
``holds_within_tol``, ``fails`` (always with a witness) or
``not_applicable`` (with the violated precondition).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Optional

from cpgeo import linalg
from cpgeo.errors import StructureError, UnknownCheckError
from cpgeo.exterior import EndoField, ext_d
from cpgeo.field import Scalar
from cpgeo.patch import VectorField
from cpgeo.riemann import (
    AB_tensors,
    ConnectionCoeffs,
    CurvatureTensor,
    MetricField,
    check_associated,
    check_compatible,
    curvature,
    fundamental_two_form,
    is_killing,
    levi_civita,
    mean_curvature,
    ric_direction,
)
from cpgeo.structure import (
    ContactPairStructure,
    NormalityReport,
    h_tensors,
    normality_tensors,
    projector_onto,
)

HOLDS_EXACT = "holds_exact"
HOLDS_TOL = "holds_within_tol"
FAILS = "fails"
NOT_APPLICABLE = "not_applicable"

PASSING = (HOLDS_EXACT, HOLDS_TOL, NOT_APPLICABLE)


@dataclass
class CheckResult:
    """Verdict for one identity."""

    check_id: str
    status: str
    residual: float | None = None
    witness: dict | None = None
    reason: str | None = None
    info: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in PASSING

    def to_dict(self) -> dict:
        out: dict = {"id": self.check_id, "status": self.status}
        if self.residual is not None:
            out["residual"] = self.residual
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason is not None:
            out["reason"] = self.reason
        if self.info:
            out["info"] = self.info
        return out


class VerificationContext:
    """Shared lazily-computed geometry for a (structure, metric) pair."""

    def __init__(self, structure: ContactPairStructure, g: MetricField, tol: float = 1e-9):
        self.structure = structure
        self.g = g
        self.tol = tol
        self.patch = structure.patch
        self.samples = self.patch.sample_points
        self._cache: dict = {}

    def _get(self, key: str, builder: Callable):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def conn(self) -> ConnectionCoeffs:
        return self._get("conn", lambda: levi_civita(self.patch, self.g))

    @property
    def curv(self) -> CurvatureTensor:
        return self._get("curv", lambda: curvature(self.patch, self.g, self.conn))

    @property
    def ht(self):
        return self._get("ht", lambda: h_tensors(self.structure))

    @property
    def normality(self) -> NormalityReport:
        return self._get("normality", lambda: normality_tensors(self.structure, tol=self.tol))

    @property
    def compatible(self) -> bool:
        return self._get("compatible", lambda: check_compatible(self.g, self.structure, self.tol).holds)

    @property
    def associated(self) -> bool:
        return self._get("associated", lambda: check_associated(self.g, self.structure, self.tol).holds)

    @property
    def decomposable(self) -> bool:
        return self.structure.is_decomposable()

    @property
    def nabla_phi(self) -> list[EndoField]:
        def build():
            return [
                self.conn.nabla_endo(self.patch.basis_vector(i), self.structure.phi)
                for i in range(self.patch.dim)
            ]

        return self._get("nabla_phi", build)

    @property
    def horizontal(self) -> list[VectorField]:
        return self.structure.splittings.horizontal

    @property
    def vertical_flat(self):
        """(holds, witness) for R(X, Y)Z_i = 0 on all frame pairs."""

        def build():
            n = self.patch.dim
            for m, z in enumerate(self.structure.reeb):
                for i in range(n):
                    for j in range(i + 1, n):
                        val = self.curv.of(
                            self.patch.basis_vector(i), self.patch.basis_vector(j), z
                        )
                        if not val.is_zero(samples=self.samples, tol=self.tol):
                            return (
                                False,
                                {
                                    "identity": f"R(e_{i + 1}, e_{j + 1}) Z_{m + 1}",
                                    "value": str(val),
                                },
                            )
            return True, None

        return self._get("vertical_flat", build)

    @property
    def eigensplit(self):
        return self._get("eigensplit", lambda: _eigensplit(self))

    def n1(self, i: int, j: int) -> VectorField:
        if i == j:
            return self.patch.zero_vector()
        if i < j:
            return self.normality.n1[(i, j)]
        return -self.normality.n1[(j, i)]

    def n2(self, which: int, i: int, j: int) -> Scalar:
        table = self.normality.n2_1 if which == 0 else self.normality.n2_2
        if i == j:
            return self.patch.ctx.zero()
        return table[(i, j)] if i < j else -table[(j, i)]

    # -- verdict assembly ----------------------------------------------------

    def verdict(self, check_id: str, residuals, info: dict | None = None) -> CheckResult:
        """Aggregate labeled residual scalars into a CheckResult."""
        worst = 0.0
        any_float = False
        for label, res in residuals:
            if not res.num:
                continue
            if not res.is_float:
                point = self.samples[0]
                return CheckResult(
                    check_id,
                    FAILS,
                    witness={
                        "frame": label,
                        "residual": str(res),
                        "point": [str(x) for x in point],
                        "value": float(res.evaluate(point)),
                    },
                    info=info or {},
                )
            any_float = True
            for point in self.samples:
                val = abs(res.evaluate(point))
                if val > worst:
                    worst = val
                    worst_label, worst_point = label, point
        if any_float and worst > self.tol:
            return CheckResult(
                check_id,
                FAILS,
                residual=worst,
                witness={
                    "frame": worst_label,
                    "point": [str(x) for x in worst_point],
                    "value": worst,
                },
                info=info or {},
            )
        if any_float:
            return CheckResult(check_id, HOLDS_TOL, residual=worst, info=info or {})
        return CheckResult(check_id, HOLDS_EXACT, info=info or {})


def _vector_residuals(label: str, vec: VectorField):
    return [(f"{label} [component e_{k + 1}]", c) for k, c in enumerate(vec.components)]


def _endo_residuals(label: str, endo: EndoField):
    out = []
    for i, row in enumerate(endo.matrix):
        for j, x in enumerate(row):
            if x.num:
                out.append((f"{label} [entry ({i + 1}, {j + 1})]", x))
    if not out:
        out.append((label, endo.patch.ctx.zero()))
    return out


def _requires(ctx: VerificationContext, check_id: str, *, assoc=True, decomp=True, compat=False):
    if compat and not ctx.compatible:
        return CheckResult(check_id, NOT_APPLICABLE, reason="g is not compatible")
    if assoc and not ctx.associated:
        return CheckResult(check_id, NOT_APPLICABLE, reason="g is not associated")
    if decomp and not ctx.decomposable:
        return CheckResult(check_id, NOT_APPLICABLE, reason="phi is not decomposable")
    return None


# ---------------------------------------------------------------------------
# the checks
# ---------------------------------------------------------------------------


def _check_n2_vanish(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "N2_VANISH")
    if bad:
        return bad
    res = []
    for (i, j), val in ctx.normality.n2_1.items():
        res.append((f"N2_1(e_{i + 1}, e_{j + 1})", val))
    for (i, j), val in ctx.normality.n2_2.items():
        res.append((f"N2_2(e_{i + 1}, e_{j + 1})", val))
    return ctx.verdict("N2_VANISH", res)


def _check_reeb_geodesic(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "REEB_GEODESIC", assoc=False, decomp=False, compat=True)
    if bad:
        return bad
    res = []
    for i, zi in enumerate(ctx.structure.reeb):
        for j, zj in enumerate(ctx.structure.reeb):
            res += _vector_residuals(f"nabla_Z{i + 1} Z{j + 1}", ctx.conn.nabla(zi, zj))
    return ctx.verdict("REEB_GEODESIC", res)


def _covariant_phi_rhs_mcp(ctx: VerificationContext, i: int, j: int, k: int) -> Scalar:
    """g(N1(Y,W), phi X) + 2 sum_m (da_m(phi Y, X) a_m(W) - da_m(phi W, X) a_m(Y))."""
    patch = ctx.patch
    phi = ctx.structure.phi
    basis = patch.basis()
    acc = ctx.g.inner(ctx.n1(j, k), phi.column(i))
    for m, (alpha, da) in enumerate(
        (
            (ctx.structure.pair.alpha1, ctx.structure.pair.dalpha1),
            (ctx.structure.pair.alpha2, ctx.structure.pair.dalpha2),
        )
    ):
        coeffs = alpha.coefficients()
        acc = acc + (da.evaluate(phi.column(j), basis[i]) * coeffs[k]) * 2
        acc = acc - (da.evaluate(phi.column(k), basis[i]) * coeffs[j]) * 2
    return acc


def _check_nabla_phi_general(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "NABLA_PHI_GENERAL", assoc=False, decomp=False, compat=True)
    if bad:
        return bad
    patch = ctx.patch
    phi = ctx.structure.phi
    basis = patch.basis()
    big_phi = fundamental_two_form(ctx.g, phi)
    d_phi = ext_d(big_phi)
    alphas = (ctx.structure.pair.alpha1.coefficients(), ctx.structure.pair.alpha2.coefficients())
    res = []
    n = patch.dim
    for i in range(n):
        np_i = ctx.nabla_phi[i]
        for j in range(n):
            phi_ej = phi.column(j)
            for k in range(n):
                phi_ek = phi.column(k)
                lhs = ctx.g.inner(np_i.apply(basis[j]), basis[k]) * 2
                rhs = d_phi.evaluate(basis[i], basis[j], basis[k]) * 3
                rhs = rhs - d_phi.evaluate(basis[i], phi_ej, phi_ek) * 3
                rhs = rhs + _covariant_phi_rhs_mcp(ctx, i, j, k)
                for m in range(2):
                    if alphas[m][i].num:
                        rhs = rhs + alphas[m][i] * ctx.n2(m, j, k)
                res.append((f"Eq(3) on (e_{i + 1}, e_{j + 1}, e_{k + 1})", lhs - rhs))
    return ctx.verdict("NABLA_PHI_GENERAL", res)


def _check_nabla_phi_mcp(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "NABLA_PHI_MCP")
    if bad:
        return bad
    patch = ctx.patch
    basis = patch.basis()
    res = []
    n = patch.dim
    for i in range(n):
        np_i = ctx.nabla_phi[i]
        for j in range(n):
            for k in range(n):
                lhs = ctx.g.inner(np_i.apply(basis[j]), basis[k]) * 2
                rhs = _covariant_phi_rhs_mcp(ctx, i, j, k)
                res.append((f"Eq(4) on (e_{i + 1}, e_{j + 1}, e_{k + 1})", lhs - rhs))
    return ctx.verdict("NABLA_PHI_MCP", res)


def _check_nabla_phi_reeb(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "NABLA_PHI_REEB")
    if bad:
        return bad
    res = []
    for i, z in enumerate(ctx.structure.reeb):
        res += _endo_residuals(f"nabla_Z{i + 1} phi", ctx.conn.nabla_endo(z, ctx.structure.phi))
    return ctx.verdict("NABLA_PHI_REEB", res)


def _check_h_symmetric(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "H_SYMMETRIC")
    if bad:
        return bad
    patch = ctx.patch
    basis = patch.basis()
    ht = ctx.ht
    ops = [("L_Z1 phi", ht.big_h1), ("L_Z2 phi", ht.big_h2), ("h", ht.h)]
    if ht.h1 is not None:
        ops += [("h1", ht.h1), ("h2", ht.h2)]
    res = []
    for name, op in ops:
        for i in range(patch.dim):
            for j in range(i + 1, patch.dim):
                lhs = ctx.g.inner(op.apply(basis[i]), basis[j])
                rhs = ctx.g.inner(basis[i], op.apply(basis[j]))
                res.append((f"{name} symmetry on (e_{i + 1}, e_{j + 1})", lhs - rhs))
    return ctx.verdict("H_SYMMETRIC", res)


def _check_nabla_z(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "NABLA_Z")
    if bad:
        return bad
    patch = ctx.patch
    phi, h = ctx.structure.phi, ctx.ht.h
    res = []
    for i in range(patch.dim):
        ei = patch.basis_vector(i)
        val = ctx.conn.nabla(ei, ctx.structure.z) + phi.apply(ei) + phi.apply(h.apply(ei))
        res += _vector_residuals(f"nabla_e{i + 1} Z + phi e_{i + 1} + phi h e_{i + 1}", val)
    return ctx.verdict("NABLA_Z", res)


def _check_h_anticommute(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "H_ANTICOMMUTE")
    if bad:
        return bad
    phi, ht = ctx.structure.phi, ctx.ht
    res = _endo_residuals("h phi + phi h", ht.h.compose(phi) + phi.compose(ht.h))
    if ht.h1 is not None:
        split = ctx.structure.splittings
        p2 = projector_onto(ctx.patch, split.f2, split.f1)
        p1 = projector_onto(ctx.patch, split.f1, split.f2)
        for name, hi, pi in (("h1", ht.h1, p2), ("h2", ht.h2, p1)):
            phi_i = phi.compose(pi)
            res += _endo_residuals(
                f"{name} phi_{name[-1]} + phi_{name[-1]} {name}",
                hi.compose(phi_i) + phi_i.compose(hi),
            )
    return ctx.verdict("H_ANTICOMMUTE", res)


def _check_h_traceless(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "H_TRACELESS")
    if bad:
        return bad
    ht = ctx.ht
    res = [("tr h", ht.h.trace())]
    if ht.h1 is not None:
        res += [("tr h1", ht.h1.trace()), ("tr h2", ht.h2.trace())]
    return ctx.verdict("H_TRACELESS", res)


def _check_h_horizontal(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "H_HORIZONTAL")
    if bad:
        return bad
    ht = ctx.ht
    ops = [("h", ht.h)]
    if ht.h1 is not None:
        ops += [("h1", ht.h1), ("h2", ht.h2)]
    res = []
    for m, alpha in enumerate(ctx.structure.alpha):
        for name, op in ops:
            for j in range(ctx.patch.dim):
                res.append(
                    (f"alpha_{m + 1}({name} e_{j + 1})", alpha.evaluate(op.column(j)))
                )
    return ctx.verdict("H_HORIZONTAL", res)


def _check_lemma_kernels(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "LEMMA_KERNELS", decomp=False)
    if bad:
        return bad
    res = []
    for j in range(ctx.patch.dim):
        ej = ctx.patch.basis_vector(j)
        for m, z in enumerate(ctx.structure.reeb):
            nz = ctx.conn.nabla(ej, z)
            for i, alpha in enumerate(ctx.structure.alpha):
                res.append((f"alpha_{i + 1}(nabla_e{j + 1} Z_{m + 1})", alpha.evaluate(nz)))
    return ctx.verdict("LEMMA_KERNELS", res)


def _check_curv_eq6(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "CURV_EQ6")
    if bad:
        return bad
    patch = ctx.patch
    phi, h = ctx.structure.phi, ctx.ht.h
    z = ctx.structure.z
    nabla_z_h = ctx.conn.nabla_endo(z, h)
    h2 = h.compose(h)
    res = []
    for i in range(patch.dim):
        ei = patch.basis_vector(i)
        lhs = nabla_z_h.apply(ei)
        rhs = phi.apply(ei) - h2.apply(phi.apply(ei)) - phi.apply(ctx.curv.of(ei, z, z))
        res += _vector_residuals(f"Eq(6) on e_{i + 1}", lhs - rhs)
    return ctx.verdict("CURV_EQ6", res)


def _check_curv_eq7(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "CURV_EQ7")
    if bad:
        return bad
    patch = ctx.patch
    phi, h = ctx.structure.phi, ctx.ht.h
    phi2, h2 = phi.compose(phi), h.compose(h)
    z = ctx.structure.z
    half = patch.ctx.constant(Fraction(1, 2))
    res = []
    for i in range(patch.dim):
        ei = patch.basis_vector(i)
        lhs = (ctx.curv.of(z, ei, z) - phi.apply(ctx.curv.of(z, phi.apply(ei), z))).scale(half)
        rhs = phi2.apply(ei) + h2.apply(ei)
        res += _vector_residuals(f"Eq(7) on e_{i + 1}", lhs - rhs)
    return ctx.verdict("CURV_EQ7", res)


def _check_ric_z(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "RIC_Z")
    if bad:
        return bad
    h_type, k_type = ctx.structure.pair.pair_type
    tr_h2 = ctx.ht.h.compose(ctx.ht.h).trace()
    actual = ric_direction(ctx.g, ctx.curv, ctx.structure.z)
    expected = ctx.patch.ctx.constant(h_type + k_type) - tr_h2 * Fraction(1, 2)
    info = {
        "ric_z": _scalar_repr(actual, ctx),
        "h_plus_k": h_type + k_type,
        "tr_h_squared": _scalar_repr(tr_h2, ctx),
    }
    return ctx.verdict("RIC_Z", [("Ric(Z) - (h + k - tr(h^2)/2)", actual - expected)], info)


def _check_killing_sec(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "KILLING_SEC")
    if bad:
        return bad
    patch = ctx.patch
    g, z = ctx.g, ctx.structure.z
    killing = is_killing(patch, g, z, tol=ctx.tol)
    horizontal = ctx.horizontal

    # K(Z, X) = 1/2 for all horizontal X, polarized:
    #   -g(R(Z, X)Z, Y) = g(X, Y) on horizontal pairs (uses g(Z,Z) = 2).
    sec_residuals = []
    witness_plane = None
    for a, x in enumerate(horizontal):
        rz = ctx.curv.of(z, x, z)
        for b, y in enumerate(horizontal):
            resid = -g.inner(rz, y) - g.inner(x, y)
            sec_residuals.append(((a, b), resid))
            if witness_plane is None and a == b and not resid.is_zero(
                samples=ctx.samples, tol=ctx.tol
            ):
                gxx = g.inner(x, x)
                k_val = -g.inner(rz, x) / (gxx * 2)
                witness_plane = {
                    "plane": f"span(Z, horizontal basis vector {a + 1})",
                    "X": str(x),
                    "sectional": _scalar_repr(k_val, ctx),
                }
    sec_half = all(
        r.is_zero(samples=ctx.samples, tol=ctx.tol) for _, r in sec_residuals
    )

    info = {"z_killing": killing, "all_horizontal_sectional_half": sec_half}
    if witness_plane:
        info["witness_plane"] = witness_plane

    failures = []
    if killing and not sec_half:
        failures.append("Z Killing but some horizontal plane has K != 1/2")
    if sec_half and not killing:
        failures.append("all horizontal planes have K = 1/2 but Z is not Killing")

    eq9_residuals = []
    if killing:
        a1 = ctx.structure.pair.alpha1
        a2 = ctx.structure.pair.alpha2
        for i in range(patch.dim):
            y = patch.basis_vector(i)
            lhs = ctx.curv.of(y, z, z)
            rhs = (
                y
                - ctx.structure.z1.scale(a1.evaluate(y))
                - ctx.structure.z2.scale(a2.evaluate(y))
            )
            eq9_residuals += _vector_residuals(f"Eq(9) on e_{i + 1}", lhs - rhs)

    if failures:
        return CheckResult(
            "KILLING_SEC", FAILS, witness={"broken_direction": failures}, info=info
        )
    return ctx.verdict("KILLING_SEC", eq9_residuals, info)


def _check_hor_star(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "HOR_STAR")
    if bad:
        return bad
    g, phi = ctx.g, ctx.structure.phi
    res = []
    for a, x in enumerate(ctx.horizontal):
        np_x = ctx.conn.nabla_endo(x, phi)
        for b, y in enumerate(ctx.horizontal):
            for c, w in enumerate(ctx.horizontal):
                lhs = g.inner(np_x.apply(w), phi.apply(y))
                rhs = g.inner(np_x.apply(phi.apply(w)), y)
                res.append((f"hor-star on horizontal ({a + 1}, {b + 1}, {c + 1})", lhs - rhs))
    return ctx.verdict("HOR_STAR", res)


def _check_hor_triple(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "HOR_TRIPLE")
    if bad:
        return bad
    g, phi = ctx.g, ctx.structure.phi
    res = []
    for a, x in enumerate(ctx.horizontal):
        np_x = ctx.conn.nabla_endo(x, phi)
        np_phix = ctx.conn.nabla_endo(phi.apply(x), phi)
        for b, y in enumerate(ctx.horizontal):
            for c, w in enumerate(ctx.horizontal):
                val = g.inner(np_x.apply(y), w) + g.inner(np_phix.apply(phi.apply(y)), w)
                res.append((f"hor-triple on horizontal ({a + 1}, {b + 1}, {c + 1})", val))
    return ctx.verdict("HOR_TRIPLE", res)


def _check_lemma_ab(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "LEMMA_AB")
    if bad:
        return bad
    g, phi = ctx.g, ctx.structure.phi
    ab = AB_tensors(ctx.structure, g, ctx.conn, ctx.ht.h)
    res = []
    for a, x in enumerate(ctx.horizontal):
        np_hx = ctx.conn.nabla_endo(ctx.ht.h.apply(x), phi)
        for b, y in enumerate(ctx.horizontal):
            for c, w in enumerate(ctx.horizontal):
                lhs = ab.lemma_combination(x, y, w)
                rhs = g.inner(np_hx.apply(y), w) * (-2)
                res.append((f"A+B lemma on horizontal ({a + 1}, {b + 1}, {c + 1})", lhs - rhs))
    return ctx.verdict("LEMMA_AB", res)


def _check_cor_ab(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "COR_AB")
    if bad:
        return bad
    holds, witness = ctx.vertical_flat
    if not holds:
        return CheckResult(
            "COR_AB",
            NOT_APPLICABLE,
            reason="curvature does not vanish on the vertical subbundle",
            witness=witness,
        )
    g, phi = ctx.g, ctx.structure.phi
    res = []
    for a, x in enumerate(ctx.horizontal):
        np_hx = ctx.conn.nabla_endo(ctx.ht.h.apply(x), phi)
        for b, y in enumerate(ctx.horizontal):
            for c, w in enumerate(ctx.horizontal):
                res.append(
                    (
                        f"g((nabla_hX phi)Y, W) on horizontal ({a + 1}, {b + 1}, {c + 1})",
                        g.inner(np_hx.apply(y), w),
                    )
                )
    return ctx.verdict("COR_AB", res)


def _check_foliation_min(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "FOLIATION_MIN")
    if bad:
        return bad
    split = ctx.structure.splittings
    res = []
    for a, x in enumerate(split.f1):
        for b, y in enumerate(split.f2):
            res.append((f"g(F1 basis {a + 1}, F2 basis {b + 1})", ctx.g.inner(x, y)))
    for name, dist, comp in (("F1", split.f1, split.f2), ("F2", split.f2, split.f1)):
        mean = mean_curvature(ctx.conn, ctx.g, ctx.patch, dist, comp)
        res += _vector_residuals(f"mean curvature of {name} leaves", mean)
    return ctx.verdict("FOLIATION_MIN", res)


def _check_eq11(ctx: VerificationContext) -> CheckResult:
    bad = _requires(ctx, "EQ11")
    if bad:
        return bad
    holds, witness = ctx.vertical_flat
    if not holds:
        return CheckResult(
            "EQ11",
            NOT_APPLICABLE,
            reason="curvature does not vanish on the vertical subbundle",
            witness=witness,
        )
    split = ctx.eigensplit
    plus1_2 = split["plus1_2"]
    res = []
    for a, x in enumerate(plus1_2):
        np_x = ctx.conn.nabla_endo(x, ctx.structure.phi)
        for b, y in enumerate(plus1_2):
            val = np_x.apply(y) - ctx.structure.z2.scale(ctx.g.inner(x, y) * 2)
            res += _vector_residuals(f"Eq(11) on [+1]_2 pair ({a + 1}, {b + 1})", val)
    info = {"dim_plus1_2": len(plus1_2)}
    if not plus1_2:
        info["note"] = "holds vacuously: [+1]_2 is zero-dimensional"
    return ctx.verdict("EQ11", res, info)


CHECK_REGISTRY: dict[str, tuple[Callable[[VerificationContext], CheckResult], str]] = {
    "N2_VANISH": (_check_n2_vanish, "core"),
    "REEB_GEODESIC": (_check_reeb_geodesic, "core"),
    "NABLA_PHI_GENERAL": (_check_nabla_phi_general, "core"),
    "NABLA_PHI_MCP": (_check_nabla_phi_mcp, "core"),
    "NABLA_PHI_REEB": (_check_nabla_phi_reeb, "core"),
    "H_SYMMETRIC": (_check_h_symmetric, "core"),
    "NABLA_Z": (_check_nabla_z, "core"),
    "H_ANTICOMMUTE": (_check_h_anticommute, "core"),
    "H_TRACELESS": (_check_h_traceless, "core"),
    "H_HORIZONTAL": (_check_h_horizontal, "core"),
    "LEMMA_KERNELS": (_check_lemma_kernels, "core"),
    "HOR_STAR": (_check_hor_star, "core"),
    "HOR_TRIPLE": (_check_hor_triple, "core"),
    "LEMMA_AB": (_check_lemma_ab, "core"),
    "FOLIATION_MIN": (_check_foliation_min, "core"),
    "CURV_EQ6": (_check_curv_eq6, "curvature"),
    "CURV_EQ7": (_check_curv_eq7, "curvature"),
    "RIC_Z": (_check_ric_z, "curvature"),
    "KILLING_SEC": (_check_killing_sec, "curvature"),
    "COR_AB": (_check_cor_ab, "curvature"),
    "EQ11": (_check_eq11, "curvature"),
}


def run_check(
    structure: ContactPairStructure,
    g: MetricField,
    check_id: str,
    tol: float = 1e-9,
    context: VerificationContext | None = None,
) -> CheckResult:
    """Evaluate one registered identity."""
    if check_id not in CHECK_REGISTRY:
        raise UnknownCheckError(f"unknown check id {check_id!r}")
    ctx = context if context is not None else VerificationContext(structure, g, tol)
    return CHECK_REGISTRY[check_id][0](ctx)


def run_suite(
    structure: ContactPairStructure,
    g: MetricField,
    suite: str = "all",
    tol: float = 1e-9,
) -> list[CheckResult]:
    """Run a named suite; results are ordered by check id."""
    if suite not in ("core", "curvature", "classification", "all"):
        raise UnknownCheckError(f"unknown suite {suite!r}")
    ctx = VerificationContext(structure, g, tol)
    results = []
    if suite in ("core", "curvature", "all"):
        wanted = ("core", "curvature") if suite == "all" else (suite,)
        for check_id in sorted(CHECK_REGISTRY):
            fn, group = CHECK_REGISTRY[check_id]
            if group in wanted:
                results.append(fn(ctx))
    if suite in ("classification", "all"):
        results.append(classification_check(ctx))
    return results


def _scalar_repr(s: Scalar, ctx: VerificationContext):
    if s.is_constant():
        return str(s) if not s.is_float else s.evaluate(ctx.samples[0])
    return str(s)


# ---------------------------------------------------------------------------
# classification under the vertical-flat hypothesis
# ---------------------------------------------------------------------------


@dataclass
class ClassificationReport:
    """Diagnostics for the vertical-flat local classification."""

    hypothesis: CheckResult
    h_eigenvalues: list | None = None
    eigensplit_dims: dict | None = None
    h_squared: CheckResult | None = None
    bracket_relations: CheckResult | None = None
    integrability: dict | None = None
    nabla_z_on_minus: CheckResult | None = None
    minus_block_geodesic_flat: CheckResult | None = None
    plus_block_geodesic: CheckResult | None = None
    plus1_sectional: CheckResult | None = None
    eq11_blocks: CheckResult | None = None
    model_string: str | None = None

    @property
    def passed(self) -> bool:
        parts = [
            self.hypothesis,
            self.h_squared,
            self.bracket_relations,
            self.nabla_z_on_minus,
            self.minus_block_geodesic_flat,
            self.plus_block_geodesic,
            self.plus1_sectional,
            self.eq11_blocks,
        ]
        if any(p is None or not p.passed for p in parts):
            return False
        return all(r.passed for r in (self.integrability or {}).values())

    def to_dict(self) -> dict:
        out: dict = {"hypothesis": self.hypothesis.to_dict()}
        if self.h_eigenvalues is not None:
            out["h_eigenvalues"] = self.h_eigenvalues
        if self.eigensplit_dims is not None:
            out["eigensplit_dims"] = self.eigensplit_dims
        for name in (
            "h_squared",
            "bracket_relations",
            "nabla_z_on_minus",
            "minus_block_geodesic_flat",
            "plus_block_geodesic",
            "plus1_sectional",
            "eq11_blocks",
        ):
            val = getattr(self, name)
            if val is not None:
                out[name] = val.to_dict()
        if self.integrability is not None:
            out["integrability"] = {k: v.to_dict() for k, v in self.integrability.items()}
        out["model"] = self.model_string
        return out


def _eigensplit(ctx: VerificationContext) -> dict:
    """Exact +/-1 eigenbases of h intersected with the horizontal blocks."""
    patch = ctx.patch
    h = ctx.ht.h
    ident = [list(r) for r in linalg.mat_identity(patch.ctx, patch.dim)]
    h_rows = [list(r) for r in h.matrix]
    out = {}
    for sign, name in ((1, "plus1"), (-1, "minus1")):
        shifted = [
            [h_rows[i][j] - ident[i][j] if sign == 1 else h_rows[i][j] + ident[i][j] for j in range(patch.dim)]
            for i in range(patch.dim)
        ]
        kernel = [
            linalg.clear_scalar_denominators(vec)
            for vec in linalg.nullspace(shifted, patch.ctx)
        ]
        out[name] = [VectorField(patch, tuple(v)) for v in kernel]
    split = ctx.structure.splittings
    for name, block in (("1", split.g2), ("2", split.g1)):
        block_rows = [list(b.components) for b in block]
        for ev in ("plus1", "minus1"):
            eig_rows = [list(v.components) for v in out[ev]]
            inter = linalg.subspace_intersection(eig_rows, block_rows, patch.ctx)
            out[f"{ev}_{name}"] = [
                VectorField(patch, tuple(linalg.clear_scalar_denominators(v))) for v in inter
            ]
    return out


def _membership_check(
    ctx: VerificationContext, check_id: str, items, span_vectors
) -> CheckResult:
    span_rows = [list(v.components) for v in span_vectors]
    for label, vec in items:
        if not linalg.in_span(span_rows, list(vec.components)):
            return CheckResult(
                check_id, FAILS, witness={"frame": label, "value": str(vec)}
            )
    return CheckResult(check_id, HOLDS_EXACT)


def classify_vertical_flat(
    structure: ContactPairStructure, g: MetricField, tol: float = 1e-9
) -> ClassificationReport:
    """Verify the block diagnostics of the vertical-flat classification.

    The report only claims consistency with the model splitting; it never
    asserts the local isometry itself.
    """
    if structure.pair.h < 1:
        raise StructureError("classification requires type (h, k) with h >= 1")
    if not structure.is_decomposable():
        raise StructureError("classification requires a decomposable structure")
    ctx = VerificationContext(structure, g, tol)
    holds, witness = ctx.vertical_flat
    if not holds:
        return ClassificationReport(
            hypothesis=CheckResult(
                "CLASS_HYPOTHESIS",
                FAILS,
                witness=witness,
                reason="curvature does not vanish on the vertical subbundle",
            )
        )
    hypothesis = CheckResult("CLASS_HYPOTHESIS", HOLDS_EXACT)

    phi, h = structure.phi, ctx.ht.h
    h_sq = ctx.verdict(
        "CLASS_H_SQUARED", _endo_residuals("h^2 + phi^2", h.compose(h) + phi.compose(phi))
    )

    split = ctx.eigensplit
    plus1, minus1 = split["plus1"], split["minus1"]
    dims = {
        "plus1_1": len(split["plus1_1"]),
        "minus1_1": len(split["minus1_1"]),
        "plus1_2": len(split["plus1_2"]),
        "minus1_2": len(split["minus1_2"]),
    }
    htype, ktype = structure.pair.pair_type
    if dims["plus1_1"] + dims["minus1_1"] != 2 * htype or dims["plus1_2"] + dims["minus1_2"] != 2 * ktype:
        raise StructureError(f"eigensplit dimensions {dims} inconsistent with type ({htype}, {ktype})")
    n_zero = structure.patch.dim - len(plus1) - len(minus1)
    eigenvalues = sorted([1] * len(plus1) + [-1] * len(minus1) + [0] * n_zero)

    patch = structure.patch
    bracket_items = []
    for a, x in enumerate(minus1):
        for b, y in enumerate(minus1):
            if b > a:
                bracket_items.append((f"[minus1_{a + 1}, minus1_{b + 1}]", patch.lie_bracket(x, y)))
        for m, z in enumerate(structure.reeb):
            bracket_items.append((f"[minus1_{a + 1}, Z_{m + 1}]", patch.lie_bracket(x, z)))
    for a, y in enumerate(plus1):
        for m, z in enumerate(structure.reeb):
            bracket_items.append(
                (f"[phi plus1_{a + 1}, Z_{m + 1}]", patch.lie_bracket(phi.apply(y), z))
            )
    bracket_relations = _membership_check(ctx, "CLASS_BRACKETS", bracket_items, minus1)

    integrability = {}
    dists = {
        "minus1_1": split["minus1_1"],
        "minus1_2": split["minus1_2"],
        "minus1": minus1,
        "minus1_1+Z1": split["minus1_1"] + [structure.z1],
        "minus1_2+Z2": split["minus1_2"] + [structure.z2],
        "minus1+V": minus1 + [structure.z1, structure.z2],
        "plus1": plus1,
    }
    for name, basis in dists.items():
        items = [
            (f"[{name} basis {a + 1}, {name} basis {b + 1}]", patch.lie_bracket(x, y))
            for a, x in enumerate(basis)
            for b, y in enumerate(basis)
            if b > a
        ]
        integrability[name] = _membership_check(ctx, f"CLASS_INTEGRABLE[{name}]", items, basis)

    nabla_z_res = []
    for a, x in enumerate(minus1):
        nabla_z_res += _vector_residuals(
            f"nabla_(minus1 basis {a + 1}) Z", ctx.conn.nabla(x, structure.z)
        )
    nabla_z_on_minus = ctx.verdict("CLASS_NABLA_Z_MINUS", nabla_z_res)

    minus_block = minus1 + [structure.z1, structure.z2]
    minus_block_result = _geodesic_flat_block(ctx, "CLASS_MINUS_BLOCK", minus_block, flat=True)
    plus_block_result = _geodesic_flat_block(ctx, "CLASS_PLUS_BLOCK", plus1, flat=False)

    sect_res = []
    for name in ("plus1_1", "plus1_2"):
        block = split[name]
        for a in range(len(block)):
            for b in range(a + 1, len(block)):
                x, y = block[a], block[b]
                gxx, gyy, gxy = g.inner(x, x), g.inner(y, y), g.inner(x, y)
                val = g.inner(ctx.curv.of(x, y, y), x) - (gxx * gyy - gxy * gxy) * 4
                sect_res.append((f"sectional 4 on [{name}] pair ({a + 1}, {b + 1})", val))
    plus1_sectional = ctx.verdict("CLASS_PLUS1_SECTIONAL", sect_res)
    if not sect_res:
        plus1_sectional.info["note"] = "no [+1]_j planes of dimension >= 2"

    eq11_res = []
    for name, z in (("plus1_1", structure.z1), ("plus1_2", structure.z2)):
        block = split[name]
        for a, x in enumerate(block):
            np_x = ctx.conn.nabla_endo(x, phi)
            for b, y in enumerate(block):
                val = np_x.apply(y) - z.scale(g.inner(x, y) * 2)
                eq11_res += _vector_residuals(f"Eq(11) on [{name}] pair ({a + 1}, {b + 1})", val)
    eq11_blocks = ctx.verdict("CLASS_EQ11_BLOCKS", eq11_res)

    report = ClassificationReport(
        hypothesis=hypothesis,
        h_eigenvalues=eigenvalues,
        eigensplit_dims=dims,
        h_squared=h_sq,
        bracket_relations=bracket_relations,
        integrability=integrability,
        nabla_z_on_minus=nabla_z_on_minus,
        minus_block_geodesic_flat=minus_block_result,
        plus_block_geodesic=plus_block_result,
        plus1_sectional=plus1_sectional,
        eq11_blocks=eq11_blocks,
    )
    if report.passed:
        report.model_string = model_string(htype, ktype)
    return report


def _geodesic_flat_block(
    ctx: VerificationContext, check_id: str, block, flat: bool
) -> CheckResult:
    """Totally geodesic (and optionally flat) leaf checks for a distribution."""
    if not block:
        return CheckResult(check_id, HOLDS_EXACT, info={"note": "zero-dimensional block"})
    patch = ctx.patch
    res = []
    span_rows = [list(v.components) for v in block]
    for a, x in enumerate(block):
        for b, y in enumerate(block):
            nab = ctx.conn.nabla(x, y)
            if not linalg.in_span(span_rows, list(nab.components)):
                return CheckResult(
                    check_id,
                    FAILS,
                    witness={
                        "frame": f"nabla of block pair ({a + 1}, {b + 1}) leaves the block",
                        "value": str(nab),
                    },
                )
    if flat:
        for a, x in enumerate(block):
            for b, y in enumerate(block):
                for c, w in enumerate(block):
                    rv = ctx.curv.of(x, y, w)
                    for d, v in enumerate(block):
                        res.append(
                            (
                                f"g(R(block {a + 1}, {b + 1}) block {c + 1}, block {d + 1})",
                                ctx.g.inner(rv, v),
                            )
                        )
    return ctx.verdict(check_id, res)


def model_string(h: int, k: int) -> str:
    """Model splitting label; a curvature-4 sphere factor of dimension 1 is a line."""
    parts = [f"E^{h + 1}", "S^%d(4)" % h if h >= 2 else "E^1"]
    if k >= 1:
        parts += [f"E^{k + 1}", "S^%d(4)" % k if k >= 2 else "E^1"]
    else:
        parts.append("E^1")
    return " x ".join(parts)


def classification_check(ctx: VerificationContext) -> CheckResult:
    """classify_vertical_flat wrapped as a single suite entry."""
    if ctx.structure.pair.h < 1:
        return CheckResult(
            "CLASSIFICATION", NOT_APPLICABLE, reason="classification requires h >= 1"
        )
    if not ctx.decomposable:
        return CheckResult(
            "CLASSIFICATION", NOT_APPLICABLE, reason="phi is not decomposable"
        )
    report = classify_vertical_flat(ctx.structure, ctx.g, tol=ctx.tol)
    if report.hypothesis.status == FAILS:
        return CheckResult(
            "CLASSIFICATION",
            NOT_APPLICABLE,
            reason="curvature does not vanish on the vertical subbundle",
            witness=report.hypothesis.witness,
            info={"report": report.to_dict()},
        )
    status = HOLDS_EXACT if report.passed else FAILS
    return CheckResult(
        "CLASSIFICATION",
        status,
        info={"model": report.model_string, "report": report.to_dict()},
    )


# ---------------------------------------------------------------------------
# flatness obstruction
# ---------------------------------------------------------------------------


@dataclass
class FlatnessReport:
    verdict: str
    details: dict

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "details": self.details}


def flatness_obstruction(
    structure: ContactPairStructure,
    g: MetricField,
    tol: float = 1e-9,
    assume_flat: bool = False,
) -> FlatnessReport:
    """Normality-based flatness obstruction and the flat-type bound.

    A normal pair forces Ric(Z) = h + k > 0, so the metric cannot be flat.
    A genuinely flat metric must satisfy h, k <= 1 and tr h^2 = 2(h + k).
    """
    if not structure.is_decomposable():
        raise StructureError("flatness obstruction requires a decomposable structure")
    ctx = VerificationContext(structure, g, tol)
    htype, ktype = structure.pair.pair_type
    normal = ctx.normality.is_normal
    details: dict = {"type": [htype, ktype], "normal": normal}

    if assume_flat and (htype > 1 or ktype > 1):
        details["flat_verified"] = "asserted"
        details["bound"] = "violated: flat metrics require h, k <= 1"
        return FlatnessReport("inconsistent_with_flat_type_bound", details)

    if normal:
        ric = ric_direction(g, ctx.curv, structure.z)
        details["certificate"] = {
            "ric_z": _scalar_repr(ric, ctx),
            "expected_h_plus_k": htype + ktype,
            "matches": (ric - ctx.patch.ctx.constant(htype + ktype)).is_zero(
                samples=ctx.samples, tol=tol
            ),
        }
        return FlatnessReport("flat_impossible", details)

    flat = ctx.curv.is_flat(tol=tol) if not assume_flat else None
    if assume_flat or flat:
        details["flat_verified"] = bool(flat) if flat is not None else "asserted"
        if htype > 1 or ktype > 1:
            details["bound"] = "violated: flat metrics require h, k <= 1"
            return FlatnessReport("inconsistent_with_flat_type_bound", details)
        tr_h2 = ctx.ht.h.compose(ctx.ht.h).trace()
        details["tr_h_squared"] = _scalar_repr(tr_h2, ctx)
        details["tr_h_squared_matches_2hk"] = (
            tr_h2 - ctx.patch.ctx.constant(2 * (htype + ktype))
        ).is_zero(samples=ctx.samples, tol=tol)
        return FlatnessReport("flat_confirmed" if flat else "flat_asserted_consistent", details)

    return FlatnessReport("no_obstruction_from_these_criteria", details)
