"""Metric layer: associated metrics, Levi-Civita connection, curvature.

Sign conventions: the curvature operator is
``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``,
the Ricci form is the trace ``Ric(X, Y) = tr(V -> R(V, X)Y)``, and the
sectional curvature of a nondegenerate plane is
``K(X, Y) = g(R(X,Y)Y, X) / (g(X,X) g(Y,Y) - g(X,Y)^2)``.
The directional Ricci value reported for the Reeb sum is
``Ric(X, X) / g(X, X)``, which matches summing sectional curvatures over an
orthogonal complement of the direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from cpgeo import linalg
from cpgeo.errors import MetricError, PolarizationError, StructureError
from cpgeo.exterior import DiffForm, EndoField
from cpgeo.field import Scalar
from cpgeo.patch import FramedPatch, VectorField
from cpgeo.structure import ContactPair, ContactPairStructure, Splittings, solve_reeb, splittings


@dataclass(frozen=True)
class MetricField:
    """Symmetric metric tensor by frame components g_ij = g(e_i, e_j)."""

    patch: FramedPatch
    matrix: tuple[tuple[Scalar, ...], ...]

    @classmethod
    def from_matrix(cls, patch: FramedPatch, rows, *, check: bool = True) -> "MetricField":
        mat = tuple(tuple(patch.scalar(x) for x in row) for row in rows)
        g = cls(patch, mat)
        if check:
            g.validate()
        return g

    def validate(self):
        n = self.patch.dim
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise MetricError("metric matrix must be dim x dim")
        for i in range(n):
            for j in range(i + 1, n):
                if not (self.matrix[i][j] - self.matrix[j][i]).is_zero(
                    samples=self.patch.sample_points
                ):
                    raise MetricError(f"metric is not symmetric at ({i + 1}, {j + 1})")
        for point in self.patch.sample_points:
            vals = [[x.evaluate(point) for x in row] for row in self.matrix]
            for d in range(1, n + 1):
                det = _numeric_det([row[:d] for row in vals[:d]])
                if det <= 0:
                    raise MetricError(
                        f"leading principal minor {d} nonpositive at sample {point}"
                    )

    def inner(self, x: VectorField, y: VectorField) -> Scalar:
        acc = self.patch.ctx.zero()
        for i, xi in enumerate(x.components):
            if not xi.num:
                continue
            for j, yj in enumerate(y.components):
                if yj.num and self.matrix[i][j].num:
                    acc = acc + xi * self.matrix[i][j] * yj
        return acc

    def inverse(self) -> list[list[Scalar]]:
        return linalg.inverse([list(r) for r in self.matrix], self.patch.ctx)

    def map_scalars(self, f) -> "MetricField":
        return MetricField(self.patch, tuple(tuple(f(x) for x in row) for row in self.matrix))


def _numeric_det(rows) -> float:
    if isinstance(rows[0][0], Fraction):
        n = len(rows)
        m = [list(r) for r in rows]
        det = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return 0.0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            for i in range(c + 1, n):
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return float(det)
    return float(np.linalg.det(np.array(rows, dtype=float)))


# ---------------------------------------------------------------------------
# compatible / associated checks
# ---------------------------------------------------------------------------


@dataclass
class MetricCheck:
    holds: bool
    witnesses: list  # (description, i, j, lhs, rhs)


def check_compatible(g: MetricField, structure: ContactPairStructure, tol: float = 1e-9) -> MetricCheck:
    """g(phi X, phi Y) = g(X, Y) - a1(X) a1(Y) - a2(X) a2(Y) on frame pairs."""
    patch = structure.patch
    basis = patch.basis()
    a1 = structure.pair.alpha1.coefficients()
    a2 = structure.pair.alpha2.coefficients()
    samples = patch.sample_points
    witnesses = []
    for i in range(patch.dim):
        phi_ei = structure.phi.column(i)
        for j in range(i, patch.dim):
            lhs = g.inner(phi_ei, structure.phi.column(j))
            rhs = g.inner(basis[i], basis[j]) - a1[i] * a1[j] - a2[i] * a2[j]
            if not (lhs - rhs).is_zero(samples=samples, tol=tol):
                witnesses.append(("g(phi e_i, phi e_j) mismatch", i, j, lhs, rhs))
    for alpha, z, label in (
        (a1, structure.z1, "g(Z1, .) != alpha1"),
        (a2, structure.z2, "g(Z2, .) != alpha2"),
    ):
        for j in range(patch.dim):
            lhs = g.inner(z, basis[j])
            if not (lhs - alpha[j]).is_zero(samples=samples, tol=tol):
                witnesses.append((label, j, j, lhs, alpha[j]))
    return MetricCheck(holds=not witnesses, witnesses=witnesses)


def check_associated(g: MetricField, structure: ContactPairStructure, tol: float = 1e-9) -> MetricCheck:
    """g(X, phi Y) = (d a1 + d a2)(X, Y) and g(X, Z_i) = a_i(X) on frame pairs."""
    patch = structure.patch
    basis = patch.basis()
    da = structure.pair.dalpha1 + structure.pair.dalpha2
    samples = patch.sample_points
    witnesses = []
    for i in range(patch.dim):
        for j in range(patch.dim):
            lhs = g.inner(basis[i], structure.phi.column(j))
            rhs = da.component((i, j))
            if not (lhs - rhs).is_zero(samples=samples, tol=tol):
                witnesses.append(("g(e_i, phi e_j) != (da1+da2)(e_i, e_j)", i, j, lhs, rhs))
    a1 = structure.pair.alpha1.coefficients()
    a2 = structure.pair.alpha2.coefficients()
    for alpha, z, label in ((a1, structure.z1, "g(., Z1)"), (a2, structure.z2, "g(., Z2)")):
        for j in range(patch.dim):
            lhs = g.inner(basis[j], z)
            if not (lhs - alpha[j]).is_zero(samples=samples, tol=tol):
                witnesses.append((f"{label} != alpha", j, j, lhs, alpha[j]))
    return MetricCheck(holds=not witnesses, witnesses=witnesses)


def fundamental_two_form(g: MetricField, phi: EndoField) -> DiffForm:
    """Phi(X, Y) = g(phi X, Y)."""
    patch = g.patch
    comps = {}
    for i in range(patch.dim):
        phi_ei = phi.column(i)
        for j in range(i + 1, patch.dim):
            val = g.inner(phi_ei, patch.basis_vector(j))
            if val.num:
                comps[(i, j)] = val
    return DiffForm(patch, 2, comps)


# ---------------------------------------------------------------------------
# Levi-Civita connection and curvature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionCoeffs:
    """Christoffel symbols: nabla_{e_i} e_j = sum_k Gamma^k_ij e_k."""

    patch: FramedPatch
    gamma: tuple  # gamma[i][j][k]

    def nabla_basis(self, i: int, j: int) -> VectorField:
        return VectorField(self.patch, self.gamma[i][j])

    def nabla(self, x: VectorField, y: VectorField) -> VectorField:
        """nabla_X Y for arbitrary fields (derivative term included)."""
        patch = self.patch
        comps = [patch.ctx.zero() for _ in range(patch.dim)]
        for i, xi in enumerate(x.components):
            if not xi.num:
                continue
            for k in range(patch.dim):
                dk = patch.directional_derivative(patch.basis_vector(i), y.components[k])
                if dk.num:
                    comps[k] = comps[k] + xi * dk
            for j, yj in enumerate(y.components):
                if not yj.num:
                    continue
                for k in range(patch.dim):
                    if self.gamma[i][j][k].num:
                        comps[k] = comps[k] + xi * yj * self.gamma[i][j][k]
        return VectorField(patch, tuple(comps))

    def nabla_endo(self, x: VectorField, t: EndoField) -> EndoField:
        """(nabla_X T)(Y) = nabla_X (T Y) - T(nabla_X Y), column by column."""
        patch = self.patch
        cols = []
        for j in range(patch.dim):
            ej = patch.basis_vector(j)
            col = self.nabla(x, t.column(j)) - t.apply(self.nabla(x, ej))
            cols.append(col.components)
        rows = tuple(tuple(cols[j][i] for j in range(patch.dim)) for i in range(patch.dim))
        return EndoField(patch, rows)


def levi_civita(patch: FramedPatch, g: MetricField) -> ConnectionCoeffs:
    """Koszul formula solved exactly against the metric Gram matrix."""
    n = patch.dim
    basis = patch.basis()
    ginv = g.inverse()
    brackets = [[patch.lie_bracket(basis[i], basis[j]) for j in range(n)] for i in range(n)]
    lie_frame = patch.is_lie_frame

    def d_g(i: int, j: int, k: int) -> Scalar:
        return patch.directional_derivative(basis[i], g.matrix[j][k])

    gamma = []
    for i in range(n):
        row = []
        for j in range(n):
            rhs = []
            for k in range(n):
                acc = g.inner(brackets[i][j], basis[k])
                acc = acc - g.inner(brackets[j][k], basis[i])
                acc = acc + g.inner(brackets[k][i], basis[j])
                if not lie_frame:
                    acc = acc + d_g(i, j, k) + d_g(j, i, k) - d_g(k, i, j)
                rhs.append(acc)
            half = patch.ctx.constant(Fraction(1, 2))
            coeffs = tuple(
                sum((ginv[k][m] * rhs[m] for m in range(1, n)), ginv[k][0] * rhs[0]) * half
                for k in range(n)
            )
            row.append(coeffs)
        gamma.append(tuple(row))
    return ConnectionCoeffs(patch, tuple(gamma))


@dataclass(frozen=True)
class CurvatureTensor:
    """R(e_i, e_j)e_k = sum_l R[i][j][k][l] e_l, plus Ricci and scalar."""

    patch: FramedPatch
    r: tuple
    ricci: tuple  # ricci[j][k] = Ric(e_j, e_k)
    scalar_curvature: Scalar

    def of_basis(self, i: int, j: int, k: int) -> VectorField:
        return VectorField(self.patch, self.r[i][j][k])

    def of(self, x: VectorField, y: VectorField, w: VectorField) -> VectorField:
        """R(X, Y)W by multilinear expansion (R is tensorial)."""
        patch = self.patch
        comps = [patch.ctx.zero() for _ in range(patch.dim)]
        for i, xi in enumerate(x.components):
            if not xi.num:
                continue
            for j, yj in enumerate(y.components):
                if not yj.num:
                    continue
                cij = xi * yj
                for k, wk in enumerate(w.components):
                    if not wk.num:
                        continue
                    c = cij * wk
                    for l in range(patch.dim):
                        if self.r[i][j][k][l].num:
                            comps[l] = comps[l] + c * self.r[i][j][k][l]
        return VectorField(patch, tuple(comps))

    def ric(self, x: VectorField, y: VectorField) -> Scalar:
        patch = self.patch
        acc = patch.ctx.zero()
        for j, xj in enumerate(x.components):
            if not xj.num:
                continue
            for k, yk in enumerate(y.components):
                if yk.num and self.ricci[j][k].num:
                    acc = acc + xj * yk * self.ricci[j][k]
        return acc

    def is_flat(self, samples=None, tol: float = 1e-9) -> bool:
        samples = samples if samples is not None else self.patch.sample_points
        n = self.patch.dim
        return all(
            self.r[i][j][k][l].is_zero(samples=samples, tol=tol)
            for i in range(n)
            for j in range(n)
            for k in range(n)
            for l in range(n)
        )


def curvature(patch: FramedPatch, g: MetricField, conn: ConnectionCoeffs) -> CurvatureTensor:
    """Brute-force curvature tensor with Ricci and scalar curvature."""
    n = patch.dim
    basis = patch.basis()
    r = []
    for i in range(n):
        plane = []
        for j in range(n):
            row = []
            if j <= i:
                # fill from antisymmetry later
                plane.append(None)
                continue
            bracket = patch.lie_bracket(basis[i], basis[j])
            for k in range(n):
                val = conn.nabla(basis[i], conn.nabla_basis(j, k))
                val = val - conn.nabla(basis[j], conn.nabla_basis(i, k))
                val = val - conn.nabla(bracket, basis[k])
                row.append(val.components)
            plane.append(tuple(row))
        r.append(plane)
    zero = patch.ctx.zero()
    zero_row = tuple(tuple(zero for _ in range(n)) for _ in range(n))
    full = []
    for i in range(n):
        plane = []
        for j in range(n):
            if i == j:
                plane.append(zero_row)
            elif j > i:
                plane.append(r[i][j])
            else:
                plane.append(
                    tuple(tuple(-c for c in comp) for comp in r[j][i])
                )
        full.append(tuple(plane))
    r_t = tuple(full)

    ricci = []
    for j in range(n):
        row = []
        for k in range(n):
            acc = zero
            for i in range(n):
                if r_t[i][j][k][i].num:
                    acc = acc + r_t[i][j][k][i]
            row.append(acc)
        ricci.append(tuple(row))
    ginv = g.inverse()
    scal = zero
    for j in range(n):
        for k in range(n):
            if ricci[j][k].num and ginv[j][k].num:
                scal = scal + ginv[j][k] * ricci[j][k]
    return CurvatureTensor(patch, r_t, tuple(ricci), scal)


def sectional(g: MetricField, r: CurvatureTensor, x: VectorField, y: VectorField) -> Scalar:
    """Sectional curvature of the plane spanned by x, y."""
    gxx, gyy, gxy = g.inner(x, x), g.inner(y, y), g.inner(x, y)
    denom = gxx * gyy - gxy * gxy
    if not denom.num:
        raise MetricError("degenerate plane for sectional curvature")
    return g.inner(r.of(x, y, y), x) / denom


def ric_direction(g: MetricField, r: CurvatureTensor, x: VectorField) -> Scalar:
    """Ric(X, X) / g(X, X); matches the h+k - tr(h^2)/2 formula for X = Z."""
    gxx = g.inner(x, x)
    if not gxx.num:
        raise MetricError("ric_direction needs a nonzero direction")
    return r.ric(x, x) / gxx


def is_killing(patch: FramedPatch, g: MetricField, x: VectorField, tol: float = 1e-9) -> bool:
    """L_X g = 0: X g(Y,W) = g([X,Y],W) + g(Y,[X,W]) on frame pairs."""
    basis = patch.basis()
    samples = patch.sample_points
    for i in range(patch.dim):
        for j in range(i, patch.dim):
            lhs = patch.directional_derivative(x, g.matrix[i][j])
            rhs = g.inner(patch.lie_bracket(x, basis[i]), basis[j]) + g.inner(
                basis[i], patch.lie_bracket(x, basis[j])
            )
            if not (lhs - rhs).is_zero(samples=samples, tol=tol):
                return False
    return True


# ---------------------------------------------------------------------------
# A / B tensors (horizontal curvature machinery)
# ---------------------------------------------------------------------------


class ABTensors:
    """Exact evaluators for the two horizontal comparison tensors.

    A(X,Y,W) = -g(Y,(nabla_X phi)W) + g(phi Y,(nabla_X phi)phi W)
               - g(Y,(nabla_{phi X} phi)phi W) - g(phi Y,(nabla_{phi X} phi)W)
    B(X,Y,W) = -g(X,(nabla_Y phi h)W) + g(X,(nabla_{phi Y} phi h)phi W)
               - g(phi X,(nabla_Y phi h)phi W) - g(phi X,(nabla_{phi Y} phi h)W)
    """

    def __init__(self, structure: ContactPairStructure, g: MetricField, conn: ConnectionCoeffs, h: EndoField):
        if not structure.is_decomposable():
            raise StructureError("A/B tensors need a decomposable structure")
        self.structure = structure
        self.g = g
        self.conn = conn
        self.phi = structure.phi
        self.phih = structure.phi.compose(h)

    def _nabla_phi(self, x: VectorField) -> EndoField:
        return self.conn.nabla_endo(x, self.phi)

    def _nabla_phih(self, x: VectorField) -> EndoField:
        return self.conn.nabla_endo(x, self.phih)

    def a(self, x: VectorField, y: VectorField, w: VectorField) -> Scalar:
        g, phi = self.g, self.phi
        np_x = self._nabla_phi(x)
        np_phix = self._nabla_phi(phi.apply(x))
        phi_y, phi_w = phi.apply(y), phi.apply(w)
        return (
            -g.inner(y, np_x.apply(w))
            + g.inner(phi_y, np_x.apply(phi_w))
            - g.inner(y, np_phix.apply(phi_w))
            - g.inner(phi_y, np_phix.apply(w))
        )

    def b(self, x: VectorField, y: VectorField, w: VectorField) -> Scalar:
        g, phi = self.g, self.phi
        nh_y = self._nabla_phih(y)
        nh_phiy = self._nabla_phih(phi.apply(y))
        phi_x, phi_w = phi.apply(x), phi.apply(w)
        return (
            -g.inner(x, nh_y.apply(w))
            + g.inner(x, nh_phiy.apply(phi_w))
            - g.inner(phi_x, nh_y.apply(phi_w))
            - g.inner(phi_x, nh_phiy.apply(w))
        )

    def lemma_combination(self, x: VectorField, y: VectorField, w: VectorField) -> Scalar:
        """A + B(X,Y,W) - B(X,W,Y), the left side of the horizontal lemma."""
        return self.a(x, y, w) + self.b(x, y, w) - self.b(x, w, y)


def AB_tensors(structure: ContactPairStructure, g: MetricField, conn: ConnectionCoeffs, h: EndoField) -> ABTensors:
    return ABTensors(structure, g, conn, h)


# ---------------------------------------------------------------------------
# second fundamental form helpers
# ---------------------------------------------------------------------------


def second_fundamental(
    conn: ConnectionCoeffs,
    patch: FramedPatch,
    dist: list[VectorField],
    complement: list[VectorField],
):
    """sigma(X, Y) = component of nabla_X Y along the complement."""
    from cpgeo.structure import projector_onto

    proj = projector_onto(patch, complement, dist)

    def sigma(x: VectorField, y: VectorField) -> VectorField:
        return proj.apply(conn.nabla(x, y))

    return sigma


def mean_curvature(
    conn: ConnectionCoeffs,
    g: MetricField,
    patch: FramedPatch,
    dist: list[VectorField],
    complement: list[VectorField],
) -> VectorField:
    """Trace of the second fundamental form over a g-orthogonal basis."""
    sigma = second_fundamental(conn, patch, dist, complement)
    basis_rows = linalg.gram_schmidt_orthogonal(
        [list(v.components) for v in dist], [list(r) for r in g.matrix]
    )
    total = patch.zero_vector()
    for row in basis_rows:
        v = VectorField(patch, tuple(row))
        total = total + sigma(v, v).scale(patch.ctx.one() / g.inner(v, v))
    return total


# ---------------------------------------------------------------------------
# polarization: build an associated metric from the pair alone
# ---------------------------------------------------------------------------


def build_associated_metric(
    patch: FramedPatch,
    pair: ContactPair,
    z1: VectorField,
    z2: VectorField,
    seed_metric: np.ndarray | None = None,
    *,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> tuple[EndoField, MetricField]:
    """Polarize the symplectic blocks into a float-backed associated (phi, g).

    On each horizontal block T_G_i carrying the symplectic form given by the
    opposite d alpha, the seed metric is polarized (Newton iteration for the
    orthogonal polar factor) into a compatible complex structure and block
    metric; the vertical block is forced to g(Z_i, .) = alpha_i.  The
    resulting phi is decomposable by construction.
    """
    split = splittings(patch, pair, z1, z2)
    basis = split.g1 + split.g2 + [z1, z2]
    n = patch.dim
    point = patch.sample_points[0]

    def block_matrix(form: DiffForm, vectors) -> np.ndarray:
        m = len(vectors)
        out = np.zeros((m, m))
        for a in range(m):
            for b in range(m):
                val = form.evaluate(vectors[a], vectors[b])
                if not val.is_constant():
                    raise PolarizationError(
                        "symplectic block is not constant on the splitting basis; "
                        "supply the metric directly instead of polarizing"
                    )
                out[a, b] = float(val.evaluate(point))
        return out

    g_blocks = []
    j_blocks = []
    offset = 0
    for vectors, form in ((split.g1, pair.dalpha2), (split.g2, pair.dalpha1)):
        m = len(vectors)
        if m == 0:
            offset += m
            continue
        omega = block_matrix(form, vectors)
        seed = np.eye(m) if seed_metric is None else np.asarray(seed_metric, dtype=float)[offset : offset + m, offset : offset + m]
        if seed.shape != (m, m) or not np.allclose(seed, seed.T) or np.any(np.linalg.eigvalsh(seed) <= 0):
            raise PolarizationError("seed metric block is not symmetric positive-definite")
        # work in a seed-orthonormal basis
        chol = np.linalg.cholesky(seed)
        a = np.linalg.solve(chol, np.linalg.solve(chol, omega).T).T  # L^-1 omega L^-T
        j = _newton_polar(a, tol=tol, max_iter=max_iter)
        p = j.T @ a  # symmetric positive factor
        g_block = chol @ p @ chol.T
        g_blocks.append((offset, g_block))
        j_blocks.append((offset, j))
        offset += m

    g_basis = np.zeros((n, n))
    for off, blk in g_blocks:
        g_basis[off : off + blk.shape[0], off : off + blk.shape[0]] = blk
    g_basis[n - 2, n - 2] = 1.0
    g_basis[n - 1, n - 1] = 1.0

    # e_i = sum_a C[a][i] b_a where C = (S^T)^-1 and S rows are basis components
    ctx = patch.ctx
    s_field = [[b.components[i] for i in range(n)] for b in basis]
    c = linalg.inverse(linalg.transpose(s_field), patch.ctx)
    g_rows = []
    for i in range(n):
        row = []
        for j2 in range(n):
            acc = ctx.constant(0.0)
            for a in range(n):
                if not c[a][i].num:
                    continue
                for b in range(n):
                    if g_basis[a][b] and c[b][j2].num:
                        acc = acc + c[a][i].to_float() * ctx.constant(float(g_basis[a][b])) * c[b][j2].to_float()
            row.append(acc)
        g_rows.append(row)
    g = MetricField.from_matrix(patch, g_rows, check=False)

    # phi is then forced: g(e_i, phi e_j) = (da1 + da2)(e_i, e_j)
    da = pair.dalpha1 + pair.dalpha2
    d_rows = [
        [da.component((i, j)).to_float() for j in range(n)] for i in range(n)
    ]
    ginv = linalg.inverse([[x for x in row] for row in g_rows], ctx)
    phi_rows = linalg.mat_mul(ginv, d_rows)
    phi = EndoField(patch, tuple(tuple(row) for row in phi_rows))
    return phi, g


def _newton_polar(a: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Orthogonal polar factor of an invertible matrix by Newton iteration."""
    x = a.copy()
    for _ in range(max_iter):
        x_next = 0.5 * (x + np.linalg.inv(x).T)
        if np.max(np.abs(x_next - x)) < tol:
            return x_next
        x = x_next
    raise PolarizationError(f"polar iteration did not converge in {max_iter} steps")
