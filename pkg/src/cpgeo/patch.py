"""Framed patches: the local manifold presentation all tensors live on.

Two presentations are supported.  A constant-structure Lie frame stores the
bracket table ``[e_i, e_j] = sum_k c^k_ij e_k`` with constant scalars and no
chart variables.  A coordinate frame stores an invertible matrix
``e_i = sum_mu a_i^mu d/dx^mu`` of scalars over the chart variables.  Vector
fields hold their components in the frame basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from cpgeo import linalg
from cpgeo.errors import FieldError, FrameError
from cpgeo.field import Scalar, VarContext


@dataclass(frozen=True)
class VectorField:
    """Vector field stored by frame components."""

    patch: "FramedPatch"
    components: tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.components) != self.patch.dim:
            raise FrameError(
                f"vector field needs {self.patch.dim} components, got {len(self.components)}"
            )

    def __add__(self, other: "VectorField") -> "VectorField":
        self._same_patch(other)
        return VectorField(self.patch, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._same_patch(other)
        return VectorField(self.patch, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectorField":
        return VectorField(self.patch, tuple(-a for a in self.components))

    def scale(self, s) -> "VectorField":
        if not isinstance(s, Scalar):
            s = self.patch.ctx.constant(s)
        return VectorField(self.patch, tuple(s * a for a in self.components))

    def is_zero(self, samples=None, tol: float = 1e-9) -> bool:
        samples = samples if samples is not None else self.patch.sample_points
        return all(c.is_zero(samples=samples, tol=tol) for c in self.components)

    def _same_patch(self, other: "VectorField"):
        if other.patch is not self.patch:
            raise FrameError("vector fields live on different patches")

    def map_scalars(self, f) -> "VectorField":
        return VectorField(self.patch, tuple(f(c) for c in self.components))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


class FramedPatch:
    """Chart-with-frame presentation of a manifold neighborhood."""

    def __init__(
        self,
        dim: int,
        chart_vars: Sequence[str] = (),
        *,
        structure_constants: dict[tuple[int, int], Sequence] | None = None,
        frame_matrix: Sequence[Sequence[Scalar]] | None = None,
        sample_points: Sequence[tuple] | None = None,
        n_random_points: int = 0,
        seed: int = 0,
        check: bool = True,
    ):
        if dim < 2:
            raise FrameError("patch dimension must be at least 2")
        if (structure_constants is None) == (frame_matrix is None):
            raise FrameError("exactly one frame presentation must be given")
        self.dim = dim
        self.ctx = VarContext(tuple(chart_vars))
        self._bracket_table: list[list[tuple[Scalar, ...]]] | None = None
        self._frame_matrix: list[list[Scalar]] | None = None
        self._coframe: list[list[Scalar]] | None = None

        if structure_constants is not None:
            if self.ctx.nvars:
                raise FrameError("constant-structure frames take no chart variables")
            self._init_brackets(structure_constants, check=check)
            pts: list[tuple] = [()]
        else:
            if self.ctx.nvars != dim:
                raise FrameError("coordinate frame needs one chart variable per dimension")
            self._frame_matrix = [[self._as_scalar(x) for x in row] for row in frame_matrix]
            if len(self._frame_matrix) != dim or any(len(r) != dim for r in self._frame_matrix):
                raise FrameError("frame matrix must be dim x dim")
            pts = (
                [tuple(p) for p in sample_points]
                if sample_points
                else _default_points(dim, n_random_points, seed)
            )
            if check:
                self._check_frame_invertible(pts)
        self.sample_points: tuple[tuple, ...] = tuple(pts)

    # -- construction helpers ------------------------------------------------

    def _as_scalar(self, x) -> Scalar:
        if isinstance(x, Scalar):
            if x.ctx != self.ctx:
                raise FieldError("scalar from a different context")
            return x
        if isinstance(x, str):
            return self.ctx.parse(x)
        return self.ctx.constant(x)

    def _init_brackets(self, structure_constants, check: bool):
        zero = self.ctx.zero()
        table = [[None] * self.dim for _ in range(self.dim)]
        for i in range(self.dim):
            table[i][i] = tuple(zero for _ in range(self.dim))
        for (i, j), comps in structure_constants.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim) or i == j:
                raise FrameError(f"bad bracket index pair ({i}, {j})")
            vec = tuple(self._as_scalar(c) for c in comps)
            if len(vec) != self.dim:
                raise FrameError(f"bracket [e_{i}, e_{j}] needs {self.dim} components")
            if table[i][j] is not None and tuple(table[i][j]) != vec:
                raise FrameError(f"conflicting values for bracket [e_{i}, e_{j}]")
            table[i][j] = vec
            neg = tuple(-c for c in vec)
            if table[j][i] is not None and tuple(table[j][i]) != neg:
                raise FrameError(f"bracket table violates antisymmetry at ({i}, {j})")
            table[j][i] = neg
        for i in range(self.dim):
            for j in range(self.dim):
                if table[i][j] is None:
                    table[i][j] = tuple(zero for _ in range(self.dim))
        self._bracket_table = table
        if check:
            self._check_jacobi()

    def _check_jacobi(self):
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    ei, ej, ek = self.basis_vector(i), self.basis_vector(j), self.basis_vector(k)
                    total = (
                        self.lie_bracket(ei, self.lie_bracket(ej, ek))
                        + self.lie_bracket(ej, self.lie_bracket(ek, ei))
                        + self.lie_bracket(ek, self.lie_bracket(ei, ej))
                    )
                    if not all(c.is_zero() for c in total.components):
                        raise FrameError(
                            f"Jacobi identity fails on (e_{i+1}, e_{j+1}, e_{k+1}): {total}"
                        )

    def _check_frame_invertible(self, points):
        d = linalg.det(self._frame_matrix, self.ctx)
        if not d.num:
            raise FrameError("frame matrix is singular as a rational-function matrix")
        for p in points:
            if d.evaluate(p) == 0:
                raise FrameError(f"frame matrix degenerates at sample point {p}")

    # -- basic queries ---------------------------------------------------------

    @property
    def is_lie_frame(self) -> bool:
        return self._bracket_table is not None

    @property
    def frame_matrix(self) -> list[list[Scalar]]:
        if self._frame_matrix is None:
            raise FrameError("constant-structure frames have no frame matrix")
        return self._frame_matrix

    def basis_vector(self, i: int) -> VectorField:
        comps = tuple(
            self.ctx.one() if j == i else self.ctx.zero() for j in range(self.dim)
        )
        return VectorField(self, comps)

    def basis(self) -> list[VectorField]:
        return [self.basis_vector(i) for i in range(self.dim)]

    def vector(self, components: Sequence) -> VectorField:
        return VectorField(self, tuple(self._as_scalar(c) for c in components))

    def zero_vector(self) -> VectorField:
        zero = self.ctx.zero()
        return VectorField(self, tuple(zero for _ in range(self.dim)))

    def scalar(self, value) -> Scalar:
        return self._as_scalar(value)

    def coframe(self) -> list[list[Scalar]]:
        """Rows are the dual coframe 1-forms; identity for Lie frames.

        For a coordinate frame the row ``i`` holds the dx-components of
        ``omega^i``, i.e. the transposed inverse of the frame matrix, so that
        ``omega^i(e_j) = delta^i_j`` exactly.
        """
        if self._coframe is None:
            if self.is_lie_frame:
                self._coframe = linalg.mat_identity(self.ctx, self.dim)
            else:
                self._coframe = linalg.transpose(linalg.inverse(self._frame_matrix, self.ctx))
        return self._coframe

    # -- derivations -----------------------------------------------------------

    def frame_to_coords(self, x: VectorField) -> list[Scalar]:
        """Components of the field in the coordinate basis d/dx^mu."""
        if self.is_lie_frame:
            raise FrameError("constant-structure frames have no chart coordinates")
        out = [self.ctx.zero() for _ in range(self.dim)]
        for i, xi in enumerate(x.components):
            if not xi.num:
                continue
            for mu in range(self.dim):
                out[mu] = out[mu] + xi * self._frame_matrix[i][mu]
        return out

    def coords_to_frame(self, comps: Sequence[Scalar]) -> VectorField:
        cof = self.coframe()
        frame_comps = tuple(
            sum((comps[mu] * cof[i][mu] for mu in range(self.dim)), self.ctx.zero())
            for i in range(self.dim)
        )
        return VectorField(self, frame_comps)

    def directional_derivative(self, x: VectorField, f: Scalar) -> Scalar:
        """Derivative of the scalar f along the vector field x."""
        if self.is_lie_frame or f.is_constant():
            return self.ctx.zero() if not f.is_float else self.ctx.constant(0.0)
        coords = self.frame_to_coords(x)
        acc = self.ctx.zero()
        for mu, c in enumerate(coords):
            if c.num:
                acc = acc + c * f.diff(mu)
        return acc

    def lie_bracket(self, x: VectorField, y: VectorField) -> VectorField:
        """Bracket [x, y] expanded through structure constants or derivatives."""
        if x.patch is not self or y.patch is not self:
            raise FrameError("vector fields live on a different patch")
        if self.is_lie_frame:
            comps = [self.ctx.zero() for _ in range(self.dim)]
            for i, xi in enumerate(x.components):
                if not xi.num:
                    continue
                for j, yj in enumerate(y.components):
                    if not yj.num or i == j:
                        continue
                    coeff = xi * yj
                    for k, c in enumerate(self._bracket_table[i][j]):
                        if c.num:
                            comps[k] = comps[k] + coeff * c
            return VectorField(self, tuple(comps))
        xc = self.frame_to_coords(x)
        yc = self.frame_to_coords(y)
        out = []
        for mu in range(self.dim):
            acc = self.ctx.zero()
            for nu in range(self.dim):
                if xc[nu].num:
                    acc = acc + xc[nu] * yc[mu].diff(nu)
                if yc[nu].num:
                    acc = acc - yc[nu] * xc[mu].diff(nu)
            out.append(acc)
        return self.coords_to_frame(out)

    def to_float(self) -> "FramedPatch":
        """Clone of the patch with float-backed scalars."""
        if self.is_lie_frame:
            sc = {
                (i, j): tuple(c.to_float() for c in self._bracket_table[i][j])
                for i in range(self.dim)
                for j in range(i + 1, self.dim)
            }
            return FramedPatch(self.dim, (), structure_constants=sc, check=False)
        fm = [[c.to_float() for c in row] for row in self._frame_matrix]
        return FramedPatch(
            self.dim,
            self.ctx.names,
            frame_matrix=fm,
            sample_points=self.sample_points,
            check=False,
        )


def _default_points(dim: int, n_random: int, seed: int) -> list[tuple]:
    """Five deterministic rational points off the hyperplanes, plus random ones."""
    points = [
        tuple(Fraction(j + 2, j + 3 + i) for i in range(dim)) for j in range(5)
    ]
    rng = random.Random(seed)
    for _ in range(n_random):
        points.append(tuple(Fraction(rng.randint(1, 40), rng.randint(41, 80)) for _ in range(dim)))
    return points


# Spec-facing module-level operations.


def lie_bracket(patch: FramedPatch, x: VectorField, y: VectorField) -> VectorField:
    return patch.lie_bracket(x, y)


def coframe(patch: FramedPatch) -> list[list[Scalar]]:
    return patch.coframe()


def directional_derivative(patch: FramedPatch, x: VectorField, f: Scalar) -> Scalar:
    return patch.directional_derivative(x, f)
