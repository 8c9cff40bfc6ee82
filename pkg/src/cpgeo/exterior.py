"""Differential forms and endomorphism fields in a frame.

Normalization convention (calibrated against the contact-pair identities and
frozen by the acceptance suite): the wedge product uses the alternation
factor, so for 1-forms ``(w ^ e)(X, Y) = (w(X)e(Y) - w(Y)e(X)) / 2``, and the
exterior derivative carries the matching ``1/(p+1)`` factor, so on 1-forms
``dw(X, Y) = (X w(Y) - Y w(X) - w([X, Y])) / 2``.  With this pair the algebra
is associative and graded-commutative and ``d o d = 0``; a Lie-frame
structure equation ``dw_k = w_i ^ w_j`` is equivalent to the bracket
``[e_i, e_j] = -e_k``.

Under this convention the contraction ``i_X`` (plain slot insertion, no
degree factor) is not an antiderivation; the Cartan formula reads
``L_X = (p+1) i_X d + p d i_X`` on p-forms, equivalently ``L_X = l_X d +
d l_X`` for the degree-weighted insertion ``l_X = p i_X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

from cpgeo.errors import FrameError
from cpgeo.field import Scalar
from cpgeo.patch import FramedPatch, VectorField


def _perm_sign(seq) -> int:
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv & 1 else 1


def _sort_with_sign(indices: tuple[int, ...]):
    """(sorted tuple, sign) or None when an index repeats."""
    if len(set(indices)) != len(indices):
        return None
    return tuple(sorted(indices)), _perm_sign(indices)


@dataclass(frozen=True)
class DiffForm:
    """Alternating p-form stored sparsely on strictly increasing index tuples."""

    patch: FramedPatch
    degree: int
    components: dict

    def __post_init__(self):
        for idx in self.components:
            if len(idx) != self.degree or list(idx) != sorted(set(idx)):
                raise FrameError(f"component index {idx} is not strictly increasing")

    @classmethod
    def zero(cls, patch: FramedPatch, degree: int) -> "DiffForm":
        return cls(patch, degree, {})

    @classmethod
    def from_components(cls, patch: FramedPatch, degree: int, components: dict) -> "DiffForm":
        comps = {}
        for idx, val in components.items():
            s = patch.scalar(val)
            if s.num:
                comps[tuple(idx)] = s
        return cls(patch, degree, comps)

    @classmethod
    def function(cls, patch: FramedPatch, value) -> "DiffForm":
        """Degree-0 form (a scalar function)."""
        return cls.from_components(patch, 0, {(): patch.scalar(value)})

    @classmethod
    def covector(cls, patch: FramedPatch, coefficients) -> "DiffForm":
        """1-form from frame coefficients: alpha(e_i) = coefficients[i]."""
        return cls.from_components(
            patch, 1, {(i,): c for i, c in enumerate(coefficients)}
        )

    def component(self, idx: tuple[int, ...]) -> Scalar:
        """Value on an arbitrary basis index tuple (signed, 0 on repeats)."""
        ss = _sort_with_sign(idx)
        if ss is None:
            return self.patch.ctx.zero()
        key, sign = ss
        val = self.components.get(key)
        if val is None:
            return self.patch.ctx.zero()
        return val if sign == 1 else -val

    def coefficients(self) -> list[Scalar]:
        if self.degree != 1:
            raise FrameError("coefficients() is for 1-forms")
        return [self.component((i,)) for i in range(self.patch.dim)]

    def __add__(self, other: "DiffForm") -> "DiffForm":
        if other.patch is not self.patch or other.degree != self.degree:
            raise FrameError("cannot add forms of different degree or patch")
        comps = dict(self.components)
        for idx, val in other.components.items():
            s = comps.get(idx)
            s = val if s is None else s + val
            if s.num:
                comps[idx] = s
            else:
                comps.pop(idx, None)
        return DiffForm(self.patch, self.degree, comps)

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + other.scale(-1)

    def __neg__(self) -> "DiffForm":
        return self.scale(-1)

    def scale(self, s) -> "DiffForm":
        if not isinstance(s, Scalar):
            s = self.patch.ctx.constant(s)
        if not s.num:
            return DiffForm(self.patch, self.degree, {})
        return DiffForm(
            self.patch, self.degree, {i: s * v for i, v in self.components.items()}
        )

    def evaluate(self, *vectors: VectorField) -> Scalar:
        """Alternating multilinear extension to arbitrary vector fields."""
        if len(vectors) != self.degree:
            raise FrameError(f"a {self.degree}-form takes {self.degree} arguments")
        if self.degree == 0:
            return self.components.get((), self.patch.ctx.zero())
        acc = self.patch.ctx.zero()
        for idx, val in self.components.items():
            minor = _alternating_minor(vectors, idx)
            if minor is not None and minor.num:
                acc = acc + val * minor
        return acc

    def is_zero(self, samples=None, tol: float = 1e-9) -> bool:
        samples = samples if samples is not None else self.patch.sample_points
        return all(v.is_zero(samples=samples, tol=tol) for v in self.components.values())

    def map_scalars(self, f) -> "DiffForm":
        return DiffForm(self.patch, self.degree, {i: f(v) for i, v in self.components.items()})


def _alternating_minor(vectors, idx):
    """det of the minor [vectors[b].components[idx[a]]]_{ab}, None if zero-ish."""
    p = len(idx)
    if p == 1:
        return vectors[0].components[idx[0]]
    ctx = vectors[0].patch.ctx
    from itertools import permutations

    acc = None
    for perm in permutations(range(p)):
        term = None
        for a in range(p):
            c = vectors[perm[a]].components[idx[a]]
            if not c.num:
                term = None
                break
            term = c if term is None else term * c
        if term is None:
            continue
        if _perm_sign(perm) < 0:
            term = -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else ctx.zero()


# ---------------------------------------------------------------------------
# wedge / exterior derivative / contraction
# ---------------------------------------------------------------------------


def wedge(w: DiffForm, e: DiffForm) -> DiffForm:
    """Wedge product under the alternation convention (see module docstring)."""
    if w.patch is not e.patch:
        raise FrameError("forms live on different patches")
    p, q = w.degree, e.degree
    n = w.patch.dim
    if p + q > n:
        return DiffForm.zero(w.patch, p + q)
    if p == 0:
        return e.scale(w.components.get((), w.patch.ctx.zero()))
    if q == 0:
        return w.scale(e.components.get((), e.patch.ctx.zero()))
    factor = Fraction(factorial(p) * factorial(q), factorial(p + q))
    comps: dict = {}
    for wi, wv in w.components.items():
        for ei, ev in e.components.items():
            if set(wi) & set(ei):
                continue
            merged = wi + ei
            key, sign = _sort_with_sign(merged)
            term = wv * ev * factor
            if sign < 0:
                term = -term
            cur = comps.get(key)
            cur = term if cur is None else cur + term
            if cur.num:
                comps[key] = cur
            else:
                comps.pop(key, None)
    return DiffForm(w.patch, p + q, comps)


def wedge_power(w: DiffForm, m: int) -> DiffForm:
    """m-fold wedge power; power 0 is the constant function 1."""
    if m < 0:
        raise FrameError("wedge power must be nonnegative")
    if m == 0:
        return DiffForm.function(w.patch, 1)
    out = w
    for _ in range(m - 1):
        out = wedge(out, w)
    return out


def ext_d(w: DiffForm) -> DiffForm:
    """Exterior derivative with the 1/(p+1) normalization."""
    patch = w.patch
    p = w.degree
    n = patch.dim
    if p + 1 > n:
        return DiffForm.zero(patch, p + 1)
    basis = patch.basis()
    comps: dict = {}
    inv = Fraction(1, p + 1)
    for idx in combinations(range(n), p + 1):
        acc = patch.ctx.zero()
        for a, ia in enumerate(idx):
            rest = idx[:a] + idx[a + 1 :]
            val = w.components.get(rest)
            if val is not None and not patch.is_lie_frame:
                term = patch.directional_derivative(basis[ia], val)
                if term.num:
                    acc = acc + term if a % 2 == 0 else acc - term
        for a in range(p + 1):
            for b in range(a + 1, p + 1):
                bracket = patch.lie_bracket(basis[idx[a]], basis[idx[b]])
                if all(not c.num for c in bracket.components):
                    continue
                rest = tuple(x for t, x in enumerate(idx) if t != a and t != b)
                contr = patch.ctx.zero()
                for k, bk in enumerate(bracket.components):
                    if bk.num:
                        sub = w.component((k,) + rest)
                        if sub.num:
                            contr = contr + bk * sub
                if contr.num:
                    acc = acc - contr if (a + b) % 2 == 1 else acc + contr
        acc = acc * inv
        if acc.num:
            comps[idx] = acc
    return DiffForm(patch, p + 1, comps)


def interior(x: VectorField, w: DiffForm) -> DiffForm:
    """Contraction (i_X w)(Y_2, ..., Y_p) = w(X, Y_2, ..., Y_p)."""
    if w.degree < 1:
        raise FrameError("cannot contract a 0-form")
    patch = w.patch
    comps: dict = {}
    for idx in combinations(range(patch.dim), w.degree - 1):
        acc = patch.ctx.zero()
        for k, xk in enumerate(x.components):
            if xk.num:
                sub = w.component((k,) + idx)
                if sub.num:
                    acc = acc + xk * sub
        if acc.num:
            comps[idx] = acc
    return DiffForm(patch, w.degree - 1, comps)


def lie_derivative_form(x: VectorField, w: DiffForm) -> DiffForm:
    """(L_X w)(Y...) = X(w(Y...)) - sum_a w(..., [X, Y_a], ...) on the frame."""
    patch = w.patch
    p = w.degree
    if p == 0:
        f = w.components.get((), patch.ctx.zero())
        return DiffForm.from_components(patch, 0, {(): patch.directional_derivative(x, f)})
    comps: dict = {}
    for idx in combinations(range(patch.dim), p):
        val = w.components.get(idx)
        acc = (
            patch.directional_derivative(x, val)
            if val is not None
            else patch.ctx.zero()
        )
        for a, ia in enumerate(idx):
            bracket = patch.lie_bracket(x, patch.basis_vector(ia))
            for k, bk in enumerate(bracket.components):
                if bk.num:
                    sub = w.component(idx[:a] + (k,) + idx[a + 1 :])
                    if sub.num:
                        acc = acc - bk * sub
        if acc.num:
            comps[idx] = acc
    return DiffForm(patch, p, comps)


# ---------------------------------------------------------------------------
# endomorphism fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndoField:
    """(1,1) tensor field; column j holds the frame components of T(e_j)."""

    patch: FramedPatch
    matrix: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        n = self.patch.dim
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise FrameError("endomorphism matrix must be dim x dim")

    @classmethod
    def from_matrix(cls, patch: FramedPatch, rows) -> "EndoField":
        return cls(patch, tuple(tuple(patch.scalar(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, patch: FramedPatch) -> "EndoField":
        one, zero = patch.ctx.one(), patch.ctx.zero()
        return cls(
            patch,
            tuple(
                tuple(one if i == j else zero for j in range(patch.dim))
                for i in range(patch.dim)
            ),
        )

    @classmethod
    def zero(cls, patch: FramedPatch) -> "EndoField":
        zero = patch.ctx.zero()
        return cls(patch, tuple(tuple(zero for _ in range(patch.dim)) for _ in range(patch.dim)))

    def apply(self, x: VectorField) -> VectorField:
        n = self.patch.dim
        comps = []
        for i in range(n):
            acc = self.patch.ctx.zero()
            for j in range(n):
                if x.components[j].num and self.matrix[i][j].num:
                    acc = acc + self.matrix[i][j] * x.components[j]
            comps.append(acc)
        return VectorField(self.patch, tuple(comps))

    def column(self, j: int) -> VectorField:
        return VectorField(self.patch, tuple(self.matrix[i][j] for i in range(self.patch.dim)))

    def compose(self, other: "EndoField") -> "EndoField":
        n = self.patch.dim
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.patch.ctx.zero()
                for k in range(n):
                    if self.matrix[i][k].num and other.matrix[k][j].num:
                        acc = acc + self.matrix[i][k] * other.matrix[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return EndoField(self.patch, tuple(rows))

    def __add__(self, other: "EndoField") -> "EndoField":
        return EndoField(
            self.patch,
            tuple(
                tuple(a + b for a, b in zip(r1, r2))
                for r1, r2 in zip(self.matrix, other.matrix)
            ),
        )

    def __sub__(self, other: "EndoField") -> "EndoField":
        return self + other.scale(-1)

    def __neg__(self) -> "EndoField":
        return self.scale(-1)

    def scale(self, s) -> "EndoField":
        if not isinstance(s, Scalar):
            s = self.patch.ctx.constant(s)
        return EndoField(
            self.patch, tuple(tuple(s * x for x in row) for row in self.matrix)
        )

    def trace(self) -> Scalar:
        acc = self.patch.ctx.zero()
        for i in range(self.patch.dim):
            acc = acc + self.matrix[i][i]
        return acc

    def rank_at(self, point) -> int:
        """Numeric rank of the matrix evaluated at one sample point."""
        import numpy as np

        vals = np.array(
            [[float(x.evaluate(point)) for x in row] for row in self.matrix]
        )
        return int(np.linalg.matrix_rank(vals, tol=1e-9))

    def is_zero(self, samples=None, tol: float = 1e-9) -> bool:
        samples = samples if samples is not None else self.patch.sample_points
        return all(
            x.is_zero(samples=samples, tol=tol) for row in self.matrix for x in row
        )

    def map_scalars(self, f) -> "EndoField":
        return EndoField(self.patch, tuple(tuple(f(x) for x in row) for row in self.matrix))


def lie_derivative_endo(z: VectorField, t: EndoField) -> EndoField:
    """(L_Z T)(X) = [Z, TX] - T([Z, X]), assembled column by column."""
    patch = t.patch
    cols = []
    for j in range(patch.dim):
        ej = patch.basis_vector(j)
        col = patch.lie_bracket(z, t.column(j)) - t.apply(patch.lie_bracket(z, ej))
        cols.append(col.components)
    rows = tuple(
        tuple(cols[j][i] for j in range(patch.dim)) for i in range(patch.dim)
    )
    return EndoField(patch, rows)


def nijenhuis(phi: EndoField):
    """Nijenhuis torsion [phi, phi] as a map of vector-field pairs."""
    patch = phi.patch
    phi2 = phi.compose(phi)

    def torsion(x: VectorField, y: VectorField) -> VectorField:
        term1 = phi2.apply(patch.lie_bracket(x, y))
        term2 = patch.lie_bracket(phi.apply(x), phi.apply(y))
        term3 = phi.apply(patch.lie_bracket(phi.apply(x), y))
        term4 = phi.apply(patch.lie_bracket(x, phi.apply(y)))
        return term1 + term2 - term3 - term4

    return torsion
