"""Exact linear algebra over the scalar field.

Matrices are lists of rows of :class:`~cpgeo.field.Scalar`.  Pivoting is
deterministic (first row with a structurally nonzero entry), which keeps
splitting bases and reports reproducible.  For exact scalars a structural
zero test is a true zero test because representations are canonical.
"""

from __future__ import annotations

from typing import Sequence

from cpgeo.errors import FieldError
from cpgeo.field import Scalar, VarContext

Matrix = list[list[Scalar]]


def _nonzero(s: Scalar) -> bool:
    return bool(s.num)


def mat_identity(ctx: VarContext, n: int) -> Matrix:
    one, zero = ctx.one(), ctx.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a: Matrix, v: Sequence[Scalar]) -> list[Scalar]:
    out = []
    for row in a:
        acc = row[0] * v[0]
        for x, y in zip(row[1:], v[1:]):
            acc = acc + x * y
        out.append(acc)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def rref(matrix: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with first-index pivoting; returns pivots."""
    m = [list(row) for row in matrix]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, rows) if _nonzero(m[i][c])), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(rows):
            if i != r and _nonzero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: Matrix, ctx: VarContext) -> list[list[Scalar]]:
    """Deterministic kernel basis: one vector per free column, free entry 1."""
    if not matrix:
        return []
    cols = len(matrix[0])
    red, pivots = rref(matrix)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ctx.zero() for _ in range(cols)]
        vec[fc] = ctx.one()
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve(matrix: Matrix, rhs: Sequence[Scalar], ctx: VarContext) -> list[Scalar]:
    """Unique solution of a (possibly overdetermined) consistent system."""
    cols = len(matrix[0])
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if cols in pivots:
        raise FieldError("inconsistent linear system")
    if len(pivots) != cols:
        raise FieldError("linear system is singular (solution not unique)")
    sol = [ctx.zero() for _ in range(cols)]
    for r, pc in enumerate(pivots):
        sol[pc] = red[r][cols]
    return sol


def inverse(matrix: Matrix, ctx: VarContext) -> Matrix:
    n = len(matrix)
    if any(x.is_float for row in matrix for x in row):
        return _inverse_adjugate(matrix, ctx)
    aug = [list(row) + ident_row for row, ident_row in zip(matrix, mat_identity(ctx, n))]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise FieldError("matrix is singular over the scalar field")
    return [row[n:] for row in red]


def _inverse_adjugate(matrix: Matrix, ctx: VarContext) -> Matrix:
    """Adjugate/determinant inverse; keeps float rational functions small.

    Cofactor expansion never divides, so every entry comes out as a low
    degree polynomial over the single determinant denominator instead of the
    stacked fractions Gaussian elimination would produce on the float
    backend (which has no gcd reduction to clean them up).
    """
    n = len(matrix)
    memo: dict = {}

    def minor_det(row: int, cols: tuple[int, ...]) -> Scalar:
        if not cols:
            return ctx.constant(1.0)
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        for pos, c in enumerate(cols):
            entry = matrix[row][c]
            if not _nonzero(entry):
                continue
            sub = minor_det(row + 1, cols[:pos] + cols[pos + 1 :])
            term = entry * sub
            if pos % 2:
                term = -term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = ctx.constant(0.0)
        memo[key] = acc
        return acc

    all_cols = tuple(range(n))
    d = minor_det(0, all_cols)
    if not _nonzero(d):
        raise FieldError("matrix is singular over the scalar field")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            # entry (i, j) of the inverse is cofactor (j, i) / det
            cols = all_cols[:i] + all_cols[i + 1 :]
            sub = _minor_det_skip(matrix, j, cols, memo_root=None, ctx=ctx)
            cof = sub if (i + j) % 2 == 0 else -sub
            row.append(cof / d)
        out.append(row)
    return out


def _minor_det_skip(matrix: Matrix, skip_row: int, cols: tuple[int, ...], memo_root, ctx: VarContext) -> Scalar:
    """Determinant of the submatrix without row ``skip_row``, given columns."""
    rows = [r for r in range(len(matrix)) if r != skip_row]

    def rec(level: int, cols_left: tuple[int, ...]) -> Scalar:
        if not cols_left:
            return ctx.constant(1.0)
        r = rows[level]
        acc = None
        for pos, c in enumerate(cols_left):
            entry = matrix[r][c]
            if not _nonzero(entry):
                continue
            term = entry * rec(level + 1, cols_left[:pos] + cols_left[pos + 1 :])
            if pos % 2:
                term = -term
            acc = term if acc is None else acc + term
        return acc if acc is not None else ctx.constant(0.0)

    return rec(0, cols)


def det(matrix: Matrix, ctx: VarContext) -> Scalar:
    """Determinant by elimination over the fraction field."""
    n = len(matrix)
    m = [list(row) for row in matrix]
    result = ctx.one()
    sign = 1
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if _nonzero(m[i][c])), None)
        if pivot_row is None:
            return ctx.zero()
        if pivot_row != c:
            m[c], m[pivot_row] = m[pivot_row], m[c]
            sign = -sign
        result = result * m[c][c]
        inv = m[c][c]
        for i in range(c + 1, n):
            if _nonzero(m[i][c]):
                f = m[i][c] / inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return result if sign == 1 else -result


def in_span(basis: list[list[Scalar]], vector: Sequence[Scalar]) -> bool:
    """Membership of a vector in the span of the given row vectors."""
    if not basis:
        return all(not _nonzero(x) for x in vector)
    stacked = [list(v) for v in basis]
    base_rank = rank(stacked)
    return rank(stacked + [list(vector)]) == base_rank


def subspace_intersection(
    b1: list[list[Scalar]], b2: list[list[Scalar]], ctx: VarContext
) -> list[list[Scalar]]:
    """Basis of span(b1) intersected with span(b2)."""
    if not b1 or not b2:
        return []
    n = len(b1[0])
    # columns: coefficients on b1 then on b2; rows: ambient coordinates
    system = [[b1[j][i] for j in range(len(b1))] + [-b2[j][i] for j in range(len(b2))] for i in range(n)]
    kernel = nullspace(system, ctx)
    out = []
    for coeffs in kernel:
        vec = [ctx.zero() for _ in range(n)]
        for j, c in enumerate(coeffs[: len(b1)]):
            if _nonzero(c):
                vec = [v + c * x for v, x in zip(vec, b1[j])]
        if any(_nonzero(v) for v in vec):
            out.append(vec)
    # independent subset, deterministic order
    result: list[list[Scalar]] = []
    for vec in out:
        if not in_span(result, vec):
            result.append(vec)
    return result


def clear_scalar_denominators(vec: list[Scalar]) -> list[Scalar]:
    """Scale a vector of scalars to coprime polynomial entries, fixed sign.

    Multiplies by the lcm of the denominators, divides out the common
    polynomial content, and normalizes the first nonzero entry to a positive
    leading coefficient.  Float-backed vectors are only denominator-cleared.
    """
    from cpgeo.field import Scalar as _S, _divexact, _is_one, _leading, poly_gcd

    nonzero = [v for v in vec if v.num]
    if not nonzero:
        return list(vec)
    ctx = vec[0].ctx
    if any(v.is_float for v in nonzero):
        out = list(vec)
        for v in nonzero:
            if not _is_one(v.den):
                factor = _S(ctx, dict(v.den), {(0,) * ctx.nvars: 1.0}, _canonical=True)
                out = [x * factor for x in out]
        return out
    lcm = {(0,) * ctx.nvars: 1}
    for v in nonzero:
        if not _is_one(v.den):
            g = poly_gcd(lcm, v.den)
            lcm = _divexact({m: c for m, c in _poly_mul_int(lcm, v.den).items()}, g)
    factor = _S(ctx, lcm, {(0,) * ctx.nvars: 1})
    out = [x * factor for x in vec]
    nums = [v.num for v in out if v.num]
    content = nums[0]
    for p in nums[1:]:
        content = poly_gcd(content, p)
    if not _is_one(content):
        out = [
            _S(v.ctx, _divexact(v.num, content), dict(v.den)) if v.num else v for v in out
        ]
    first = next(v for v in out if v.num)
    if _leading(first.num)[1] < 0:
        out = [-v for v in out]
    return out


def _poly_mul_int(a: dict, b: dict) -> dict:
    from cpgeo._kernels import poly_mul

    return poly_mul(a, b)


def gram_schmidt_orthogonal(
    vectors: list[list[Scalar]], gram: Matrix
) -> list[list[Scalar]]:
    """Square-root-free Gram-Schmidt w.r.t. the bilinear form ``gram``.

    Returns an orthogonal (not orthonormal) basis of the same span; norms are
    left as squared norms so everything stays in the rational field.
    """

    def form(u, v):
        acc = None
        for i, ui in enumerate(u):
            if not _nonzero(ui):
                continue
            for j, vj in enumerate(v):
                if not _nonzero(vj):
                    continue
                t = ui * gram[i][j] * vj
                acc = t if acc is None else acc + t
        return acc if acc is not None else u[0].ctx.zero()

    out: list[list[Scalar]] = []
    for v in vectors:
        w = list(v)
        for u in out:
            c = form(w, u) / form(u, u)
            w = [wi - c * ui for wi, ui in zip(w, u)]
        if any(_nonzero(x) for x in w):
            out.append(w)
    return out
