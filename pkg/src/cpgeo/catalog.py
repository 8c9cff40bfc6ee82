"""Built-in example manifolds covering every regime of the identity suite.

All bracket coefficients and structure-tensor signs below were derived by
requiring the associated-metric identity under the package's wedge and d
conventions (the builders recompute phi from g and the pair and assert the
match), then frozen here.  Each builder self-checks its output against the
contact-pair, phi and associated-metric validators and hard-fails on any
mismatch: a broken catalog entry is a bug, not a report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from cpgeo import linalg
from cpgeo.errors import CatalogError
from cpgeo.exterior import DiffForm, EndoField
from cpgeo.patch import FramedPatch
from cpgeo.riemann import MetricField, check_associated
from cpgeo.structure import ContactPair, ContactPairStructure, build_structure, validate_phi


@dataclass
class CatalogExample:
    """A built example: patch, validated pair, structure, metric, expectations.

    ``structure`` and ``metric`` are None for entries that ship only the
    contact pair (darboux); use :meth:`with_polarized_metric` to complete
    them with a float-backed polarization.
    """

    name: str
    params: dict
    patch: FramedPatch
    pair: "ContactPair"
    structure: ContactPairStructure | None
    metric: MetricField | None
    expected: dict

    def with_polarized_metric(self, seed_metric=None) -> "CatalogExample":
        """Complete a pair-only entry by polarizing an associated (phi, g)."""
        from cpgeo.riemann import build_associated_metric
        from cpgeo.structure import build_structure as _build, solve_reeb as _reeb

        z1, z2 = _reeb(self.patch, self.pair)
        phi, g = build_associated_metric(self.patch, self.pair, z1, z2, seed_metric)
        structure = _build(
            self.patch,
            self.pair.alpha1,
            self.pair.alpha2,
            self.pair.h,
            self.pair.k,
            phi,
        )
        return CatalogExample(
            name=self.name,
            params=dict(self.params),
            patch=self.patch,
            pair=self.pair,
            structure=structure,
            metric=g,
            expected=dict(self.expected),
        )


@dataclass(frozen=True)
class _ContactBlock:
    """A (2m+1)-dimensional contact-metric Lie-frame building block.

    ``brackets`` maps (i, j) within the block to component tuples,
    ``alpha`` is the contact covector, ``phi`` the structure tensor block,
    ``metric`` the block metric, ``m`` the contact type contribution.
    """

    dim: int
    m: int
    brackets: dict
    alpha: tuple
    phi: tuple
    metric: tuple


_HEISENBERG3 = _ContactBlock(
    dim=3,
    m=1,
    brackets={(0, 1): (0, 0, 2)},
    alpha=(0, 0, 1),
    phi=((0, -1, 0), (1, 0, 0), (0, 0, 0)),
    metric=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
)

# Euclidean-motion algebra: e3 rotates the (e1, e2) plane; the identity
# left-invariant metric is flat and the Reeb field e1 is not Killing.
_E2_MOTION = _ContactBlock(
    dim=3,
    m=1,
    brackets={(2, 0): (0, 2, 0), (2, 1): (-2, 0, 0)},
    alpha=(1, 0, 0),
    phi=((0, 0, 0), (0, 0, -1), (0, 1, 0)),
    metric=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
)

_LINE = _ContactBlock(
    dim=1, m=0, brackets={}, alpha=(1,), phi=((0,),), metric=((1,),)
)

CONTACT_BLOCKS: dict[str, _ContactBlock] = {
    "heisenberg3": _HEISENBERG3,
    "e2": _E2_MOTION,
    "line": _LINE,
}


def _product_structure(block_a: _ContactBlock, block_b: _ContactBlock, name: str) -> CatalogExample:
    """Direct-sum MCP of two contact-metric blocks (alpha1 from a, alpha2 from b)."""
    na, nb = block_a.dim, block_b.dim
    n = na + nb
    brackets = {}
    for (i, j), comps in block_a.brackets.items():
        brackets[(i, j)] = tuple(comps) + (0,) * nb
    for (i, j), comps in block_b.brackets.items():
        brackets[(i + na, j + na)] = (0,) * na + tuple(comps)
    patch = FramedPatch(n, structure_constants=brackets)
    alpha1 = DiffForm.covector(patch, tuple(block_a.alpha) + (0,) * nb)
    alpha2 = DiffForm.covector(patch, (0,) * na + tuple(block_b.alpha))
    phi_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < na and j < na:
                row.append(block_a.phi[i][j])
            elif i >= na and j >= na:
                row.append(block_b.phi[i - na][j - na])
            else:
                row.append(0)
        phi_rows.append(row)
    phi = EndoField.from_matrix(patch, phi_rows)
    g_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < na and j < na:
                row.append(block_a.metric[i][j])
            elif i >= na and j >= na:
                row.append(block_b.metric[i - na][j - na])
            else:
                row.append(0)
        g_rows.append(row)
    g = MetricField.from_matrix(patch, g_rows)
    structure = build_structure(
        patch, alpha1, alpha2, block_a.m, block_b.m, phi, strict=True
    )
    _self_check(name, structure, g)
    return CatalogExample(
        name=name,
        params={},
        patch=patch,
        pair=structure.pair,
        structure=structure,
        metric=g,
        expected={},
    )


def _self_check(name: str, structure: ContactPairStructure, g: MetricField | None):
    report = validate_phi(structure)
    if not report.valid:
        raise CatalogError(f"catalog entry {name}: invalid phi: {report.failures}")
    if g is not None:
        assoc = check_associated(g, structure)
        if not assoc.holds:
            raise CatalogError(
                f"catalog entry {name}: metric is not associated: {assoc.witnesses[:1]}"
            )
        phi_derived = derive_phi_from_metric(g, structure)
        diff = phi_derived - structure.phi
        if not diff.is_zero():
            raise CatalogError(f"catalog entry {name}: phi disagrees with g^-1 (da1 + da2)")


def derive_phi_from_metric(g: MetricField, structure: ContactPairStructure) -> EndoField:
    """The unique endomorphism with g(X, phi Y) = (d a1 + d a2)(X, Y)."""
    patch = structure.patch
    da = structure.pair.dalpha1 + structure.pair.dalpha2
    n = patch.dim
    d_rows = [[da.component((i, j)) for j in range(n)] for i in range(n)]
    ginv = g.inverse()
    rows = linalg.mat_mul(ginv, d_rows)
    return EndoField(patch, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _build_nilpotent6(**_params) -> CatalogExample:
    """The 6-dimensional nilpotent group: type (1,1), Killing Reebs, not normal."""
    brackets = {
        (2, 3): (-1, 0, 0, 0, 0, 0),
        (2, 4): (0, 0, 0, -1, 0, 0),
        (2, 5): (0, 0, 0, 0, -1, 0),
        (4, 5): (0, -1, 0, 0, 0, 0),
    }
    patch = FramedPatch(6, structure_constants=brackets)
    alpha1 = DiffForm.covector(patch, (1, 0, 0, 0, 0, 0))
    alpha2 = DiffForm.covector(patch, (0, 1, 0, 0, 0, 0))
    phi_rows = [[0] * 6 for _ in range(6)]
    phi_rows[2][3] = 1
    phi_rows[3][2] = -1
    phi_rows[4][5] = 1
    phi_rows[5][4] = -1
    phi = EndoField.from_matrix(patch, phi_rows)
    half = Fraction(1, 2)
    g = MetricField.from_matrix(
        patch,
        [
            [
                (1 if i < 2 else half) if i == j else 0
                for j in range(6)
            ]
            for i in range(6)
        ],
    )
    structure = build_structure(patch, alpha1, alpha2, 1, 1, phi, strict=True)
    _self_check("nilpotent6", structure, g)
    return CatalogExample(
        name="nilpotent6",
        params={},
        patch=patch,
        pair=structure.pair,
        structure=structure,
        metric=g,
        expected={"normal": False, "h_zero": True, "flat": False, "type": (1, 1)},
    )


def _build_heisenberg_vaisman(**_params) -> CatalogExample:
    example = _product_structure(_HEISENBERG3, _LINE, "heisenberg_vaisman")
    example.expected.update(
        {"normal": True, "h_zero": True, "flat": False, "type": (1, 0), "ric_z": 1}
    )
    return example


def _build_flat_e2r(**_params) -> CatalogExample:
    example = _product_structure(_E2_MOTION, _LINE, "flat_e2r")
    example.expected.update(
        {
            "normal": False,
            "h_zero": False,
            "flat": True,
            "type": (1, 0),
            "h_eigenvalues": [-1, 0, 0, 1],
        }
    )
    return example


def _build_flat_e2r2(**_params) -> CatalogExample:
    example = _product_structure(_E2_MOTION, _E2_MOTION, "flat_e2r2")
    example.expected.update(
        {"normal": False, "h_zero": False, "flat": True, "type": (1, 1)}
    )
    return example


def _build_product_contact(a: str = "heisenberg3", b: str = "line", **_params) -> CatalogExample:
    if a not in CONTACT_BLOCKS or b not in CONTACT_BLOCKS:
        raise CatalogError(f"unknown contact block; choose from {sorted(CONTACT_BLOCKS)}")
    example = _product_structure(CONTACT_BLOCKS[a], CONTACT_BLOCKS[b], "product_contact")
    example.expected.update({"type": (CONTACT_BLOCKS[a].m, CONTACT_BLOCKS[b].m)})
    example.params.update({"a": a, "b": b})
    return example


def _build_darboux(h: int = 1, k: int = 0, **_params) -> CatalogExample:
    """Darboux model: polynomial chart, no default metric (polarize to get one)."""
    h, k = int(h), int(k)
    if h < 0 or k < 0 or h + k == 0:
        raise CatalogError("darboux needs nonnegative h, k with h + k >= 1")
    n = 2 * h + 2 * k + 2
    names = (
        [f"x{i}" for i in range(1, h + 1)]
        + [f"y{i}" for i in range(1, h + 1)]
        + ["z"]
        + [f"u{j}" for j in range(1, k + 1)]
        + [f"v{j}" for j in range(1, k + 1)]
        + ["t"]
    )
    patch = FramedPatch(
        n,
        names,
        frame_matrix=[[1 if i == j else 0 for j in range(n)] for i in range(n)],
    )
    a1 = [patch.ctx.zero() for _ in range(n)]
    for i in range(h):
        a1[i] = -patch.ctx.variable(f"y{i + 1}")
    a1[2 * h] = patch.ctx.one()
    a2 = [patch.ctx.zero() for _ in range(n)]
    for j in range(k):
        a2[2 * h + 1 + j] = -patch.ctx.variable(f"v{j + 1}")
    a2[n - 1] = patch.ctx.one()
    alpha1 = DiffForm.covector(patch, a1)
    alpha2 = DiffForm.covector(patch, a2)
    from cpgeo.structure import solve_reeb, validate_contact_pair

    pair = validate_contact_pair(patch, alpha1, alpha2, h, k)
    solve_reeb(patch, pair)  # existence check; phi/g come from polarization
    return CatalogExample(
        name="darboux",
        params={"h": h, "k": k},
        patch=patch,
        pair=pair,
        structure=None,
        metric=None,
        expected={"type": (h, k)},
    )


_REGISTRY: dict[str, tuple[Callable[..., CatalogExample], dict]] = {
    "nilpotent6": (
        _build_nilpotent6,
        {"normal": False, "h_zero": True, "flat": False, "type": (1, 1)},
    ),
    "heisenberg_vaisman": (
        _build_heisenberg_vaisman,
        {"normal": True, "h_zero": True, "flat": False, "type": (1, 0)},
    ),
    "flat_e2r": (
        _build_flat_e2r,
        {"normal": False, "h_zero": False, "flat": True, "type": (1, 0)},
    ),
    "flat_e2r2": (
        _build_flat_e2r2,
        {"normal": False, "h_zero": False, "flat": True, "type": (1, 1)},
    ),
    "product_contact": (_build_product_contact, {"params": "a, b in contact blocks"}),
    "darboux": (_build_darboux, {"params": "h >= 0, k >= 0", "metric": "polarize"}),
}


def list_examples() -> dict[str, dict]:
    """Stable listing of the registry with expected-properties manifests."""
    return {name: dict(props) for name, (_, props) in sorted(_REGISTRY.items())}


def build_example(name: str, **params) -> CatalogExample:
    """Build and self-check a catalog entry."""
    if name not in _REGISTRY:
        raise CatalogError(f"unknown catalog entry {name!r}; see list_examples()")
    return _REGISTRY[name][0](**params)
