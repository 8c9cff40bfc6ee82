"""Manifest files: the on-disk format for patches, pairs and tensors.

A manifest is a TOML file with scalar entries written in the expression
grammar of :mod:`cpgeo.field` ("p/q" for rationals).  Indices are 1-based.

Top-level keys (emitted in this order, unknown keys are rejected)::

    name        = "nilpotent6"          # optional label
    dimension   = 6
    coordinates = ["x", "y"]            # chart variables; omit for Lie frames
    type        = [1, 1]                # contact-pair type (h, k)
    backend     = "exact"               # optional: "exact" | "float"
    alpha1      = ["1", "0", ...]       # frame coefficients of the 1-forms
    alpha2      = ["0", "1", ...]
    phi         = [["0", ...], ...]     # optional; row i, column j = component
                                        # i of phi(e_j)
    metric      = [["1", ...], ...]     # optional symmetric matrix
    sample_points = [["1/2", ...], ...] # optional rational points

    [frame]                             # exactly one presentation:
    structure_constants  = [[i, j, k, "c"], ...]   # [e_i, e_j] = sum_k c e_k
    coordinate_frame     = [["1", ...], ...]       # e_i = sum_mu a[i][mu] d/dx^mu
    coframe_differentials = [[k, i, j, "c"], ...]  # d w_k = sum c * w_i ^ w_j

A manifest may list both ``structure_constants`` and
``coframe_differentials``; it is rejected unless they agree under the fixed
convention (d w_k = w_i ^ w_j  <=>  [e_i, e_j] = -e_k).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from cpgeo.errors import ManifestError, ScalarParseError
from cpgeo.exterior import DiffForm, EndoField
from cpgeo.patch import FramedPatch
from cpgeo.riemann import MetricField

_TOP_KEYS = (
    "name",
    "dimension",
    "coordinates",
    "type",
    "backend",
    "alpha1",
    "alpha2",
    "phi",
    "metric",
    "sample_points",
    "frame",
)
_FRAME_KEYS = ("structure_constants", "coordinate_frame", "coframe_differentials")


@dataclass
class Manifest:
    """Parsed manifest prior to geometry construction."""

    dimension: int
    pair_type: tuple[int, int]
    alpha1: list[str]
    alpha2: list[str]
    name: str | None = None
    coordinates: list[str] = dc_field(default_factory=list)
    backend: str = "exact"
    structure_constants: list | None = None
    coordinate_frame: list | None = None
    coframe_differentials: list | None = None
    phi: list | None = None
    metric: list | None = None
    sample_points: list | None = None


def load_manifest(path: str | Path) -> Manifest:
    """Parse and structurally validate a manifest file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ManifestError(f"{path}: no such file")
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"{path}: {exc}")
    return parse_manifest_dict(data, label=str(path))


def parse_manifest_dict(data: dict, label: str = "<manifest>") -> Manifest:
    for key in data:
        if key not in _TOP_KEYS:
            raise ManifestError(f"{label}: unknown key {key!r}")
    for key in ("dimension", "type", "alpha1", "alpha2", "frame"):
        if key not in data:
            raise ManifestError(f"{label}: missing required key {key!r}")
    frame = data["frame"]
    if not isinstance(frame, dict):
        raise ManifestError(f"{label}: [frame] must be a table")
    for key in frame:
        if key not in _FRAME_KEYS:
            raise ManifestError(f"{label}: unknown frame key {key!r}")
    presentations = [k for k in ("structure_constants", "coordinate_frame") if k in frame]
    if "coframe_differentials" in frame and "coordinate_frame" in frame:
        raise ManifestError(f"{label}: coframe differentials need a Lie frame")
    if not presentations and "coframe_differentials" not in frame:
        raise ManifestError(f"{label}: [frame] needs one of {_FRAME_KEYS}")
    if "coordinate_frame" in frame and "structure_constants" in frame:
        raise ManifestError(f"{label}: give either structure constants or a coordinate frame")

    dim = data["dimension"]
    pair_type = data["type"]
    if not (isinstance(pair_type, list) and len(pair_type) == 2):
        raise ManifestError(f"{label}: type must be [h, k]")
    backend = data.get("backend", "exact")
    if backend not in ("exact", "float"):
        raise ManifestError(f"{label}: backend must be 'exact' or 'float'")
    m = Manifest(
        dimension=int(dim),
        pair_type=(int(pair_type[0]), int(pair_type[1])),
        alpha1=list(data["alpha1"]),
        alpha2=list(data["alpha2"]),
        name=data.get("name"),
        coordinates=list(data.get("coordinates", [])),
        backend=backend,
        structure_constants=frame.get("structure_constants"),
        coordinate_frame=frame.get("coordinate_frame"),
        coframe_differentials=frame.get("coframe_differentials"),
        phi=data.get("phi"),
        metric=data.get("metric"),
        sample_points=data.get("sample_points"),
    )
    _check_index_ranges(m, label)
    return m


def _check_index_ranges(m: Manifest, label: str):
    n = m.dimension
    for entry in m.structure_constants or []:
        if len(entry) != 4:
            raise ManifestError(f"{label}: structure constant entries are [i, j, k, c]")
        i, j, k = int(entry[0]), int(entry[1]), int(entry[2])
        if not all(1 <= x <= n for x in (i, j, k)) or i == j:
            raise ManifestError(f"{label}: bad structure constant indices {entry[:3]}")
    for entry in m.coframe_differentials or []:
        if len(entry) != 4:
            raise ManifestError(f"{label}: coframe differential entries are [k, i, j, c]")
        k, i, j = int(entry[0]), int(entry[1]), int(entry[2])
        if not all(1 <= x <= n for x in (i, j, k)) or i == j:
            raise ManifestError(f"{label}: bad coframe differential indices {entry[:3]}")
    for name, mat in (("phi", m.phi), ("metric", m.metric), ("coordinate_frame", m.coordinate_frame)):
        if mat is not None:
            if len(mat) != n or any(len(row) != n for row in mat):
                raise ManifestError(f"{label}: {name} must be a {n} x {n} matrix")
    for vec_name, vec in (("alpha1", m.alpha1), ("alpha2", m.alpha2)):
        if len(vec) != n:
            raise ManifestError(f"{label}: {vec_name} needs {n} entries")


@dataclass
class LoadedGeometry:
    """Manifest realized as geometry objects."""

    manifest: Manifest
    patch: FramedPatch
    alpha1: DiffForm
    alpha2: DiffForm
    phi: EndoField | None
    metric: MetricField | None


def _brackets_from_differentials(diffs: list, n: int) -> dict:
    """d w_k = sum c w_i ^ w_j with i < j  <=>  [e_i, e_j] = -sum_k c e_k."""
    table: dict[tuple[int, int], list] = {}
    for k, i, j, c in ((int(e[0]), int(e[1]), int(e[2]), str(e[3])) for e in diffs):
        sign = 1
        if i > j:
            i, j = j, i
            sign = -1
        comps = table.setdefault((i - 1, j - 1), ["0"] * n)
        prev = comps[k - 1]
        term = f"-({c})" if sign == 1 else f"({c})"
        comps[k - 1] = term if prev == "0" else f"{prev} + {term}"
    return table


def realize(manifest: Manifest) -> LoadedGeometry:
    """Build patch and tensors from a manifest (exact or float backend)."""
    n = manifest.dimension
    if manifest.structure_constants is not None or manifest.coframe_differentials is not None:
        if manifest.coordinates:
            raise ManifestError("Lie-frame manifests take no coordinates")
        table: dict[tuple[int, int], list] = {}
        for entry in manifest.structure_constants or []:
            i, j, k, c = int(entry[0]) - 1, int(entry[1]) - 1, int(entry[2]) - 1, str(entry[3])
            key, sign = ((i, j), 1) if i < j else ((j, i), -1)
            comps = table.setdefault(key, ["0"] * n)
            term = f"({c})" if sign == 1 else f"-({c})"
            comps[k] = term if comps[k] == "0" else f"{comps[k]} + {term}"
        if manifest.coframe_differentials is not None:
            derived = _brackets_from_differentials(manifest.coframe_differentials, n)
            if manifest.structure_constants is not None:
                _check_consistent_brackets(table, derived, n)
            else:
                table = derived
        try:
            patch = FramedPatch(n, (), structure_constants=table)
        except ScalarParseError as exc:
            raise ManifestError(f"bad scalar in frame: {exc}")
    else:
        if len(manifest.coordinates) != n:
            raise ManifestError("coordinate frames need one coordinate name per dimension")
        patch = FramedPatch(
            n,
            manifest.coordinates,
            frame_matrix=manifest.coordinate_frame,
            sample_points=[_parse_point(p, patch_dim=n) for p in manifest.sample_points]
            if manifest.sample_points
            else None,
        )
    alpha1 = DiffForm.covector(patch, manifest.alpha1)
    alpha2 = DiffForm.covector(patch, manifest.alpha2)
    phi = EndoField.from_matrix(patch, manifest.phi) if manifest.phi is not None else None
    metric = (
        MetricField.from_matrix(patch, manifest.metric) if manifest.metric is not None else None
    )
    if manifest.backend == "float":
        patch = patch.to_float()
        alpha1 = DiffForm(patch, 1, {k: v.to_float() for k, v in alpha1.components.items()})
        alpha2 = DiffForm(patch, 1, {k: v.to_float() for k, v in alpha2.components.items()})
        if phi is not None:
            phi = EndoField(patch, tuple(tuple(x.to_float() for x in row) for row in phi.matrix))
        if metric is not None:
            metric = MetricField(
                patch, tuple(tuple(x.to_float() for x in row) for row in metric.matrix)
            )
    return LoadedGeometry(manifest, patch, alpha1, alpha2, phi, metric)


def _check_consistent_brackets(table: dict, derived: dict, n: int):
    from cpgeo.field import VarContext

    ctx = VarContext(())
    for key in set(table) | set(derived):
        a = table.get(key, ["0"] * n)
        b = derived.get(key, ["0"] * n)
        for k in range(n):
            if ctx.parse(str(a[k])) != ctx.parse(str(b[k])):
                raise ManifestError(
                    "structure constants and coframe differentials disagree on "
                    f"[e_{key[0] + 1}, e_{key[1] + 1}] (component {k + 1})"
                )


def _parse_point(entries, patch_dim: int):
    from fractions import Fraction

    if len(entries) != patch_dim:
        raise ManifestError(f"sample point needs {patch_dim} coordinates")
    out = []
    for e in entries:
        s = str(e)
        out.append(Fraction(s))
    return tuple(out)


# ---------------------------------------------------------------------------
# emission (deterministic key order, canonical scalar strings)
# ---------------------------------------------------------------------------


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    text = str(value)
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _toml_array(values) -> str:
    return "[" + ", ".join(
        _toml_array(v) if isinstance(v, (list, tuple)) else _toml_scalar(v) for v in values
    ) + "]"


def emit_manifest(m: Manifest) -> str:
    """Serialize with a fixed key order so emitted files diff cleanly."""
    lines = []
    if m.name:
        lines.append(f"name = {_toml_scalar(m.name)}")
    lines.append(f"dimension = {m.dimension}")
    if m.coordinates:
        lines.append(f"coordinates = {_toml_array(m.coordinates)}")
    lines.append(f"type = {_toml_array(list(m.pair_type))}")
    lines.append(f"backend = {_toml_scalar(m.backend)}")
    lines.append(f"alpha1 = {_toml_array(m.alpha1)}")
    lines.append(f"alpha2 = {_toml_array(m.alpha2)}")
    if m.phi is not None:
        lines.append(f"phi = {_toml_array(m.phi)}")
    if m.metric is not None:
        lines.append(f"metric = {_toml_array(m.metric)}")
    if m.sample_points is not None:
        lines.append(f"sample_points = {_toml_array(m.sample_points)}")
    lines.append("")
    lines.append("[frame]")
    if m.structure_constants is not None:
        lines.append(f"structure_constants = {_toml_array(m.structure_constants)}")
    if m.coordinate_frame is not None:
        lines.append(f"coordinate_frame = {_toml_array(m.coordinate_frame)}")
    if m.coframe_differentials is not None:
        lines.append(f"coframe_differentials = {_toml_array(m.coframe_differentials)}")
    return "\n".join(lines) + "\n"


def manifest_from_example(example) -> Manifest:
    """Export a catalog entry as a manifest."""
    patch = example.patch
    n = patch.dim
    pair = example.pair
    alpha1 = [str(c) for c in pair.alpha1.coefficients()]
    alpha2 = [str(c) for c in pair.alpha2.coefficients()]
    sc = None
    cf = None
    if patch.is_lie_frame:
        sc = []
        for i in range(n):
            for j in range(i + 1, n):
                comps = patch.lie_bracket(patch.basis_vector(i), patch.basis_vector(j)).components
                for k, c in enumerate(comps):
                    if c.num:
                        sc.append([i + 1, j + 1, k + 1, str(c)])
    else:
        cf = [[str(patch.frame_matrix[i][j]) for j in range(n)] for i in range(n)]
    phi = None
    if example.structure is not None:
        phi = [[str(x) for x in row] for row in example.structure.phi.matrix]
    metric = None
    if example.metric is not None:
        metric = [[str(x) for x in row] for row in example.metric.matrix]
    sample_points = None
    if not patch.is_lie_frame:
        sample_points = [[str(x) for x in p] for p in patch.sample_points]
    return Manifest(
        dimension=n,
        pair_type=(pair.h, pair.k),
        alpha1=alpha1,
        alpha2=alpha2,
        name=example.name,
        coordinates=list(patch.ctx.names),
        backend="exact",
        structure_constants=sc,
        coordinate_frame=cf,
        phi=phi,
        metric=metric,
        sample_points=sample_points,
    )


def write_manifest(m: Manifest, path: str | Path):
    Path(path).write_text(emit_manifest(m), encoding="utf-8")
