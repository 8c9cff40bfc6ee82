"""cpgeo: exact verification engine for metric contact pair geometry.

Represents manifold patches as frames with exact rational-function
coefficients, validates contact pairs and their associated metrics, computes
the Levi-Civita connection and curvature, and mechanically checks the full
identity suite (normality tensors, h-tensor identities, Ricci and sectional
relations, horizontal lemmas, vertical-flat classification diagnostics) on
built-in and user-supplied manifolds.
"""

from cpgeo._kernels import KERNEL_BACKEND
from cpgeo.catalog import CatalogExample, build_example, list_examples
from cpgeo.errors import (
    CatalogError,
    ContactPairError,
    CpgeoError,
    FieldError,
    FrameError,
    ManifestError,
    MetricError,
    PolarizationError,
    ScalarParseError,
    StructureError,
    UnknownCheckError,
)
from cpgeo.exterior import (
    DiffForm,
    EndoField,
    ext_d,
    interior,
    lie_derivative_endo,
    lie_derivative_form,
    nijenhuis,
    wedge,
    wedge_power,
)
from cpgeo.field import Scalar, VarContext, is_zero, parse_scalar, partial_derivative
from cpgeo.manifest import Manifest, emit_manifest, load_manifest, realize, write_manifest
from cpgeo.patch import FramedPatch, VectorField, coframe, directional_derivative, lie_bracket
from cpgeo.riemann import (
    AB_tensors,
    ConnectionCoeffs,
    CurvatureTensor,
    MetricField,
    build_associated_metric,
    check_associated,
    check_compatible,
    curvature,
    fundamental_two_form,
    is_killing,
    levi_civita,
    mean_curvature,
    ric_direction,
    second_fundamental,
    sectional,
)
from cpgeo.structure import (
    ContactPair,
    ContactPairStructure,
    NormalityReport,
    Splittings,
    build_structure,
    h_tensors,
    is_decomposable,
    normality_tensors,
    solve_reeb,
    splittings,
    validate_contact_pair,
    validate_phi,
)
from cpgeo.verifier import (
    CheckResult,
    ClassificationReport,
    FlatnessReport,
    VerificationContext,
    classify_vertical_flat,
    flatness_obstruction,
    run_check,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "Scalar",
    "VarContext",
    "parse_scalar",
    "partial_derivative",
    "is_zero",
    "FramedPatch",
    "VectorField",
    "lie_bracket",
    "coframe",
    "directional_derivative",
    "DiffForm",
    "EndoField",
    "wedge",
    "wedge_power",
    "ext_d",
    "interior",
    "lie_derivative_form",
    "lie_derivative_endo",
    "nijenhuis",
    "ContactPair",
    "ContactPairStructure",
    "Splittings",
    "NormalityReport",
    "validate_contact_pair",
    "solve_reeb",
    "splittings",
    "build_structure",
    "validate_phi",
    "is_decomposable",
    "normality_tensors",
    "h_tensors",
    "MetricField",
    "ConnectionCoeffs",
    "CurvatureTensor",
    "check_compatible",
    "check_associated",
    "build_associated_metric",
    "fundamental_two_form",
    "levi_civita",
    "curvature",
    "sectional",
    "ric_direction",
    "is_killing",
    "AB_tensors",
    "second_fundamental",
    "mean_curvature",
    "CheckResult",
    "VerificationContext",
    "run_check",
    "run_suite",
    "classify_vertical_flat",
    "ClassificationReport",
    "flatness_obstruction",
    "FlatnessReport",
    "CatalogExample",
    "build_example",
    "list_examples",
    "Manifest",
    "load_manifest",
    "realize",
    "emit_manifest",
    "write_manifest",
    "CpgeoError",
    "FieldError",
    "ScalarParseError",
    "FrameError",
    "ContactPairError",
    "StructureError",
    "MetricError",
    "PolarizationError",
    "ManifestError",
    "UnknownCheckError",
    "CatalogError",
]
