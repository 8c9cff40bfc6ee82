"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CpgeoError(Exception):
    """Base class for all package errors."""


class FieldError(CpgeoError):
    """Illegal scalar arithmetic (zero denominator, context mismatch, ...)."""


class ScalarParseError(CpgeoError):
    """Scalar expression rejected by the grammar."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class FrameError(CpgeoError):
    """Invalid framed-patch data (Jacobi failure, singular frame, ...)."""


class ContactPairError(CpgeoError):
    """Forms fail the contact-pair axioms."""


class StructureError(CpgeoError):
    """Invalid contact pair structure usage."""


class MetricError(CpgeoError):
    """Metric fails symmetry / positivity requirements."""


class PolarizationError(CpgeoError):
    """Polarization construction failed (bad seed, no convergence)."""


class ManifestError(CpgeoError):
    """Malformed manifest file."""


class UnknownCheckError(CpgeoError):
    """Check id not present in the verifier registry."""


class CatalogError(CpgeoError):
    """Unknown catalog entry or invalid parameters."""
