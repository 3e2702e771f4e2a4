"""
Exception types raised by the algebraic damping toolkit.
"""

from typing import Optional


class AlgebraicDampingError(Exception):
    """Base class for all library errors."""


class ConfigError(AlgebraicDampingError, ValueError):
    """Invalid run configuration or command-line input."""


class DomainError(AlgebraicDampingError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoTangentPoint(DomainError):
    """The mode admits no tangent singularity on the J2 = 0 edge."""

    def __init__(self, message: str, special_vertex: bool = False):
        super().__init__(message)
        self.special_vertex = special_vertex


class NoInfinitySingularity(DomainError):
    """The mode frequency does not decay at large actions."""


class NonGenericCriticalPoint(DomainError):
    """Critical point with a degenerate Hessian."""

    def __init__(self, message: str, location: Optional[tuple] = None):
        super().__init__(message)
        self.location = location


class DivergentIntegral(DomainError):
    """Numerator decays too slowly at infinity (b <= 2)."""


class UnsupportedSingularity(DomainError):
    """Singularity type with no tabulated damping law."""


class AnalysisError(AlgebraicDampingError, ValueError):
    """Time-series analysis could not be carried out."""


class EmptyEnvelope(AnalysisError):
    """The series has no non-zero samples to build an envelope from."""


class InsufficientData(AnalysisError):
    """Not enough samples inside the requested window."""
