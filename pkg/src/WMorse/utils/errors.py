# src/WMorse/utils/errors.py
"""
Exception hierarchy. Every failure the solver can report derives from
WMorseError so the CLI can map it to an exit code.
"""

from __future__ import annotations


class WMorseError(Exception):
    """Base class for all solver errors."""


class ConfigError(WMorseError):
    """Raised when a run configuration cannot be parsed or is invalid."""


# ---- special functions / quadrature ----

class EvaluationError(WMorseError):
    """Raised when a special function or integral cannot be evaluated."""


class NonConvergence(EvaluationError):
    """Raised when the adaptive integrator misses its local error target."""


class SeedFailure(EvaluationError):
    """Raised when the asymptotic series never reaches the seed tolerance."""


class QuadratureFailure(EvaluationError):
    """Raised when adaptive quadrature cannot meet the requested tolerance."""


class OverflowGuard(EvaluationError):
    """Raised when an argument lies beyond the configured overflow guard."""


class DomainError(EvaluationError):
    """Raised when an argument is outside the domain of an operation."""


# ---- spectrum ----

class SpectrumError(WMorseError):
    """Raised when the discrete spectrum cannot be assembled."""


class EmptySpectrum(SpectrumError):
    """Raised when the potential has no bound states for the parameters."""


class IndexOutOfSpectrum(SpectrumError):
    """Raised when a level index is not part of the discrete spectrum."""


class IncompleteSpectrum(SpectrumError):
    """Raised when fewer roots than requested are found in the search window."""


class ParityOrderViolation(SpectrumError):
    """Raised when merged levels do not alternate parity."""


# ---- finite-difference oracle ----

class OracleError(WMorseError):
    """Raised by the finite-difference eigensolver."""


class InsufficientBox(OracleError):
    """Raised when an eigenvector tail at x_max is not negligible."""


class OrderAnomaly(OracleError):
    """Raised when the observed convergence order leaves the expected band."""


class SingularShift(OracleError):
    """Raised when the shifted tridiagonal factorisation breaks down."""


# ---- deformations ----

class TransformError(WMorseError):
    """Raised by the Crum / Krein-Adler machinery."""


class KinkPoint(TransformError):
    """Raised when a Wronskian is requested at the potential kink x = 0."""


class WronskianZero(TransformError):
    """Raised when a denominator Wronskian vanishes on the grid."""


class InadmissibleSet(TransformError):
    """Raised when a deletion set violates the norm positivity condition."""

    def __init__(self, message: str, violating_m: int | None = None):
        super().__init__(message)
        self.violating_m = violating_m
