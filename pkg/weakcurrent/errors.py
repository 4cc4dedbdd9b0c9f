# weakcurrent/errors.py

from typing import Optional


class WeakCurrentError(Exception):
    """Base class for every error raised by weakcurrent."""


class DomainError(WeakCurrentError, ValueError):
    """An input lies outside the domain where a formula is defined."""


class NoTransitionError(DomainError):
    """The initial state has no +x group velocity (p_x <= 0)."""


class UndefinedDirectionError(DomainError):
    """The momentum is at the Dirac point, so its direction is undefined."""


class SingularPostselectionError(DomainError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class RegimeError(DomainError):
    """The requested region is empty for the given ballistic time."""


class QuadratureConvergenceError(WeakCurrentError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error_bound: float, evaluations: int = 0):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
        self.evaluations = evaluations


class ConfigError(WeakCurrentError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def error_kind(error: Exception) -> str:
    """Short machine-readable category used in one-line error reports."""
    if isinstance(error, DomainError):
        return "domain"
    if isinstance(error, QuadratureConvergenceError):
        return "convergence"
    if isinstance(error, ConfigError):
        return "config"
    return "internal"
