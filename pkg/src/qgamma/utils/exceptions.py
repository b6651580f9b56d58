"""
Custom exception classes for qgamma.

This module provides a hierarchy of custom exceptions for the failure modes
of the numerical pipeline, so callers (and the CLI exit-code mapping) can
tell a bad input apart from a quadrature that did not converge.
"""

from typing import Any, List, Optional


class QGammaError(Exception):
    """
    Base exception class for all qgamma-specific errors.

    Provides a foundation for all custom exceptions with optional
    error codes and user-friendly messages.
    """

    def __init__(self, message: str, error_code: Optional[str] = None) -> None:
        """
        Initialize the base exception.

        Args:
            message: Human-readable error message
            error_code: Optional error code for programmatic handling
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code

    def __str__(self) -> str:
        """Return formatted error message."""
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ConfigurationError(QGammaError):
    """
    Raised when there are configuration-related errors.

    Examples:
        - Unknown keys in a run config
        - Invalid environment overrides
        - Missing configuration files
    """

    def __init__(self, message: str, config_key: Optional[str] = None) -> None:
        """
        Initialize configuration error.

        Args:
            message: Error description
            config_key: Optional configuration key that caused the error
        """
        super().__init__(message, "CONFIG_ERROR")
        self.config_key = config_key


class FileSystemError(QGammaError):
    """
    Raised when file system operations fail.

    Examples:
        - Output directory not writable
        - Run artifacts missing for the report command
    """

    def __init__(
        self, message: str, path: Optional[str] = None, operation: Optional[str] = None
    ) -> None:
        """
        Initialize file system error.

        Args:
            message: Error description
            path: Optional file/directory path
            operation: Optional operation that failed (read, write, create, etc.)
        """
        super().__init__(message, "FILESYSTEM_ERROR")
        self.path = path
        self.operation = operation


class ValidationError(QGammaError):
    """
    Raised when input validation fails.

    Examples:
        - gamma outside (0, n/2)
        - Radial nodes not strictly increasing
        - Grid shape mismatch between a field and its basis
    """

    def __init__(
        self,
        message: str,
        parameter: Optional[str] = None,
        expected_type: Optional[str] = None,
    ) -> None:
        """
        Initialize validation error.

        Args:
            message: Error description
            parameter: Optional parameter name that failed validation
            expected_type: Optional expected type/format
        """
        super().__init__(message, "VALIDATION_ERROR")
        self.parameter = parameter
        self.expected_type = expected_type


class NumericalAccuracyError(QGammaError):
    """
    Raised when a computed quantity misses its accuracy target.

    Examples:
        - Profile without enough decay for the Mellin route
        - Measured bubble ratio not constant in r
    """

    def __init__(self, message: str, residual: Optional[float] = None) -> None:
        super().__init__(message, "ACCURACY_ERROR")
        self.residual = residual


class QuadratureError(QGammaError):
    """Raised when an integral does not reach tolerance."""

    def __init__(
        self,
        message: str,
        estimate: Optional[float] = None,
        error_bound: Optional[float] = None,
    ) -> None:
        super().__init__(message, "QUADRATURE_ERROR")
        self.estimate = estimate
        self.error_bound = error_bound


class DomainError(QGammaError):
    """
    Raised when a formula is evaluated outside its range of validity.

    Examples:
        - c1 requested for n <= 2 (divergent integral)
        - Homogeneity degree beta outside (1, n)
    """

    def __init__(self, message: str, condition: Optional[str] = None) -> None:
        super().__init__(message, "DOMAIN_ERROR")
        self.condition = condition


class DegreeError(QGammaError):
    """Raised when a Brouwer degree cannot be certified."""

    def __init__(
        self,
        message: str,
        estimate: Optional[int] = None,
        min_boundary_norm: Optional[float] = None,
    ) -> None:
        super().__init__(message, "DEGREE_ERROR")
        self.estimate = estimate
        self.min_boundary_norm = min_boundary_norm


class ConvergenceError(QGammaError):
    """Raised when a Newton iteration stagnates or diverges."""

    def __init__(self, message: str, trace: Optional[List[Any]] = None) -> None:
        super().__init__(message, "CONVERGENCE_ERROR")
        self.trace = list(trace or [])


class PositivityError(QGammaError):
    """Raised when a converged solution is not strictly positive."""

    def __init__(self, message: str, margin: Optional[float] = None) -> None:
        super().__init__(message, "POSITIVITY_ERROR")
        self.margin = margin


class ConsistencyError(QGammaError):
    """Raised when two independent routes to the same quantity disagree."""

    def __init__(self, message: str, deviation: Optional[float] = None) -> None:
        super().__init__(message, "CONSISTENCY_ERROR")
        self.deviation = deviation


__all__ = [
    "ConfigurationError",
    "ConsistencyError",
    "ConvergenceError",
    "DegreeError",
    "DomainError",
    "FileSystemError",
    "NumericalAccuracyError",
    "PositivityError",
    "QGammaError",
    "QuadratureError",
    "ValidationError",
]
