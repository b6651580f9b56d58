"""
Utility modules for qgamma.

This module provides common utilities including logging, progress tracking,
artifact output and custom exceptions.
"""

from .exceptions import (
    ConfigurationError,
    ConsistencyError,
    ConvergenceError,
    DegreeError,
    DomainError,
    FileSystemError,
    NumericalAccuracyError,
    PositivityError,
    QGammaError,
    QuadratureError,
    ValidationError,
)
from .logger import logger, set_level, setup_logger
from .progress import ProgressTracker
from .output_formatter import TOON_AVAILABLE

__all__ = [
    "ConfigurationError",
    "ConsistencyError",
    "ConvergenceError",
    "DegreeError",
    "DomainError",
    "FileSystemError",
    "NumericalAccuracyError",
    "PositivityError",
    "ProgressTracker",
    "QGammaError",
    "QuadratureError",
    "TOON_AVAILABLE",
    "ValidationError",
    "logger",
    "set_level",
    "setup_logger",
]
