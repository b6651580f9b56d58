"""
Configuration module for qgamma.

This module provides the numerical defaults with environment overrides and
the validated run-configuration loader used by the CLI.
"""

from . import settings
from .run_config import COMMANDS, KSpec, RunConfig, build_run_config, load_run_config
from .settings import validate_config

__all__ = [
    "COMMANDS",
    "KSpec",
    "RunConfig",
    "build_run_config",
    "load_run_config",
    "settings",
    "validate_config",
]
