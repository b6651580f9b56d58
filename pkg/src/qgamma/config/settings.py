"""
Configuration settings for qgamma.

This module contains the numerical defaults, environment variable handling
and validation logic shared by every pipeline stage. Values that a user may
want to change per machine (threads, log level, output location) can be
overridden from the environment or a .env file.
"""

import os
from typing import Dict, Tuple

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Runtime
LOG_LEVEL: str = os.getenv("QGAMMA_LOG_LEVEL", "INFO")
THREADS: int = int(os.getenv("QGAMMA_THREADS", "1"))
OUTPUT_DIR: str = os.getenv("QGAMMA_OUTPUT_DIR", "qgamma-out")
CHUNK_SIZE: int = int(os.getenv("QGAMMA_CHUNK_SIZE", "2048"))

# Radial fractional Laplacian (log-variable spectral route)
RADIAL_R_MIN: float = 1e-4
RADIAL_R_MAX: float = 1e4
RADIAL_NODES: int = 161
MELLIN_STEP: float = 0.02
MELLIN_WINDOW_DECADES: float = 14.0
MELLIN_TAIL_TOL: float = 1e-6

# Principal-value evaluator
PV_NEAR_FIELD: float = 1e-2
PV_ANGULAR_NODES: int = 64
PV_EPSABS: float = 1e-13
PV_EPSREL: float = 1e-11
PV_LAPLACIAN_STEP: float = 1e-2

# Bubble constant
BUBBLE_SPREAD_TOL: float = 1e-5
BUBBLE_RATIO_RADII: Tuple[float, float, int] = (1e-2, 1e2, 41)

# Sphere discretization
DEFAULT_L: Dict[int, int] = {
    1: int(os.getenv("QGAMMA_DEFAULT_L1", "128")),
    2: int(os.getenv("QGAMMA_DEFAULT_L2", "48")),
}
OVERSAMPLING: int = 2
KERNEL_REL_TOL: float = 1e-6
TRUNCATION_TAIL_TOL: float = 1e-8
ASSEMBLY_BATCH: int = 256

# Reduced functional quadrature
REDUCED_RADIAL_STEP: float = 0.025
REDUCED_WEIGHT_CUTOFF: float = 1e-17
REDUCED_ANGULAR_NODES: Dict[int, int] = {1: 1, 2: 16, 3: 10}
C1_NORMALIZATION: str = "n"
REDUCED_T_MAX: float = 5.0
REDUCED_QUAD_TOL: float = 1e-6
FD_STEP: float = 1e-5

# Degree engine
DEGREE_MAX_DIM: int = 4
DEGREE_INITIAL_CELLS: int = 4
DEGREE_MAX_DEPTH: int = 12
DEGREE_TOL: float = 1e-10  # relative to the largest |F| on a boundary cell
DEGREE_ANGLE_LIMIT: float = 0.7853981633974483  # pi/4
CRIT_MERGE_REL: float = 1e-6
CRIT_RESIDUAL_TOL: float = 1e-10  # relative to the largest |F| over the seed grid
CRIT_FLAT_REL: float = 1e-6
NEWTON_MAX_ITER_CRIT: int = 60

# Condition checks
K1_PROBES: int = 512
K1_MAX_SHELLS: int = 12
K1_SLOPE_MARGIN: float = 0.05
BETA_FIT_RANGE: Tuple[float, float] = (1e-6, 1e-3)
BETA_FIT_R2: float = 0.999
HOMOGENEOUS_SAMPLE_RADIUS: float = 1e-5
OMEGA_MU_MIN: float = 0.1
DEFAULT_ETA: float = 2.0

# Solver
NEWTON_TOL: Dict[int, float] = {1: 1e-9, 2: 1e-7}
NEWTON_MAX_ITER: int = 30
GMRES_RTOL: float = 1e-10
EPSILON_MAX: float = 0.05
DEFLATION_CUTOFF: float = 1e-10
DECAY_RADII: Tuple[float, float, int] = (1e2, 1e4, 9)


def validate_config() -> None:
    """
    Validate configuration settings and raise errors for invalid values.

    Raises:
        ConfigurationError: If critical configuration is invalid
    """
    from ..utils.exceptions import ConfigurationError

    if THREADS <= 0:
        raise ConfigurationError("QGAMMA_THREADS must be positive", "QGAMMA_THREADS")

    if CHUNK_SIZE <= 0:
        raise ConfigurationError(
            "QGAMMA_CHUNK_SIZE must be positive", "QGAMMA_CHUNK_SIZE"
        )

    for n, L in DEFAULT_L.items():
        if L < 2:
            raise ConfigurationError(
                f"Default truncation degree for n={n} must be at least 2",
                f"QGAMMA_DEFAULT_L{n}",
            )

    if LOG_LEVEL.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
        raise ConfigurationError(
            f"Invalid log level: {LOG_LEVEL}", "QGAMMA_LOG_LEVEL"
        )


__all__ = [
    "ASSEMBLY_BATCH",
    "BETA_FIT_R2",
    "BETA_FIT_RANGE",
    "BUBBLE_RATIO_RADII",
    "BUBBLE_SPREAD_TOL",
    "C1_NORMALIZATION",
    "CHUNK_SIZE",
    "CRIT_FLAT_REL",
    "CRIT_MERGE_REL",
    "CRIT_RESIDUAL_TOL",
    "DECAY_RADII",
    "DEFAULT_ETA",
    "DEFAULT_L",
    "DEFLATION_CUTOFF",
    "DEGREE_ANGLE_LIMIT",
    "DEGREE_INITIAL_CELLS",
    "DEGREE_MAX_DEPTH",
    "DEGREE_MAX_DIM",
    "DEGREE_TOL",
    "EPSILON_MAX",
    "FD_STEP",
    "GMRES_RTOL",
    "HOMOGENEOUS_SAMPLE_RADIUS",
    "K1_MAX_SHELLS",
    "K1_PROBES",
    "K1_SLOPE_MARGIN",
    "KERNEL_REL_TOL",
    "LOG_LEVEL",
    "MELLIN_STEP",
    "MELLIN_TAIL_TOL",
    "MELLIN_WINDOW_DECADES",
    "NEWTON_MAX_ITER",
    "NEWTON_MAX_ITER_CRIT",
    "NEWTON_TOL",
    "OMEGA_MU_MIN",
    "OUTPUT_DIR",
    "OVERSAMPLING",
    "PV_ANGULAR_NODES",
    "PV_EPSABS",
    "PV_EPSREL",
    "PV_LAPLACIAN_STEP",
    "PV_NEAR_FIELD",
    "RADIAL_NODES",
    "RADIAL_R_MAX",
    "RADIAL_R_MIN",
    "REDUCED_ANGULAR_NODES",
    "REDUCED_QUAD_TOL",
    "REDUCED_RADIAL_STEP",
    "REDUCED_T_MAX",
    "REDUCED_WEIGHT_CUTOFF",
    "THREADS",
    "TRUNCATION_TAIL_TOL",
    "validate_config",
]
