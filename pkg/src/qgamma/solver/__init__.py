"""
Spectral Galerkin solver on S^n for the perturbed equation and its diagnostics.
"""

from .diagnostics import (
    RieszResidual,
    SphereConstantCheck,
    decay_slope,
    plane_callable,
    riesz_calibration,
    riesz_residual,
    sphere_constant_check,
)
from .galerkin import GalerkinProblem, dgamma_norm, energy, energy_gradient
from .newton import (
    SolutionRecord,
    SweepResult,
    continuation_sweep,
    fit_sweep,
    initial_bubble,
    nearest_bubble,
    newton_iterate,
    solve_newton,
)

__all__ = [
    "GalerkinProblem",
    "RieszResidual",
    "SolutionRecord",
    "SphereConstantCheck",
    "SweepResult",
    "continuation_sweep",
    "decay_slope",
    "dgamma_norm",
    "energy",
    "energy_gradient",
    "fit_sweep",
    "initial_bubble",
    "nearest_bubble",
    "newton_iterate",
    "plane_callable",
    "riesz_calibration",
    "riesz_residual",
    "solve_newton",
    "sphere_constant_check",
]
