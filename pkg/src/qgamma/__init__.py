"""
qgamma - Perturbative solutions of the fractional Q_gamma curvature problem

Primary interface: the qgamma command line (check-k, landscape, degree,
verify-bubble, solve, sweep, report)
Library interface: geometry, bubbles, reduced, degree, conditions, solver
"""

__version__ = "0.1.0"

from .bubbles import Bubble
from .conditions import theorem_applicability
from .geometry import make_params
from .solver import continuation_sweep, solve_newton

__all__ = [
    "Bubble",
    "__version__",
    "continuation_sweep",
    "make_params",
    "solve_newton",
    "theorem_applicability",
]
