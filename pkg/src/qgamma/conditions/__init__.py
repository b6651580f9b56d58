"""
Curvature perturbations and the checkers for the hypotheses (K1)-(K6).
"""

from .checks import (
    ConditionReport,
    CritEntry,
    Verdict,
    check_K1,
    check_K2,
    check_K3,
    check_K4,
    check_K5,
    check_K6,
    crit_equivalence,
    estimate_beta_A,
    fit_beta,
    gamma_map,
    global_bookkeeping,
    gradient_map,
    repulsion_radius,
    theorem_applicability,
)
from .curvature import BUILTINS, CurvatureField, K6Data, builtin_field
from .expression import field_from_spec, parse_expression

__all__ = [
    "BUILTINS",
    "ConditionReport",
    "CritEntry",
    "CurvatureField",
    "K6Data",
    "Verdict",
    "builtin_field",
    "check_K1",
    "check_K2",
    "check_K3",
    "check_K4",
    "check_K5",
    "check_K6",
    "crit_equivalence",
    "estimate_beta_A",
    "field_from_spec",
    "fit_beta",
    "gamma_map",
    "global_bookkeeping",
    "gradient_map",
    "parse_expression",
    "repulsion_radius",
    "theorem_applicability",
]
