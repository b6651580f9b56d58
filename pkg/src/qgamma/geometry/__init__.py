"""
Geometry and operator module for qgamma.

Problem parameters, the fractional Laplacian on R^n (radial spectral route
and direct singular integral), and the conformal transport to S^n where
P_gamma is diagonal on spherical harmonics.
"""

from .params import (
    ProblemParams,
    bubble_constant_closed_form,
    make_params,
    pv_constant,
    riesz_constant,
    sphere_area,
)
from .pv import frac_laplacian_pv
from .radial import RadialFunction, default_radial_nodes, frac_laplacian_radial, power_symbol
from .sphere import (
    SphereBasis,
    SphereField,
    conformal_factor,
    get_basis,
    inverse_stereographic,
    lift_plane_to_sphere,
    pull_sphere_to_plane,
    sphere_multiplier,
    sphere_multiplier_array,
    stereographic,
)

__all__ = [
    "ProblemParams",
    "RadialFunction",
    "SphereBasis",
    "SphereField",
    "bubble_constant_closed_form",
    "conformal_factor",
    "default_radial_nodes",
    "frac_laplacian_pv",
    "frac_laplacian_radial",
    "get_basis",
    "inverse_stereographic",
    "lift_plane_to_sphere",
    "make_params",
    "power_symbol",
    "pull_sphere_to_plane",
    "pv_constant",
    "riesz_constant",
    "sphere_area",
    "sphere_multiplier",
    "sphere_multiplier_array",
    "stereographic",
]
