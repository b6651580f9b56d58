"""
Spectral Galerkin discretization of P_gamma v = Q v_+^p on S^n.

Coefficients live in the real orthonormal basis of SphereBasis; P_gamma is
the diagonal of sphere multipliers, the nonlinearity is evaluated on the
oversampled collocation grid and projected back by exact quadrature. With
u = (1 - zeta)^s v the plane energy

    f_eps(u) = 1/2 ||(-Delta)^{gamma/2} u||^2 - 1/(p+1) int (1 + eps K) u_+^{p+1}

equals the sphere energy of v, so everything below works on S^n.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..conditions.curvature import CurvatureField
from ..config import settings
from ..geometry.params import ProblemParams
from ..geometry.sphere import SphereBasis, SphereField, lift_plane_to_sphere


@dataclass
class GalerkinProblem:
    """
    Residual, Jacobian and energy of the discrete sphere equation.

    Attributes:
        params: Problem parameters
        basis: Sphere basis
        Q: Coefficient of the nonlinearity at the collocation nodes
        epsilon: Perturbation size (informational)
    """

    params: ProblemParams
    basis: SphereBasis
    Q: np.ndarray
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        self.Q = np.broadcast_to(np.asarray(self.Q, dtype=float), self.basis.grid_shape)
        self.lam = self.basis.multipliers(self.params)

    @classmethod
    def for_curvature(
        cls,
        params: ProblemParams,
        basis: SphereBasis,
        K: Optional[CurvatureField],
        epsilon: float,
    ) -> "GalerkinProblem":
        """Q = 1 + eps K at the plane images of the collocation nodes."""
        Q = np.ones(basis.grid_shape)
        if K is not None and epsilon != 0.0:
            Q = Q + epsilon * K.eval(basis.plane_points())
        return cls(params, basis, Q, float(epsilon))

    def with_basis(self, basis: SphereBasis, K: Optional[CurvatureField]) -> "GalerkinProblem":
        return GalerkinProblem.for_curvature(self.params, basis, K, self.epsilon)

    def _positive(self, coeffs: np.ndarray) -> np.ndarray:
        return np.clip(self.basis.synthesis(coeffs), 0.0, None)

    def residual(self, coeffs: np.ndarray) -> np.ndarray:
        """lambda c - Pi(Q v_+^p)."""
        v = self._positive(coeffs)
        return self.lam * coeffs - self.basis.analysis(self.Q * v**self.params.p)

    def residual_norm(self, coeffs: np.ndarray) -> float:
        return float(np.linalg.norm(self.residual(coeffs)))

    def jacobian_weight(self, coeffs: np.ndarray) -> np.ndarray:
        p = self.params.p
        return p * self.Q * self._positive(coeffs) ** (p - 1.0)

    def jacobian_apply(self, weight: np.ndarray, direction: np.ndarray) -> np.ndarray:
        """J d = lambda d - Pi(weight * d) for one or a batch of directions."""
        b = self.basis
        return self.lam * direction - b.analysis(weight * b.synthesis(direction))

    def jacobian_matrix(self, coeffs: np.ndarray, threads: int = settings.THREADS) -> np.ndarray:
        """Dense Jacobian, assembled in column batches."""
        weight = self.jacobian_weight(coeffs)
        size = self.basis.size
        starts = list(range(0, size, settings.ASSEMBLY_BATCH))

        def block(start: int) -> np.ndarray:
            stop = min(start + settings.ASSEMBLY_BATCH, size)
            eye = np.zeros((stop - start, size))
            eye[np.arange(stop - start), np.arange(start, stop)] = 1.0
            return self.jacobian_apply(weight, eye)

        matrix = np.empty((size, size))
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            for start, rows in zip(starts, executor.map(block, starts)):
                matrix[:, start : start + rows.shape[0]] = rows.T
        return 0.5 * (matrix + matrix.T)

    def energy(self, coeffs: np.ndarray) -> float:
        p = self.params.p
        v = self._positive(coeffs)
        quad = float(self.basis.integrate(self.Q * v ** (p + 1.0)))
        return 0.5 * float(np.dot(self.lam, coeffs * coeffs)) - quad / (p + 1.0)


def _as_field(
    u: Union[SphereField, np.ndarray], params: ProblemParams, basis: Optional[SphereBasis]
) -> SphereField:
    from ..utils.exceptions import ValidationError

    if isinstance(u, SphereField):
        return u
    if basis is None:
        raise ValidationError(
            "Plane samples need the basis whose node images they were taken at",
            "basis",
            "SphereBasis",
        )
    return lift_plane_to_sphere(u, params, basis)


def energy(
    u: Union[SphereField, np.ndarray],
    epsilon: float,
    K: Optional[CurvatureField],
    params: ProblemParams,
    basis: Optional[SphereBasis] = None,
) -> float:
    """
    f_eps of a sphere field, or of plane samples taken at basis.plane_points().

    The quadratic term is spectral; the nonlinear term uses collocation
    quadrature of u_+^{p+1}.
    """
    field = _as_field(u, params, basis)
    return GalerkinProblem.for_curvature(params, field.basis, K, epsilon).energy(field.coeffs)


def energy_gradient(
    u: Union[SphereField, np.ndarray],
    epsilon: float,
    K: Optional[CurvatureField],
    params: ProblemParams,
    basis: Optional[SphereBasis] = None,
    metric: str = "l2",
) -> SphereField:
    """
    Gradient of f_eps in the spectral basis.

    Args:
        metric: "l2" for the L^2(S^n) representative (the discrete residual),
            "dgamma" for the D^gamma representative (divided by the multipliers)
    """
    from ..utils.exceptions import ValidationError

    field = _as_field(u, params, basis)
    problem = GalerkinProblem.for_curvature(params, field.basis, K, epsilon)
    g = problem.residual(field.coeffs)
    if metric == "dgamma":
        g = g / problem.lam
    elif metric != "l2":
        raise ValidationError(f"Unknown metric '{metric}'", "metric", "'l2' or 'dgamma'")
    return SphereField(field.basis, g)


def dgamma_norm(field: SphereField, params: ProblemParams) -> float:
    """||(-Delta)^{gamma/2} u||_{L^2} of the plane field, via the sphere multipliers."""
    lam = field.basis.multipliers(params)
    return float(np.sqrt(np.dot(lam, field.coeffs**2)))


__all__ = ["GalerkinProblem", "dgamma_norm", "energy", "energy_gradient"]
