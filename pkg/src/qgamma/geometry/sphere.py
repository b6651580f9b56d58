"""
Spectral bases on S^1 and S^2, the spectrum of P_gamma on the round sphere,
and the conformal transport between R^n and S^n.

Conventions: the sphere S^n sits in R^{n+1} with last coordinate zeta;
stereographic projection is taken from the north pole zeta = 1, so

    F(x) = (2x / (1 + |x|^2), (|x|^2 - 1) / (1 + |x|^2)),   1 - zeta = 2 / (1 + |x|^2),

and a plane field u and its sphere representative v are related by
u = (1 - zeta)^s v o F with s = (n - 2 gamma)/2 (that is |J_F|^{(n-2gamma)/(2n)}).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import special

from ..config import settings
from .params import ProblemParams


def sphere_multiplier(k: int, params: ProblemParams) -> float:
    """
    Eigenvalue of P_gamma on degree-k spherical harmonics.

    lambda_k = Gamma(k + n/2 + gamma) / Gamma(k + n/2 - gamma)
    """
    n, g = params.n, params.gamma
    return float(np.exp(special.gammaln(k + n / 2.0 + g) - special.gammaln(k + n / 2.0 - g)))


def sphere_multiplier_array(kmax: int, params: ProblemParams) -> np.ndarray:
    """lambda_0 .. lambda_kmax as an array."""
    k = np.arange(kmax + 1, dtype=float)
    n, g = params.n, params.gamma
    return np.exp(special.gammaln(k + n / 2.0 + g) - special.gammaln(k + n / 2.0 - g))


def inverse_stereographic(x: np.ndarray) -> np.ndarray:
    """F: R^n -> S^n, points along the last axis."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    return np.concatenate([2.0 * x / (1.0 + r2), (r2 - 1.0) / (1.0 + r2)], axis=-1)


def stereographic(omega: np.ndarray) -> np.ndarray:
    """F^{-1}: S^n minus the north pole -> R^n."""
    omega = np.asarray(omega, dtype=float)
    return omega[..., :-1] / (1.0 - omega[..., -1:])


def conformal_factor(x: np.ndarray, params: ProblemParams) -> np.ndarray:
    """(1 - zeta)^s = (2 / (1 + |x|^2))^s at plane points."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    return (2.0 / (1.0 + r2)) ** params.s


def _normalized_legendre(lmax: int, z: np.ndarray) -> np.ndarray:
    """
    Fully normalized associated Legendre functions P[m, l, i] (zero for l < m),
    so that P[m, l] * trig(m phi) (times sqrt 2 for m > 0) is orthonormal on S^2.
    """
    z = np.asarray(z, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    out = np.zeros((lmax + 1, lmax + 1, z.size))
    pmm = np.full(z.size, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(lmax + 1):
        if m > 0:
            pmm = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t * pmm
        out[m, m] = pmm
        if m + 1 <= lmax:
            out[m, m + 1] = np.sqrt(2.0 * m + 3.0) * z * pmm
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            out[m, l] = a * (z * out[m, l - 1] - b * out[m, l - 2])
    return out


class SphereBasis:
    """
    Real orthonormal spectral basis on S^n (n = 1, 2) with its collocation grid.

    n = 1: Fourier modes 1/sqrt(2 pi), cos(k phi)/sqrt(pi), sin(k phi)/sqrt(pi),
    k <= L, on the offset grid phi_j = -pi + 2 pi (j + 1/2) / M; the sphere
    point is (sin phi, -cos phi), so phi = 0 is the south pole (x = 0).

    n = 2: real spherical harmonics Y_lm, l <= L, flat index l^2 + l + m, on a
    Gauss-Legendre (in zeta = cos theta) by uniform-phi grid.

    Transforms (synthesis / analysis) accept leading batch dimensions.
    """

    def __init__(self, n: int, L: int, oversampling: int = settings.OVERSAMPLING) -> None:
        from ..utils.exceptions import ValidationError

        if n not in (1, 2):
            raise ValidationError(
                f"Sphere discretization supports n in {{1, 2}}, got {n}", "n", "1 or 2"
            )
        if L < 1:
            raise ValidationError(f"L must be >= 1, got {L}", "L", "positive integer")
        self.n = n
        self.L = L
        self.oversampling = oversampling
        if n == 1:
            self._setup_circle()
        else:
            self._setup_sphere()

    # -- grids -----------------------------------------------------------

    def _setup_circle(self) -> None:
        L = self.L
        m = self.oversampling * (2 * L + 2)
        self.phi = -np.pi + 2.0 * np.pi * (np.arange(m) + 0.5) / m
        self.weights = np.full(m, 2.0 * np.pi / m)
        self.points = np.stack([np.sin(self.phi), -np.cos(self.phi)], axis=1)
        self.degrees = np.concatenate([[0], np.repeat(np.arange(1, L + 1), 2)])
        self.size = 2 * L + 1
        self.grid_shape: Tuple[int, ...] = (m,)
        self._matrix = self._circle_matrix(self.phi)

    @staticmethod
    def _circle_columns(phi: np.ndarray, L: int) -> np.ndarray:
        k = np.arange(1, L + 1)
        cols = np.empty(phi.shape + (2 * L + 1,))
        cols[..., 0] = 1.0 / np.sqrt(2.0 * np.pi)
        cols[..., 1::2] = np.cos(np.multiply.outer(phi, k)) / np.sqrt(np.pi)
        cols[..., 2::2] = np.sin(np.multiply.outer(phi, k)) / np.sqrt(np.pi)
        return cols

    def _circle_matrix(self, phi: np.ndarray) -> np.ndarray:
        return self._circle_columns(phi, self.L)

    def _setup_sphere(self) -> None:
        L, os_ = self.L, self.oversampling
        n_theta = os_ * (L + 1)
        n_phi = os_ * (2 * L + 2)
        z, wz = np.polynomial.legendre.leggauss(n_theta)
        self.zeta = z
        self.phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
        self.grid_shape = (n_theta, n_phi)
        self.weights = np.outer(wz, np.full(n_phi, 2.0 * np.pi / n_phi))
        st = np.sqrt(1.0 - z * z)
        self.points = np.stack(
            [
                np.outer(st, np.cos(self.phi)),
                np.outer(st, np.sin(self.phi)),
                np.outer(z, np.ones(n_phi)),
            ],
            axis=-1,
        )
        self.size = (L + 1) ** 2
        l_of = np.floor(np.sqrt(np.arange(self.size))).astype(int)
        self.degrees = l_of

        self._legendre = _normalized_legendre(L, z)  # (m, l, i)
        m_idx = np.arange(L + 1)
        fac = np.where(m_idx == 0, 1.0, np.sqrt(2.0))
        self._cos = fac[:, None] * np.cos(np.outer(m_idx, self.phi))  # (m, k)
        self._sin = fac[:, None] * np.sin(np.outer(m_idx, self.phi))
        # flat indices of the cos (m >= 0) and sin (m >= 1) coefficients
        ll, mm = np.meshgrid(np.arange(L + 1), m_idx, indexing="ij")
        valid = ll >= mm
        self._cos_index = np.where(valid, ll * ll + ll + mm, -1).T  # (m, l)
        self._sin_index = np.where(valid & (mm > 0), ll * ll + ll - mm, -1).T
        self._dphi = 2.0 * np.pi / n_phi
        self._wz = wz

    # -- transforms ------------------------------------------------------

    def synthesis(self, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients (..., size) -> grid values (..., *grid_shape)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.size:
            raise _shape_error(coeffs.shape[-1], self.size)
        if self.n == 1:
            return coeffs @ self._matrix.T
        c_cos, c_sin = self._split(coeffs)  # (..., m, l)
        a_cos = np.einsum("...ml,mli->...mi", c_cos, self._legendre)
        a_sin = np.einsum("...ml,mli->...mi", c_sin, self._legendre)
        return np.einsum("...mi,mk->...ik", a_cos, self._cos) + np.einsum(
            "...mi,mk->...ik", a_sin, self._sin
        )

    def analysis(self, values: np.ndarray) -> np.ndarray:
        """Grid values (..., *grid_shape) -> coefficients by exact quadrature."""
        values = np.asarray(values, dtype=float)
        if values.shape[values.ndim - len(self.grid_shape):] != self.grid_shape:
            raise _shape_error(values.shape, self.grid_shape)
        if self.n == 1:
            return (values * self.weights) @ self._matrix
        b_cos = np.einsum("...ik,mk->...mi", values, self._cos) * self._dphi
        b_sin = np.einsum("...ik,mk->...mi", values, self._sin) * self._dphi
        c_cos = np.einsum("...mi,mli,i->...ml", b_cos, self._legendre, self._wz)
        c_sin = np.einsum("...mi,mli,i->...ml", b_sin, self._legendre, self._wz)
        return self._merge(c_cos, c_sin)

    def _split(self, coeffs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pad = np.concatenate([coeffs, np.zeros(coeffs.shape[:-1] + (1,))], axis=-1)
        # index -1 lands on the zero pad
        return pad[..., self._cos_index], pad[..., self._sin_index]

    def _merge(self, c_cos: np.ndarray, c_sin: np.ndarray) -> np.ndarray:
        out = np.zeros(c_cos.shape[:-2] + (self.size,))
        mask_c = self._cos_index >= 0
        mask_s = self._sin_index >= 0
        out[..., self._cos_index[mask_c]] = c_cos[..., mask_c]
        out[..., self._sin_index[mask_s]] = c_sin[..., mask_s]
        return out

    def eval_matrix(self, omega: np.ndarray) -> np.ndarray:
        """Basis functions at arbitrary sphere points (m, n+1) -> (m, size)."""
        omega = np.atleast_2d(np.asarray(omega, dtype=float))
        if self.n == 1:
            phi = np.arctan2(omega[:, 0], -omega[:, 1])
            return self._circle_columns(phi, self.L)
        z = np.clip(omega[:, 2], -1.0, 1.0)
        phi = np.arctan2(omega[:, 1], omega[:, 0])
        leg = _normalized_legendre(self.L, z)  # (m, l, pts)
        out = np.zeros((omega.shape[0], self.size))
        for m in range(self.L + 1):
            fac = 1.0 if m == 0 else np.sqrt(2.0)
            for l in range(m, self.L + 1):
                out[:, l * l + l + m] = fac * leg[m, l] * np.cos(m * phi)
                if m > 0:
                    out[:, l * l + l - m] = fac * leg[m, l] * np.sin(m * phi)
        return out

    # -- helpers ---------------------------------------------------------

    def plane_points(self) -> np.ndarray:
        """Stereographic images of the collocation nodes, shape (*grid_shape, n)."""
        return stereographic(self.points)

    def one_minus_zeta(self) -> np.ndarray:
        return 1.0 - self.points[..., -1]

    def multipliers(self, params: ProblemParams) -> np.ndarray:
        """lambda_{deg(i)} for every coefficient index i."""
        return sphere_multiplier_array(self.L, params)[self.degrees]

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Quadrature of grid values over S^n (batch dims preserved)."""
        axes = tuple(range(-len(self.grid_shape), 0))
        return np.sum(values * self.weights, axis=axes)

    def degree_one_indices(self) -> np.ndarray:
        return np.flatnonzero(self.degrees == 1)

    def zonal_index(self, degree: int) -> int:
        """Index of the mode depending on zeta only (n = 2) or cos(k phi) (n = 1)."""
        if self.n == 1:
            return 0 if degree == 0 else 2 * degree - 1
        return degree * degree + degree

    def resample(self, coeffs: np.ndarray, other: "SphereBasis") -> np.ndarray:
        """Embed/truncate coefficients into another basis of the same n."""
        if self.n == 1:
            out = np.zeros(other.size)
            k = min(self.size, other.size)
            out[:k] = coeffs[:k]
            return out
        out = np.zeros(other.size)
        k = min(self.L, other.L)
        out[: (k + 1) ** 2] = coeffs[: (k + 1) ** 2]
        return out


@lru_cache(maxsize=16)
def get_basis(n: int, L: int, oversampling: int = settings.OVERSAMPLING) -> SphereBasis:
    """Cached basis construction."""
    return SphereBasis(n, L, oversampling)


def _shape_error(got, expected):
    from ..utils.exceptions import ValidationError

    return ValidationError(
        f"Grid mismatch: got shape {got}, expected {expected}", "shape", str(expected)
    )


@dataclass
class SphereField:
    """
    Spectral coefficients of a function on S^n.

    Attributes:
        basis: Basis and collocation grid
        coeffs: Real coefficients, length basis.size
    """

    basis: SphereBasis
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise _shape_error(self.coeffs.shape, (self.basis.size,))

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def L(self) -> int:
        return self.basis.L

    @classmethod
    def from_values(cls, basis: SphereBasis, values: np.ndarray) -> "SphereField":
        return cls(basis, basis.analysis(values))

    def values(self) -> np.ndarray:
        """Values at the collocation nodes."""
        return self.basis.synthesis(self.coeffs)

    def at(self, omega: np.ndarray) -> np.ndarray:
        """Values at arbitrary sphere points."""
        return self.basis.eval_matrix(omega) @ self.coeffs

    def l2_norm(self) -> float:
        """L^2(S^n) norm; equals the coefficient 2-norm (Parseval)."""
        return float(np.linalg.norm(self.coeffs))


def lift_plane_to_sphere(
    u: np.ndarray, params: ProblemParams, basis: SphereBasis
) -> SphereField:
    """
    Transport plane samples to the sphere: v = u / (1 - zeta)^s.

    Args:
        u: Samples of u at basis.plane_points(), shape basis.grid_shape
        params: Problem parameters (n must match the basis)
        basis: Target basis

    Raises:
        ValidationError: On grid or dimension mismatch
    """
    from ..utils.exceptions import ValidationError

    if params.n != basis.n:
        raise ValidationError(
            f"Basis dimension {basis.n} does not match n = {params.n}", "basis", f"n={params.n}"
        )
    u = np.asarray(u, dtype=float)
    if u.shape != basis.grid_shape:
        raise _shape_error(u.shape, basis.grid_shape)
    return SphereField.from_values(basis, u / basis.one_minus_zeta() ** params.s)


def pull_sphere_to_plane(
    v: SphereField, params: ProblemParams, x: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Transport a sphere field to the plane: u = (1 - zeta)^s v o F.

    Args:
        v: Sphere field
        params: Problem parameters
        x: Optional plane points (m, n); defaults to the node images

    Returns:
        (points, values)
    """
    if x is None:
        points = v.basis.plane_points()
        return points, v.basis.one_minus_zeta() ** params.s * v.values()
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return x, conformal_factor(x, params) * v.at(inverse_stereographic(x))


__all__ = [
    "SphereBasis",
    "SphereField",
    "conformal_factor",
    "get_basis",
    "inverse_stereographic",
    "lift_plane_to_sphere",
    "pull_sphere_to_plane",
    "sphere_multiplier",
    "sphere_multiplier_array",
    "stereographic",
]
