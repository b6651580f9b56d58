"""
The extremal family z_{mu,xi}, its normalization, tangent fields and the
linearized operator at a bubble.

z_{mu,xi}(x) = alpha (mu / (mu^2 + |x - xi|^2))^s,  s = (n - 2 gamma)/2,

with alpha fixed by the measured constant Lambda of (-Delta)^gamma W = Lambda W^p,
W = (1 + |x|^2)^{-s}. The linearization is assembled on S^n, where the
lifted standard bubble is the constant alpha 2^{-s}.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg, special

from .config import settings
from .geometry.params import ProblemParams, bubble_constant_closed_form, sphere_area
from .geometry.radial import RadialFunction, default_radial_nodes, frac_laplacian_radial
from .geometry.sphere import SphereBasis, SphereField, get_basis
from .utils.logger import logger
from .utils.progress import ProgressTracker


@dataclass
class Bubble:
    """
    One member of the critical manifold Z.

    Attributes:
        mu: Concentration scale, mu > 0
        xi: Center in R^n
        params: Problem parameters
    """

    mu: float
    xi: np.ndarray
    params: ProblemParams

    def __post_init__(self) -> None:
        from .utils.exceptions import ValidationError

        self.mu = float(self.mu)
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if not self.mu > 0:
            raise ValidationError(f"mu = {self.mu} violates mu > 0", "mu", "positive real")
        if self.xi.shape != (self.params.n,):
            raise ValidationError(
                f"xi has shape {self.xi.shape}, expected ({self.params.n},)",
                "xi",
                f"point in R^{self.params.n}",
            )

    @classmethod
    def standard(cls, params: ProblemParams) -> "Bubble":
        """z_{1,0}."""
        return cls(1.0, np.zeros(params.n), params)

    def describe(self) -> Dict[str, object]:
        return {"mu": self.mu, "xi": self.xi.tolist()}


def _w_profile(params: ProblemParams):
    s = params.s

    def profile(r: np.ndarray) -> np.ndarray:
        return (1.0 + np.asarray(r, dtype=float) ** 2) ** (-s)

    return profile


def bubble_ratio(params: ProblemParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sample ((-Delta)^gamma W) / W^p on the ratio radii.

    Returns:
        (radii, ratio)
    """
    lo, hi, count = settings.BUBBLE_RATIO_RADII
    radii = np.geomspace(lo, hi, count)
    W = RadialFunction.from_profile(_w_profile(params), -2.0 * params.s, nodes=radii)
    out = frac_laplacian_radial(W, params)
    return radii, out.values / W.values**params.p


@lru_cache(maxsize=32)
def bubble_constant(params: ProblemParams) -> Tuple[float, float]:
    """
    Measure Lambda with (-Delta)^gamma W = Lambda W^p and derive alpha.

    Args:
        params: Problem parameters

    Returns:
        (Lambda, alpha) with alpha = Lambda^{(n - 2 gamma)/(4 gamma)}

    Raises:
        NumericalAccuracyError: If the measured ratio is not constant to
            BUBBLE_SPREAD_TOL relative spread
    """
    from .utils.exceptions import NumericalAccuracyError

    _, ratio = bubble_ratio(params)
    lam = float(np.mean(ratio))
    spread = float(np.std(ratio) / abs(lam))
    if spread > settings.BUBBLE_SPREAD_TOL:
        raise NumericalAccuracyError(
            f"(-Δ)^γ W / W^p is not constant: relative spread {spread:.2e}",
            residual=spread,
        )
    alpha = lam ** ((params.n - 2.0 * params.gamma) / (4.0 * params.gamma))
    closed = bubble_constant_closed_form(params)
    logger.debug(
        f"Bubble constant n={params.n} γ={params.gamma}: Λ={lam:.12g} "
        f"(closed form {closed:.12g}, spread {spread:.1e}), α={alpha:.12g}"
    )
    return lam, alpha


def bubble_pde_residual(params: ProblemParams) -> float:
    """sup |(-Delta)^gamma z0 - z0^p| / sup |z0^p| on the default radial grid."""
    _, alpha = bubble_constant(params)
    s, p = params.s, params.p

    def z0(r: np.ndarray) -> np.ndarray:
        return alpha * (1.0 + np.asarray(r, dtype=float) ** 2) ** (-s)

    f = RadialFunction.from_profile(z0, -2.0 * s, nodes=default_radial_nodes())
    lhs = frac_laplacian_radial(f, params).values
    rhs = f.values**p
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))


def _distance_sq(b: Bubble, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if b.params.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return np.sum((x - b.xi) ** 2, axis=-1)


def bubble_eval(b: Bubble, x) -> np.ndarray:
    """
    alpha (mu / (mu^2 + |x - xi|^2))^s at points x of shape (..., n).

    For n = 1 a plain array of abscissae is accepted as well.
    """
    _, alpha = bubble_constant(b.params)
    d2 = _distance_sq(b, x)
    return alpha * (b.mu / (b.mu**2 + d2)) ** b.params.s


def bubble_eval_radial(b: Bubble, r) -> np.ndarray:
    """Bubble value at distance r from its center."""
    _, alpha = bubble_constant(b.params)
    r = np.asarray(r, dtype=float)
    return alpha * (b.mu / (b.mu**2 + r * r)) ** b.params.s


def bubble_tangents(b: Bubble, x) -> np.ndarray:
    """
    Analytic derivatives (d_mu z, d_xi_1 z, ..., d_xi_n z) at x.

    Args:
        b: Bubble
        x: Points of shape (..., n) (or abscissae for n = 1)

    Returns:
        Array of shape (..., n + 1)
    """
    _, alpha = bubble_constant(b.params)
    s, mu = b.params.s, b.mu
    x = np.asarray(x, dtype=float)
    if b.params.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    diff = x - b.xi
    d2 = np.sum(diff * diff, axis=-1)
    base = (mu * mu + d2) ** (-s - 1.0)
    d_mu = alpha * s * mu ** (s - 1.0) * (d2 - mu * mu) * base
    d_xi = 2.0 * alpha * s * mu**s * diff * base[..., None]
    return np.concatenate([d_mu[..., None], d_xi], axis=-1)


def bubble_norm_integral(params: ProblemParams) -> float:
    """int z0^{p+1} = alpha^{p+1} |S^{n-1}| B(n/2, n/2) / 2."""
    _, alpha = bubble_constant(params)
    n = params.n
    return float(alpha ** (params.p + 1.0) * sphere_area(n) * 0.5 * special.beta(n / 2.0, n / 2.0))


def bubble_energy(params: ProblemParams) -> float:
    """f0 on Z: (1/2 - 1/(p+1)) int z0^{p+1} = (gamma/n) int z0^{p+1}."""
    return params.gamma / params.n * bubble_norm_integral(params)


def lift_bubble(b: Bubble, basis: SphereBasis) -> SphereField:
    """Sphere representative z / (1 - zeta)^s, projected on the basis."""
    x = basis.plane_points()
    values = bubble_eval(b, x) / basis.one_minus_zeta() ** b.params.s
    return SphereField.from_values(basis, values)


def lift_tangents(b: Bubble, basis: SphereBasis) -> np.ndarray:
    """Coefficients of the lifted tangent fields, shape (n + 1, size)."""
    x = basis.plane_points()
    t = bubble_tangents(b, x) / (basis.one_minus_zeta() ** b.params.s)[..., None]
    return basis.analysis(np.moveaxis(t, -1, 0))


def sphere_energy(field: SphereField, params: ProblemParams) -> float:
    """f0 of a sphere field: 1/2 sum lambda c^2 - int v_+^{p+1} / (p + 1)."""
    basis = field.basis
    lam = basis.multipliers(params)
    v = np.clip(field.values(), 0.0, None)
    quad = float(basis.integrate(v ** (params.p + 1.0)))
    return 0.5 * float(np.dot(lam, field.coeffs**2)) - quad / (params.p + 1.0)


def spectral_tail(field: SphereField) -> float:
    """Largest coefficient at the top degree, relative to the largest overall."""
    c = np.abs(field.coeffs)
    scale = float(np.max(c))
    if scale == 0.0:
        return 0.0
    return float(np.max(c[field.basis.degrees == field.basis.L]) / scale)


@dataclass
class LinearizedOperator:
    """
    Matrix of phi -> P_gamma phi - p v^{p-1} phi in the sphere basis.

    Attributes:
        bubble: Bubble the operator is linearized at
        basis: Sphere basis defining the discretization
        matrix: Dense symmetric matrix (symmetrized after assembly)
        asymmetry: Relative asymmetry before symmetrization
        tail: Relative spectral tail of the lifted bubble at degree L
    """

    bubble: Bubble
    basis: SphereBasis
    matrix: np.ndarray
    asymmetry: float = 0.0
    tail: float = 0.0


def linearized_operator(
    b: Bubble,
    L: Optional[int] = None,
    threads: int = settings.THREADS,
) -> LinearizedOperator:
    """
    Assemble the linearized operator at a bubble on S^n.

    Columns are built in batches of basis vectors (synthesis, multiply,
    analysis); batches may run on a thread pool, results are placed in
    column order.

    Args:
        b: Bubble to linearize at
        L: Truncation degree (default per dimension from settings)
        threads: Worker threads for batch assembly

    Returns:
        LinearizedOperator

    Raises:
        ValidationError: If n = 3 (sphere bases exist for n <= 2)
    """
    n = b.params.n
    L = L or settings.DEFAULT_L.get(n, 0)
    basis = get_basis(n, L)
    v = lift_bubble(b, basis)
    tail = spectral_tail(v)
    if tail > settings.TRUNCATION_TAIL_TOL:
        logger.warning(
            f"⚠️ WARN: lifted bubble tail at degree L={L} is {tail:.2e} "
            f"(> {settings.TRUNCATION_TAIL_TOL:.0e}); increase L"
        )

    weight = b.params.p * np.clip(v.values(), 0.0, None) ** (b.params.p - 1.0)
    size = basis.size
    starts = list(range(0, size, settings.ASSEMBLY_BATCH))
    tracker = ProgressTracker(len(starts), "Linearized operator assembly")

    def block(start: int) -> np.ndarray:
        stop = min(start + settings.ASSEMBLY_BATCH, size)
        eye = np.zeros((stop - start, size))
        eye[np.arange(stop - start), np.arange(start, stop)] = 1.0
        return basis.analysis(weight * basis.synthesis(eye))

    matrix = np.empty((size, size))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for start, rows in zip(starts, executor.map(block, starts)):
            # row j of `rows` is column start + j of the multiplication operator
            matrix[:, start : start + rows.shape[0]] = rows.T
            tracker.update()
    tracker.finish()

    matrix = np.diag(basis.multipliers(b.params)) - matrix
    norm = float(np.max(np.abs(matrix)))
    asymmetry = float(np.max(np.abs(matrix - matrix.T)) / norm) if norm > 0 else 0.0
    matrix = 0.5 * (matrix + matrix.T)
    return LinearizedOperator(b, basis, matrix, asymmetry, tail)


@dataclass
class KernelReport:
    """Nondegeneracy diagnostics of a linearized operator."""

    dim: int
    expected_dim: int
    angles: List[float] = field(default_factory=list)
    negatives: int = 0
    gap: float = 0.0
    smallest: List[float] = field(default_factory=list)
    asymmetry: float = 0.0

    @property
    def passed(self) -> bool:
        return (
            self.dim == self.expected_dim
            and bool(self.angles)
            and max(self.angles) < 1e-3
            and self.gap >= 100.0
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "dim": self.dim,
            "expected_dim": self.expected_dim,
            "angles": list(self.angles),
            "negatives": self.negatives,
            "gap": self.gap,
            "smallest": list(self.smallest),
            "asymmetry": self.asymmetry,
            "passed": self.passed,
        }


def kernel_check(lop: LinearizedOperator, rel_tol: float = settings.KERNEL_REL_TOL) -> KernelReport:
    """
    Count near-zero eigenvalues and compare their eigenvectors with the tangents.

    Args:
        lop: Assembled operator
        rel_tol: Kernel threshold relative to max |eigenvalue|

    Returns:
        KernelReport (dim, principal angles to the lifted tangents, number of
        negative eigenvalues, gap between the (n+1)-th and (n+2)-th smallest
        |eigenvalue|)
    """
    n = lop.bubble.params.n
    evals, evecs = linalg.eigh(lop.matrix)
    scale = float(np.max(np.abs(evals)))
    threshold = rel_tol * scale
    kernel = np.abs(evals) < threshold
    dim = int(np.count_nonzero(kernel))
    negatives = int(np.count_nonzero(evals < -threshold))

    abs_sorted = np.sort(np.abs(evals))
    k = n + 1
    gap = float(abs_sorted[k] / max(abs_sorted[k - 1], np.finfo(float).tiny)) if abs_sorted.size > k else 0.0

    angles: List[float] = []
    if dim > 0:
        tangents = lift_tangents(lop.bubble, lop.basis).T
        angles = [float(a) for a in linalg.subspace_angles(evecs[:, kernel], tangents)]

    report = KernelReport(
        dim=dim,
        expected_dim=k,
        angles=angles,
        negatives=negatives,
        gap=gap,
        smallest=[float(v) for v in abs_sorted[: k + 1]],
        asymmetry=lop.asymmetry,
    )
    logger.info(
        f"Kernel check: dim={dim} (expected {k}), negatives={negatives}, gap={gap:.3g}"
    )
    return report


__all__ = [
    "Bubble",
    "KernelReport",
    "LinearizedOperator",
    "bubble_constant",
    "bubble_energy",
    "bubble_eval",
    "bubble_eval_radial",
    "bubble_norm_integral",
    "bubble_pde_residual",
    "bubble_ratio",
    "bubble_tangents",
    "kernel_check",
    "lift_bubble",
    "lift_tangents",
    "linearized_operator",
    "sphere_energy",
    "spectral_tail",
]
