"""
The reduced functional

    Gamma(mu, xi) = 1/(p+1) int K(mu y + xi) z0(y)^{p+1} dy,

extended evenly to mu <= 0 with Gamma(0, xi) = c0 K(xi), its derivatives, the
constants c0 and c1, and the leading coefficient A_xi of Gamma(mu, xi) - Gamma(0, xi).

Quadrature is a product rule: exp-sinh in the radius (r = exp(pi/2 sinh t),
log-weights formed stably so the algebraic tail of z0^{p+1} is integrated
without truncation) times an angular rule split into panels at the
coordinate hyperplanes. The rule is symmetric under y -> -y, so the signed
integral is even in mu up to rounding. Values are computed in normalized
form c0 K(xi) + sum W (K(xi + mu y) - K(xi)), so the mass of the rule enters
only through the exact c0.
"""

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from .bubbles import bubble_constant, bubble_norm_integral
from .config import settings
from .geometry.params import ProblemParams, sphere_area
from .utils.logger import logger
from .utils.progress import ProgressTracker

if TYPE_CHECKING:
    from .conditions.curvature import CurvatureField


# -- quadrature -------------------------------------------------------------


def radial_rule(
    params: ProblemParams,
    moment: int = 0,
    h: float = settings.REDUCED_RADIAL_STEP,
    cutoff: float = settings.REDUCED_WEIGHT_CUTOFF,
    r_trunc: Optional[float] = None,
    t_max: float = settings.REDUCED_T_MAX,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Exp-sinh rule for int_0^inf F(r) r^{n-1+moment} z0(r)^{p+1} / (p+1) dr.

    Returns:
        (radii, weights, half_weights); half_weights use every other node with
        doubled weight and give the error estimate
    """
    _, alpha = bubble_constant(params)
    n, p = params.n, params.p
    steps = int(round(t_max / h))
    index = np.arange(-steps, steps + 1)
    t = h * index
    log_r = 0.5 * np.pi * np.sinh(t)
    log_w = (
        np.log(h)
        + np.log(0.5 * np.pi * np.cosh(t))
        + (n + moment) * log_r
        - n * np.logaddexp(0.0, 2.0 * log_r)
        + (p + 1.0) * np.log(alpha)
        - np.log(p + 1.0)
    )
    keep = log_w > np.max(log_w) + np.log(cutoff)
    if r_trunc is not None:
        keep &= log_r <= np.log(r_trunc)
    w = np.exp(log_w[keep])
    even = index[keep] % 2 == 0
    return np.exp(log_r[keep]), w, np.where(even, 2.0 * w, 0.0)


def _quarter_panels(x: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    phi = np.concatenate([(k + 0.5 * (x + 1.0)) * 0.5 * np.pi for k in range(4)])
    return phi, np.tile(0.25 * np.pi * w, 4)


def angular_rule(n: int, nodes: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Directions on S^{n-1} and weights summing to |S^{n-1}|.

    n = 1 uses {+1, -1}; n = 2 Gauss-Legendre in phi on four quarter panels;
    n = 3 Gauss-Legendre in cos(theta) on [-1, 0] and [0, 1] times the phi panels.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    m = nodes or settings.REDUCED_ANGULAR_NODES[n]
    x, w = np.polynomial.legendre.leggauss(m)
    phi, wphi = _quarter_panels(x, w)
    if n == 2:
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), wphi
    c = np.concatenate([0.5 * (x - 1.0), 0.5 * (x + 1.0)])
    wc = np.tile(0.5 * w, 2)
    cc, pp = np.meshgrid(c, phi, indexing="ij")
    st = np.sqrt(1.0 - cc**2)
    dirs = np.stack([st * np.cos(pp), st * np.sin(pp), cc], axis=-1).reshape(-1, 3)
    return dirs, np.outer(wc, wphi).reshape(-1)


@dataclass
class ReducedQuadrature:
    """
    Product rule against the weight z0^{p+1} / (p+1).

    Attributes:
        points: Nodes y, shape (N, n)
        weights: Weights, shape (N,)
        half_weights: Coarse-rule weights for the error estimate
        tail_mass: Weight mass beyond r_trunc, added analytically
        r_trunc: Radial truncation (None for the untruncated rule)
    """

    points: np.ndarray
    weights: np.ndarray
    half_weights: np.ndarray
    tail_mass: float = 0.0
    r_trunc: Optional[float] = None

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))


def _tail_mass(params: ProblemParams, r_trunc: float) -> float:
    n = params.n
    total = bubble_norm_integral(params) / (params.p + 1.0)
    return float(total * special.betainc(n / 2.0, n / 2.0, 1.0 / (1.0 + r_trunc**2)))


def reduced_quadrature(
    params: ProblemParams,
    h: float = settings.REDUCED_RADIAL_STEP,
    r_trunc: Optional[float] = None,
    angular_nodes: Optional[int] = None,
) -> ReducedQuadrature:
    """Build the product rule for Gamma."""
    r, w, wh = radial_rule(params, 0, h, r_trunc=r_trunc)
    dirs, aw = angular_rule(params.n, angular_nodes)
    points = (r[:, None, None] * dirs[None, :, :]).reshape(-1, params.n)
    tail = _tail_mass(params, r_trunc) if r_trunc is not None else 0.0
    logger.debug(
        f"Reduced quadrature n={params.n}: {r.size} radial x {aw.size} angular nodes"
    )
    return ReducedQuadrature(
        points, np.outer(w, aw).reshape(-1), np.outer(wh, aw).reshape(-1), tail, r_trunc
    )


# -- constants ---------------------------------------------------------------


def c0_closed_form(params: ProblemParams) -> float:
    """alpha^{p+1} |S^{n-1}| B(n/2, n/2) / (2 (p+1))."""
    return bubble_norm_integral(params) / (params.p + 1.0)


def c0(params: ProblemParams, quad: Optional[ReducedQuadrature] = None) -> float:
    """
    c0 = 1/(p+1) int z0^{p+1} by quadrature.

    Raises:
        NumericalAccuracyError: If the rule misses the Beta closed form by more than 1e-8
    """
    from .utils.exceptions import NumericalAccuracyError

    quad = quad or reduced_quadrature(params)
    value = quad.mass + quad.tail_mass
    exact = c0_closed_form(params)
    rel = abs(value - exact) / exact
    if rel > 1e-8:
        raise NumericalAccuracyError(
            f"c0 quadrature {value:.15g} misses closed form {exact:.15g} (rel {rel:.1e})",
            residual=rel,
        )
    return value


def c1(params: ProblemParams, normalization: str = settings.C1_NORMALIZATION) -> float:
    """
    c1 = 1/(N (p+1)) int |y|^2 z0^{p+1}, N = n (or 2n).

    Raises:
        DomainError: For n <= 2, where the integral diverges
        NumericalAccuracyError: If quadrature and the Beta closed form disagree
    """
    from .utils.exceptions import DomainError, NumericalAccuracyError

    n = params.n
    if n <= 2:
        raise DomainError(
            f"c₁ integral divergent: |y|²z₀^{{p+1}} ~ |y|^{{2−2n}} (n = {n})", "K5"
        )
    N = n if normalization == "n" else 2 * n
    _, w, _ = radial_rule(params, moment=2)
    value = sphere_area(n) * float(np.sum(w)) / N
    exact = (
        bubble_constant(params)[1] ** (params.p + 1.0)
        / (params.p + 1.0)
        * sphere_area(n)
        * 0.5
        * special.beta(n / 2.0 + 1.0, n / 2.0 - 1.0)
        / N
    )
    rel = abs(value - exact) / exact
    if rel > 1e-8:
        raise NumericalAccuracyError(
            f"c1 quadrature {value:.15g} misses closed form {exact:.15g}", residual=rel
        )
    return value


# -- the functional ----------------------------------------------------------


class ReducedFunctional:
    """
    Gamma(mu, xi) for a fixed K.

    Args:
        K: Curvature perturbation
        params: Problem parameters
        quad: Product rule (built on demand)
        strict: Raise when the coarse/fine quadrature estimate exceeds REDUCED_QUAD_TOL
    """

    def __init__(
        self,
        K: "CurvatureField",
        params: ProblemParams,
        quad: Optional[ReducedQuadrature] = None,
        strict: bool = True,
    ) -> None:
        from .utils.exceptions import ValidationError

        if K.n != params.n:
            raise ValidationError(
                f"K is defined on R^{K.n} but n = {params.n}", "K", f"field on R^{params.n}"
            )
        self.K = K
        self.params = params
        self.quad = quad or reduced_quadrature(params)
        self.c0 = c0(params, self.quad)
        self.strict = strict
        self.last_error = 0.0

    @property
    def n(self) -> int:
        return self.params.n

    def _xi(self, xi) -> np.ndarray:
        return np.atleast_1d(np.asarray(xi, dtype=float)).reshape(self.n)

    def _check(self, fine: np.ndarray, coarse: np.ndarray, what: str) -> None:
        from .utils.exceptions import NumericalAccuracyError

        if not np.all(np.isfinite(fine)):
            raise NumericalAccuracyError(f"{what}: non-finite quadrature value", residual=float("inf"))
        err = float(np.max(np.abs(fine - coarse)))
        self.last_error = err
        scale = max(1.0, float(np.max(np.abs(fine))))
        if self.strict and err > settings.REDUCED_QUAD_TOL * scale:
            raise NumericalAccuracyError(
                f"{what}: quadrature error estimate {err:.2e} exceeds "
                f"{settings.REDUCED_QUAD_TOL:.0e} (value {float(np.max(np.abs(fine))):.6g})",
                residual=err,
            )

    def _tail_value(self) -> float:
        tv = self.K.tail_value
        return 0.0 if tv is None else float(tv)

    def delta(self, mu: float, xi) -> float:
        """Signed-rule Gamma(mu, xi) - Gamma(0, xi)."""
        xi = self._xi(xi)
        if mu == 0.0:
            return 0.0
        kxi = float(self.K.eval(xi))
        diff = self.K.eval(xi + mu * self.quad.points) - kxi
        fine = self.quad.weights @ diff
        self._check(np.atleast_1d(fine), np.atleast_1d(self.quad.half_weights @ diff), "Γ")
        return float(fine) + self.quad.tail_mass * (self._tail_value() - kxi)

    def value(self, mu: float, xi) -> float:
        xi = self._xi(xi)
        return self.c0 * float(self.K.eval(xi)) + self.delta(abs(mu), xi)

    def gradient(self, mu: float, xi) -> np.ndarray:
        """(D_mu Gamma, D_xi Gamma)."""
        xi = self._xi(xi)
        gxi = self.K.grad(xi)
        if mu == 0.0:
            return np.concatenate([[0.0], self.c0 * gxi])
        m = abs(mu)
        Y = self.quad.points
        G = self.K.grad(xi + m * Y)
        radial = np.sum(G * Y, axis=-1)
        dG = G - gxi
        fine = np.concatenate([[self.quad.weights @ radial], self.quad.weights @ dG])
        coarse = np.concatenate([[self.quad.half_weights @ radial], self.quad.half_weights @ dG])
        self._check(fine, coarse, "Γ′")
        d_mu = np.sign(mu) * fine[0]
        d_xi = (self.c0 - self.quad.tail_mass) * gxi + fine[1:]
        return np.concatenate([[d_mu], d_xi])

    def hessian(self, mu: float, xi) -> np.ndarray:
        """
        Full (n+1) x (n+1) Hessian.

        At mu = 0 only n >= 3 is defined: D_mumu = c1 Delta K, D_mu xi = 0.

        Raises:
            DomainError: mu = 0 with n <= 2
        """
        xi = self._xi(xi)
        n = self.n
        Hxi = self.K.hessian(xi)
        out = np.zeros((n + 1, n + 1))
        if mu == 0.0:
            out[0, 0] = c1(self.params) * float(np.trace(Hxi))
            out[1:, 1:] = self.c0 * Hxi
            return out
        m, sgn = abs(mu), np.sign(mu)
        Y = self.quad.points
        W = self.quad.weights
        H = self.K.hessian(xi + m * Y)
        HY = np.einsum("kij,kj->ki", H, Y)
        out[0, 0] = W @ np.sum(HY * Y, axis=-1)
        out[0, 1:] = out[1:, 0] = sgn * (W @ HY)
        out[1:, 1:] = (self.c0 - self.quad.tail_mass) * Hxi + np.einsum("k,kij->ij", W, H - Hxi)
        return out

    def prime(self, q) -> np.ndarray:
        """Gamma' at q = (mu, xi_1, ..., xi_n)."""
        q = np.asarray(q, dtype=float)
        return self.gradient(float(q[0]), q[1:])

    def prime_rows(self, Q: np.ndarray) -> np.ndarray:
        """Gamma' at each row of Q, shape (N, n+1)."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        return np.stack([self.prime(q) for q in Q])

    def prime_jacobian(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return self.hessian(float(q[0]), q[1:])


def gamma_eval(mu: float, xi, rf: ReducedFunctional) -> float:
    """Gamma(mu, xi); Gamma(0, xi) = c0 K(xi) exactly and Gamma(-mu, xi) = Gamma(mu, xi)."""
    return rf.value(mu, xi)


def gamma_grad(mu: float, xi, rf: ReducedFunctional) -> np.ndarray:
    """(D_mu Gamma, D_xi_1 Gamma, ..., D_xi_n Gamma); D_mu Gamma(0, xi) = 0."""
    return rf.gradient(mu, xi)


def gamma_hessian(mu: float, xi, rf: ReducedFunctional) -> np.ndarray:
    return rf.hessian(mu, xi)


def _richardson(hs: Sequence[float], values: np.ndarray, powers: Sequence[float]) -> np.ndarray:
    """Value at h = 0 of c + sum_k a_k h^{powers_k} fitted through (hs, values)."""
    hs = np.asarray(hs, dtype=float)
    V = np.column_stack([np.ones_like(hs)] + [hs**e for e in powers])
    coef, *_ = np.linalg.lstsq(V, np.asarray(values, dtype=float), rcond=None)
    return coef[0]


@dataclass
class Mu0Hessian:
    """D^2_mumu Gamma(0, xi) = c1 Delta K(xi) with its independent estimates."""

    value: float
    c1: float
    laplacian: float
    second_difference: float
    mixed: np.ndarray

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "c1": self.c1,
            "laplacian": self.laplacian,
            "second_difference": self.second_difference,
            "mixed": self.mixed.tolist(),
        }


def gamma_hessian_mu0(xi, rf: ReducedFunctional) -> Mu0Hessian:
    """
    c1 Delta K(xi), plus a Richardson-extrapolated second difference of Gamma
    in mu and the extrapolated mixed derivatives D^2_{mu, xi_i} Gamma(0, xi).

    Raises:
        DomainError: For n <= 2 (from c1)
    """
    xi = rf._xi(xi)
    c1v = c1(rf.params)
    lap = float(rf.K.laplacian(xi))
    hs = (0.04, 0.02, 0.01)
    d2 = [2.0 * rf.delta(h, xi) / h**2 for h in hs]
    second = float(_richardson(hs, d2, (1.0, 2.0)))

    hm = (0.02, 0.01, 0.005)
    base = rf.gradient(0.0, xi)[1:]
    quotients = np.stack([(rf.gradient(h, xi)[1:] - base) / h for h in hm])
    mixed = np.asarray(_richardson(hm, quotients, (1.0, 2.0)))
    return Mu0Hessian(c1v * lap, c1v, lap, second, mixed)


# -- homogeneous expansion ---------------------------------------------------


@dataclass
class HomogeneousModel:
    """
    Leading term Q_xi of K(x) - K(xi), positively homogeneous of degree beta.

    Attributes:
        beta: Degree, expected in (1, n)
        Q: Vectorized (..., n) -> (...)
        A: Coefficient A_xi once computed
    """

    beta: float
    Q: Callable[[np.ndarray], np.ndarray]
    A: Optional[float] = None

    def homogeneity_error(self, n: int, lams: Sequence[float] = (0.5, 2.0, 10.0), seed: int = 0) -> float:
        """max |Q(l x) - l^beta Q(x)| / max |Q(x)| over random x."""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((64, n))
        base = self.Q(x)
        scale = max(float(np.max(np.abs(base))), np.finfo(float).tiny)
        return max(
            float(np.max(np.abs(self.Q(lam * x) - lam**self.beta * base))) / scale for lam in lams
        )


def abs_moment_sphere(n: int, beta: float) -> float:
    """int_{S^{n-1}} |omega_1|^beta = 2 pi^{(n-1)/2} Gamma((beta+1)/2) / Gamma((beta+n)/2)."""
    return float(
        2.0
        * np.pi ** ((n - 1) / 2.0)
        * np.exp(special.gammaln((beta + 1.0) / 2.0) - special.gammaln((beta + n) / 2.0))
    )


def a_xi(
    model: HomogeneousModel,
    params: ProblemParams,
    angular_nodes: Optional[int] = None,
) -> float:
    """
    A_xi = 1/(p+1) int Q_xi(y) z0^{p+1}(y) dy.

    The radial factor is exact, int_0^inf r^{beta+n-1} (1+r^2)^{-n} dr =
    B((beta+n)/2, (n-beta)/2) / 2; the angular factor uses the panel rule.

    Raises:
        DomainError: If beta is outside (1, n)
    """
    from .utils.exceptions import DomainError

    n, beta = params.n, model.beta
    if not 1.0 < beta < n:
        raise DomainError(
            f"(K3) requires 1 < β < n for a finite A_ξ; got β = {beta:g} with n = {n}", "K3"
        )
    m = angular_nodes or 4 * settings.REDUCED_ANGULAR_NODES[n]
    dirs, aw = angular_rule(n, m)
    sphere_part = float(aw @ model.Q(dirs))
    _, alpha = bubble_constant(params)
    radial = 0.5 * special.beta((beta + n) / 2.0, (n - beta) / 2.0)
    value = alpha ** (params.p + 1.0) / (params.p + 1.0) * sphere_part * radial
    model.A = value
    return value


@dataclass
class LimitEstimate:
    """Extrapolated limit of (Gamma(mu, xi) - Gamma(0, xi)) / mu^beta."""

    value: float
    error: float
    mus: List[float]
    ratios: List[float]
    exponents: List[float]


def a_xi_limit(
    rf: ReducedFunctional,
    xi,
    beta: float,
    mus: Sequence[float] = (0.2, 0.1, 0.05, 0.025),
    exponents: Optional[Sequence[float]] = None,
) -> LimitEstimate:
    """
    Richardson-extrapolate the ratio (Gamma(mu) - Gamma(0)) / mu^beta to mu = 0.

    The ratio is modeled as A + sum_k b_k mu^{e_k}; by default e_k are the
    positive values among {2 - beta, n - beta, 2}. The error estimate is the
    change in A when the last exponent is dropped.
    """
    n = rf.n
    if exponents is None:
        exponents = sorted({round(e, 9) for e in (2.0 - beta, n - beta, 2.0) if e > 1e-9})
    exponents = list(exponents)[: max(0, len(mus) - 1)]
    ratios = [rf.delta(mu, xi) / mu**beta for mu in mus]
    value = float(_richardson(mus, ratios, exponents))
    reduced = float(_richardson(mus, ratios, exponents[:-1])) if exponents else value
    return LimitEstimate(value, abs(value - reduced), list(mus), ratios, exponents)


def a_xi_log_corrected(rf: ReducedFunctional, xi) -> float:
    """
    n = 2 coefficient of mu^2 |log mu| in Gamma(mu, xi) - Gamma(0, xi): Delta K(xi) pi alpha^{p+1} / (2 (p+1)).

    Raises:
        DomainError: If n != 2
    """
    from .utils.exceptions import DomainError

    if rf.n != 2:
        raise DomainError(f"log-corrected coefficient is defined for n = 2, got n = {rf.n}", "K5")
    _, alpha = bubble_constant(rf.params)
    p = rf.params.p
    return float(rf.K.laplacian(rf._xi(xi))) * np.pi * alpha ** (p + 1.0) / (2.0 * (p + 1.0))


def a_xi_first_order(rf: ReducedFunctional, xi) -> float:
    """
    n = 1 coefficient of mu in Gamma(mu, xi) - Gamma(0, xi):
    alpha^{p+1}/(p+1) int (K(xi + x) - K(xi)) / x^2 dx.

    Raises:
        DomainError: If n != 1
        QuadratureError: If the integral does not converge
    """
    from .utils.exceptions import DomainError, QuadratureError

    if rf.n != 1:
        raise DomainError(f"first-order coefficient is defined for n = 1, got n = {rf.n}", "K3")
    xi = float(rf._xi(xi)[0])
    k0 = float(rf.K.eval(np.array([xi])))
    k2 = float(rf.K.hessian(np.array([xi]))[0, 0])

    def integrand(x: float) -> float:
        if x < 1e-3:
            return k2
        pair = rf.K.eval(np.array([[xi + x], [xi - x]]))
        return float(pair[0] + pair[1] - 2.0 * k0) / (x * x)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            near, e1 = integrate.quad(integrand, 0.0, 1.0, limit=200)
            far, e2 = integrate.quad(integrand, 1.0, np.inf, limit=200)
    except integrate.IntegrationWarning as e:
        raise QuadratureError(f"first-order coefficient integral failed: {e}", float("nan"), float("inf"))
    _, alpha = bubble_constant(rf.params)
    p = rf.params.p
    total = near + far
    if e1 + e2 > 1e-8 * max(1.0, abs(total)):
        raise QuadratureError(
            "first-order coefficient integral did not reach tolerance", total, e1 + e2
        )
    return alpha ** (p + 1.0) / (p + 1.0) * total


# -- scans -------------------------------------------------------------------


@dataclass
class LandscapeTable:
    """Grid scan of Gamma and |Gamma'|."""

    header: List[str]
    rows: np.ndarray
    shape: Tuple[int, ...]
    spacing: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def interior_minima(self) -> np.ndarray:
        """Grid points where |Gamma'| is below all 3^d - 1 neighbours (interior only)."""
        g = self.rows[:, -1].reshape(self.shape)
        pts = self.rows[:, : len(self.shape)].reshape(self.shape + (len(self.shape),))
        d = len(self.shape)
        core = tuple(slice(1, s - 1) for s in self.shape)
        mask = np.ones(tuple(max(s - 2, 0) for s in self.shape), dtype=bool)
        for off in itertools.product((-1, 0, 1), repeat=d):
            if not any(off):
                continue
            shifted = tuple(slice(1 + o, s - 1 + o) for o, s in zip(off, self.shape))
            mask &= g[core] < g[shifted]
        return pts[core][mask]


def landscape_scan(
    rf: ReducedFunctional,
    box: Sequence[Tuple[float, float]],
    resolution: int,
    threads: int = settings.THREADS,
) -> LandscapeTable:
    """
    Deterministic grid scan of Gamma and |Gamma'| over a box in R^{n+1}.

    Args:
        rf: Reduced functional
        box: (lo, hi) per coordinate, mu first
        resolution: Grid points per axis
        threads: Worker threads (row order is preserved)

    Returns:
        LandscapeTable with header (mu, xi_1..xi_n, gamma, grad_norm)
    """
    from .utils.exceptions import ValidationError

    n = rf.n
    if len(box) != n + 1:
        raise ValidationError(
            f"Landscape box needs {n + 1} intervals, got {len(box)}", "box", "(n+1) x 2 list"
        )
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=1)
    tracker = ProgressTracker(points.shape[0], "Landscape scan")

    def evaluate(q: np.ndarray) -> Tuple[float, float]:
        value = rf.value(float(q[0]), q[1:])
        grad = rf.gradient(float(q[0]), q[1:])
        return value, float(np.linalg.norm(grad))

    results = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for res in executor.map(evaluate, points):
            results.append(res)
            tracker.update()
    tracker.finish()

    rows = np.column_stack([points, np.asarray(results)])
    header = ["mu"] + [f"xi_{i + 1}" for i in range(n)] + ["gamma", "grad_norm"]
    spacing = np.array([(hi - lo) / max(resolution - 1, 1) for lo, hi in box])
    return LandscapeTable(header, rows, tuple([resolution] * (n + 1)), spacing)


def boundary_repulsion(
    rf: ReducedFunctional, R: float, probes: int = 128, seed: int = 0
) -> Dict[str, object]:
    """
    Sample <Gamma'(q), q> on the sphere |q| = R in R^{n+1}.

    Returns:
        Dict with radius, probes, max_inner and passed (all inner products < 0)
    """
    d = rf.n + 1
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((probes, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.vstack([dirs, np.eye(d), -np.eye(d)])
    inner = np.array([float(rf.prime(R * u) @ (R * u)) for u in dirs])
    result = {
        "radius": float(R),
        "probes": int(dirs.shape[0]),
        "max_inner": float(np.max(inner)),
        "passed": bool(np.all(inner < 0.0)),
    }
    logger.debug(f"Boundary repulsion at R={R:g}: max <Γ′(q), q> = {result['max_inner']:.3e}")
    return result


__all__ = [
    "HomogeneousModel",
    "LandscapeTable",
    "LimitEstimate",
    "Mu0Hessian",
    "ReducedFunctional",
    "ReducedQuadrature",
    "a_xi",
    "a_xi_first_order",
    "a_xi_limit",
    "a_xi_log_corrected",
    "abs_moment_sphere",
    "angular_rule",
    "boundary_repulsion",
    "c0",
    "c0_closed_form",
    "c1",
    "gamma_eval",
    "gamma_grad",
    "gamma_hessian",
    "gamma_hessian_mu0",
    "landscape_scan",
    "radial_rule",
    "reduced_quadrature",
]
