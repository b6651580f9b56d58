"""
Problem parameters and the closed-form constants derived from them.
"""

import math
from dataclasses import dataclass

from scipy import special


@dataclass(frozen=True)
class ProblemParams:
    """
    Dimension n, order gamma and the critical exponents.

    Attributes:
        n: Dimension of the plane R^n (1 <= n <= 3)
        gamma: Order of the operator, in (0, n/2)
        p: Critical exponent (n + 2 gamma) / (n - 2 gamma)
        two_star: Sobolev exponent 2n / (n - 2 gamma) = p + 1
    """

    n: int
    gamma: float
    p: float
    two_star: float

    @property
    def s(self) -> float:
        """Conformal weight (n - 2 gamma) / 2."""
        return (self.n - 2.0 * self.gamma) / 2.0

    def describe(self) -> dict:
        return {"n": self.n, "gamma": self.gamma, "p": self.p, "two_star": self.two_star}


def make_params(n: int, gamma: float) -> ProblemParams:
    """
    Build validated problem parameters.

    Args:
        n: Dimension, 1 <= n <= 3
        gamma: Order, 0 < gamma < n/2

    Returns:
        Populated ProblemParams

    Raises:
        ValidationError: If n or gamma is out of range; the message names the bound
    """
    from ..utils.exceptions import ValidationError

    if isinstance(n, bool) or int(n) != n:
        raise ValidationError(f"n must be an integer, got {n!r}", "n", "integer in [1, 3]")
    n = int(n)
    if n < 1:
        raise ValidationError(f"n = {n} violates n >= 1", "n", "integer in [1, 3]")
    if n > 3:
        raise ValidationError(f"n = {n} violates n <= 3", "n", "integer in [1, 3]")

    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise ValidationError(
            f"gamma = {gamma} violates gamma > 0", "gamma", "real in (0, n/2)"
        )
    if gamma >= n / 2.0:
        raise ValidationError(
            f"gamma = {gamma} violates gamma < n/2 = {n / 2.0}", "gamma", "real in (0, n/2)"
        )

    denom = n - 2.0 * gamma
    return ProblemParams(
        n=n,
        gamma=gamma,
        p=(n + 2.0 * gamma) / denom,
        two_star=2.0 * n / denom,
    )


def sphere_area(n: int) -> float:
    """Surface area |S^{n-1}| of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def bubble_constant_closed_form(params: ProblemParams) -> float:
    """Lambda = 2^{2 gamma} Gamma(n/2 + gamma) / Gamma(n/2 - gamma)."""
    n, g = params.n, params.gamma
    return 2.0 ** (2.0 * g) * math.exp(
        special.gammaln(n / 2.0 + g) - special.gammaln(n / 2.0 - g)
    )


def pv_constant(n: int, gamma: float) -> float:
    """
    Normalization of the singular-integral form of (-Delta)^gamma.

    C(n, gamma) = 4^gamma Gamma(n/2 + gamma) / (pi^{n/2} |Gamma(-gamma)|), valid
    for 0 < gamma < 1.
    """
    return (
        4.0**gamma
        * math.gamma(n / 2.0 + gamma)
        / (math.pi ** (n / 2.0) * abs(math.gamma(-gamma)))
    )


def riesz_constant(params: ProblemParams) -> float:
    """Kernel constant of the inverse: Gamma(n/2 - gamma) / (4^gamma pi^{n/2} Gamma(gamma))."""
    n, g = params.n, params.gamma
    return math.gamma(n / 2.0 - g) / (4.0**g * math.pi ** (n / 2.0) * math.gamma(g))


__all__ = [
    "ProblemParams",
    "bubble_constant_closed_form",
    "make_params",
    "pv_constant",
    "riesz_constant",
    "sphere_area",
]
