"""
Curvature perturbations K on R^n and the built-in library.

Every field evaluates on arrays of points with the coordinate on the last
axis; gradients and Hessians are analytic when supplied and fall back to
central differences with step FD_STEP * (1 + |x|) otherwise.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..config import settings
from ..utils.logger import logger

ArrayFunc = Callable[[np.ndarray], np.ndarray]


@dataclass
class K6Data:
    """
    Coordinate-wise homogeneous expansion K(x) = K(xi) + sum a_j |x_j - xi_j|^beta + o(|x - xi|^beta).

    Attributes:
        beta: Homogeneity degree, expected in (1, n)
        coefficients: xi -> (a_1, ..., a_n)
    """

    beta: float
    coefficients: ArrayFunc


@dataclass
class CurvatureField:
    """
    A perturbation shape K: R^n -> R.

    Attributes:
        name: Identifier used in reports
        n: Dimension
        func: Vectorized K, (..., n) -> (...)
        grad_func: Optional analytic gradient, (..., n) -> (..., n)
        hessian_func: Optional analytic Hessian, (..., n) -> (..., n, n)
        eta: Radius beyond which <K'(x), x> < 0 is claimed
        tail_value: K at infinity when known
        bound: Stated bound on |K|; None when K is not claimed bounded
        seeds: Known critical points (extra Newton seeds)
        k6: Optional coordinate-wise expansion data
        smooth_hessian: False when K is not C^2 at some critical point
        options: Construction options, echoed in reports
    """

    name: str
    n: int
    func: ArrayFunc
    grad_func: Optional[ArrayFunc] = None
    hessian_func: Optional[ArrayFunc] = None
    eta: float = settings.DEFAULT_ETA
    tail_value: Optional[float] = 0.0
    bound: Optional[float] = None
    seeds: List[np.ndarray] = field(default_factory=list)
    k6: Optional[K6Data] = None
    smooth_hessian: bool = True
    options: Dict[str, Any] = field(default_factory=dict)

    def _points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return x

    def __call__(self, x) -> np.ndarray:
        return self.eval(x)

    def eval(self, x) -> np.ndarray:
        return np.asarray(self.func(self._points(x)), dtype=float)

    @property
    def uses_fd(self) -> bool:
        """True when derivatives come from finite differences."""
        return self.grad_func is None

    def grad(self, x) -> np.ndarray:
        x = self._points(x)
        if self.grad_func is not None:
            return np.asarray(self.grad_func(x), dtype=float)
        return _fd_jacobian(self.eval, x)

    def hessian(self, x) -> np.ndarray:
        x = self._points(x)
        if self.hessian_func is not None:
            return np.asarray(self.hessian_func(x), dtype=float)
        return _fd_jacobian(self.grad, x)

    def laplacian(self, x) -> np.ndarray:
        return np.trace(self.hessian(x), axis1=-2, axis2=-1)

    def translated(self, a) -> "CurvatureField":
        """x -> K(x - a)."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return replace(
            self,
            name=f"{self.name}(x-a)",
            func=lambda x: self.func(x - a),
            grad_func=None if self.grad_func is None else (lambda x: self.grad_func(x - a)),
            hessian_func=None
            if self.hessian_func is None
            else (lambda x: self.hessian_func(x - a)),
            seeds=[np.asarray(s) + a for s in self.seeds],
            k6=None,
        )

    def scaled(self, lam: float) -> "CurvatureField":
        """x -> K(lam x)."""
        return replace(
            self,
            name=f"{self.name}(λx)",
            func=lambda x: self.func(lam * x),
            grad_func=None if self.grad_func is None else (lambda x: lam * self.grad_func(lam * x)),
            hessian_func=None
            if self.hessian_func is None
            else (lambda x: lam * lam * self.hessian_func(lam * x)),
            eta=self.eta / lam,
            seeds=[np.asarray(s) / lam for s in self.seeds],
            k6=None,
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "eta": self.eta,
            "options": dict(self.options),
            "finite_difference_derivatives": self.uses_fd,
        }


def _fd_jacobian(f: ArrayFunc, x: np.ndarray) -> np.ndarray:
    """Central differences of f along each coordinate, stacked on a new last axis."""
    h = settings.FD_STEP * (1.0 + np.linalg.norm(x, axis=-1))
    cols = []
    for i in range(x.shape[-1]):
        step = np.zeros(x.shape)
        step[..., i] = h
        diff = np.asarray(f(x + step)) - np.asarray(f(x - step))
        scale = h.reshape(h.shape + (1,) * (diff.ndim - h.ndim))
        cols.append(diff / (2.0 * scale))
    return np.stack(cols, axis=-1)


def _sq(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1)


def _eye(x: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.eye(x.shape[-1]), x.shape + (x.shape[-1],))


# -- built-in library -----------------------------------------------------


def radial_bump(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """K = 1 / (1 + |x|^2)."""

    def f(x):
        return 1.0 / (1.0 + _sq(x))

    def g(x):
        return -2.0 * x / ((1.0 + _sq(x)) ** 2)[..., None]

    def h(x):
        q = (1.0 + _sq(x))[..., None, None]
        return -2.0 * _eye(x) / q**2 + 8.0 * x[..., :, None] * x[..., None, :] / q**3

    return CurvatureField(
        "radial-bump", n, f, g, h, eta=1.0, bound=1.0, seeds=[np.zeros(n)], options=options or {}
    )


def gaussian(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """K = a exp(-|x|^2 / w^2)."""
    options = dict(options or {})
    a = float(options.get("amplitude", 1.0))
    w2 = float(options.get("width", 1.0)) ** 2

    def f(x):
        return a * np.exp(-_sq(x) / w2)

    def g(x):
        return (-2.0 / w2) * x * f(x)[..., None]

    def h(x):
        k = f(x)[..., None, None]
        return k * (4.0 / w2**2 * x[..., :, None] * x[..., None, :] - 2.0 / w2 * _eye(x))

    return CurvatureField(
        "gaussian", n, f, g, h, eta=1.0, bound=abs(a), seeds=[np.zeros(n)], options=options
    )


def two_bump(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """Sum of two Gaussians of width w centered at +-d e_1 (defaults w = 0.8, d = 1)."""
    options = dict(options or {})
    w2 = float(options.get("width", 0.8)) ** 2
    d = float(options.get("separation", 1.0))
    centers = np.zeros((2, n))
    centers[0, 0], centers[1, 0] = d, -d

    def f(x):
        return sum(np.exp(-_sq(x - c) / w2) for c in centers)

    def g(x):
        return sum((-2.0 / w2) * (x - c) * np.exp(-_sq(x - c) / w2)[..., None] for c in centers)

    def h(x):
        out = 0.0
        for c in centers:
            y = x - c
            k = np.exp(-_sq(y) / w2)[..., None, None]
            out = out + k * (4.0 / w2**2 * y[..., :, None] * y[..., None, :] - 2.0 / w2 * _eye(x))
        return out

    return CurvatureField(
        "two-bump",
        n,
        f,
        g,
        h,
        eta=1.5 * d,
        bound=2.0,
        seeds=[np.zeros(n), centers[0].copy(), centers[1].copy()],
        options={"width": float(np.sqrt(w2)), "separation": d, **options},
    )


def cusp(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """
    K = exp(-|x|^2 - a sum_j |x_j|^beta), beta = 3/2 by default.

    C^1 but not C^2 at the origin, where K(x) = 1 - a sum |x_j|^beta + O(|x|^2).
    """
    options = dict(options or {})
    a = float(options.get("a", 1.0))
    beta = float(options.get("beta", 1.5))

    def f(x):
        return np.exp(-_sq(x) - a * np.sum(np.abs(x) ** beta, axis=-1))

    def glog(x):
        return -2.0 * x - a * beta * np.sign(x) * np.abs(x) ** (beta - 1.0)

    def g(x):
        return f(x)[..., None] * glog(x)

    def h(x):
        with np.errstate(divide="ignore"):
            diag = -2.0 - a * beta * (beta - 1.0) * np.abs(x) ** (beta - 2.0)
        gl = glog(x)
        k = f(x)[..., None, None]
        return k * (gl[..., :, None] * gl[..., None, :] + diag[..., None] * _eye(x))

    return CurvatureField(
        "cusp",
        n,
        f,
        g,
        h,
        eta=1.0,
        bound=1.0,
        seeds=[np.zeros(n)],
        k6=K6Data(beta, lambda xi: -a * float(f(np.asarray(xi, dtype=float))) * np.ones(n)),
        smooth_hessian=False,
        options={"a": a, "beta": beta, **options},
    )


def constant(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """K = c (default 1)."""
    options = dict(options or {})
    c = float(options.get("value", 1.0))
    return CurvatureField(
        "constant",
        n,
        lambda x: np.full(x.shape[:-1], c),
        lambda x: np.zeros_like(x),
        lambda x: np.zeros(x.shape + (x.shape[-1],)),
        eta=1.0,
        tail_value=c,
        bound=abs(c),
        options={"value": c},
    )


def zero(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """K = 0."""
    k = constant(n, {"value": 0.0})
    return replace(k, name="zero", options={})


def paraboloid(n: int, options: Optional[Dict[str, Any]] = None) -> CurvatureField:
    """K = |x|^2 (unbounded)."""
    return CurvatureField(
        "paraboloid",
        n,
        _sq,
        lambda x: 2.0 * x,
        lambda x: 2.0 * _eye(x),
        eta=1.0,
        tail_value=None,
        bound=None,
        seeds=[np.zeros(n)],
    )


BUILTINS: Dict[str, Callable[[int, Optional[Dict[str, Any]]], CurvatureField]] = {
    "radial-bump": radial_bump,
    "gaussian": gaussian,
    "two-bump": two_bump,
    "cusp": cusp,
    "constant": constant,
    "zero": zero,
    "paraboloid": paraboloid,
}


def builtin_field(
    name: str, n: int, options: Optional[Dict[str, Any]] = None, eta: Optional[float] = None
) -> CurvatureField:
    """
    Build a library field by name.

    Args:
        name: One of BUILTINS
        n: Dimension
        options: Builder options (amplitude, width, separation, a, beta, value)
        eta: Override of the documented (K1) radius

    Raises:
        ValidationError: If the name is unknown
    """
    from ..utils.exceptions import ValidationError

    if name not in BUILTINS:
        raise ValidationError(
            f"Unknown built-in K '{name}'; available: {', '.join(sorted(BUILTINS))}",
            "K.builtin",
            "built-in name",
        )
    k = BUILTINS[name](n, options)
    if eta is not None:
        k = replace(k, eta=float(eta))
    logger.debug(f"Built-in K '{name}' (n={n}, η={k.eta})")
    return k


__all__ = [
    "BUILTINS",
    "CurvatureField",
    "K6Data",
    "builtin_field",
    "constant",
    "cusp",
    "gaussian",
    "paraboloid",
    "radial_bump",
    "two_bump",
    "zero",
]
