"""
Deflated Newton solver for the sphere Galerkin system and epsilon sweeps.

Each step splits the update into a part orthogonal to the n+1 lifted bubble
tangents and a part along them. The orthogonal part is solved with the
projected Jacobian (dense LU for n = 1, preconditioned GMRES for n = 2); the
tangential part comes from the (n+1) x (n+1) Schur complement, whose singular
values below DEFLATION_CUTOFF * max(lambda) are dropped.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize
from scipy.sparse.linalg import LinearOperator, gmres

from ..bubbles import Bubble, bubble_constant, lift_bubble, lift_tangents
from ..conditions.curvature import CurvatureField
from ..config import settings
from ..geometry.params import ProblemParams
from ..geometry.sphere import SphereField, get_basis, pull_sphere_to_plane
from ..utils.logger import logger
from ..utils.progress import ProgressTracker
from .diagnostics import decay_slope
from .galerkin import GalerkinProblem, dgamma_norm


@dataclass
class SolutionRecord:
    """A converged (or rejected) solve at one epsilon."""

    epsilon: float
    field: SphereField
    residual_L2: float
    newton_iters: int
    nearest_bubble: Bubble
    distance_to_Z: float
    positivity_margin: float
    kernel_gap: float = float("nan")
    fine_residual: float = float("nan")
    decay_slope: float = float("nan")
    energy: float = float("nan")
    trace: List[Dict[str, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "L": self.field.L,
            "residual_L2": self.residual_L2,
            "newton_iters": self.newton_iters,
            "nearest_bubble": self.nearest_bubble.describe(),
            "distance_to_Z": self.distance_to_Z,
            "positivity_margin": self.positivity_margin,
            "kernel_gap": self.kernel_gap,
            "fine_residual": self.fine_residual,
            "decay_slope": self.decay_slope,
            "energy": self.energy,
            "trace": self.trace,
        }

    def field_rows(self, params: ProblemParams) -> Tuple[List[str], List[List[float]]]:
        """(header, rows) of node coordinates, plane image, v and u for CSV export."""
        basis = self.field.basis
        n = basis.n
        points, u = pull_sphere_to_plane(self.field, params)
        omega = basis.points.reshape(-1, n + 1)
        x = points.reshape(-1, n)
        v = self.field.values().reshape(-1)
        header = [f"omega_{i}" for i in range(n + 1)] + [f"x_{i + 1}" for i in range(n)] + ["v", "u"]
        rows = np.column_stack([omega, x, v, u.reshape(-1)])
        return header, rows.tolist()


def initial_bubble(v: SphereField, params: ProblemParams) -> Bubble:
    """Bubble guess from the maximum of the plane field: u(xi) = alpha mu^{-s}."""
    _, alpha = bubble_constant(params)
    points, u = pull_sphere_to_plane(v, params)
    i = int(np.argmax(u))
    umax = float(u.reshape(-1)[i])
    mu = (alpha / umax) ** (1.0 / params.s) if umax > 0 else 1.0
    return Bubble(mu, points.reshape(-1, params.n)[i], params)


def nearest_bubble(
    v: SphereField, params: ProblemParams, init: Optional[Bubble] = None
) -> Tuple[Bubble, float]:
    """
    Minimize the D^gamma distance from v to Z over (log mu, xi).

    Returns:
        (bubble, distance)
    """
    basis = v.basis
    lam = basis.multipliers(params)
    init = init or initial_bubble(v, params)

    def objective(q: np.ndarray) -> Tuple[float, np.ndarray]:
        mu = math.exp(float(q[0]))
        b = Bubble(mu, q[1:], params)
        d = lift_bubble(b, basis).coeffs - v.coeffs
        grad = 2.0 * lift_tangents(b, basis) @ (lam * d)
        grad[0] *= mu
        return float(np.dot(lam, d * d)), grad

    x0 = np.concatenate([[math.log(init.mu)], init.xi])
    res = optimize.minimize(
        objective, x0, jac=True, method="BFGS", options={"gtol": 1e-13, "maxiter": 200}
    )
    best = Bubble(math.exp(float(res.x[0])), res.x[1:], params)
    distance = dgamma_norm(SphereField(basis, lift_bubble(best, basis).coeffs - v.coeffs), params)
    return best, distance


class _ComplementSolver:
    """Solves (P J P + T T^t) x = b for the current Jacobian."""

    def __init__(self, problem: GalerkinProblem, weight: np.ndarray, Tq: np.ndarray) -> None:
        self.problem = problem
        self.weight = weight
        self.Tq = Tq
        self.dense = problem.basis.n == 1
        if self.dense:
            J = problem.jacobian_apply(weight, np.eye(problem.basis.size))
            J = 0.5 * (J + J.T)
            P = np.eye(J.shape[0]) - Tq @ Tq.T
            self.lu = linalg.lu_factor(P @ J @ P + Tq @ Tq.T)
        else:
            size = problem.basis.size
            self.operator = LinearOperator((size, size), matvec=self._matvec, dtype=float)
            self.preconditioner = LinearOperator(
                (size, size), matvec=lambda x: np.ravel(x) / problem.lam, dtype=float
            )

    def project(self, x: np.ndarray) -> np.ndarray:
        return x - self.Tq @ (self.Tq.T @ x)

    def apply_J(self, x: np.ndarray) -> np.ndarray:
        """J applied to a vector or to the columns of a matrix."""
        if x.ndim == 1:
            return self.problem.jacobian_apply(self.weight, x)
        return self.problem.jacobian_apply(self.weight, x.T).T

    def _matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.ravel(x)
        return self.project(self.apply_J(self.project(x))) + self.Tq @ (self.Tq.T @ x)

    def solve(self, b: np.ndarray) -> np.ndarray:
        from ..utils.exceptions import ConvergenceError

        if self.dense:
            return linalg.lu_solve(self.lu, b)
        x, info = gmres(
            self.operator,
            b,
            rtol=settings.GMRES_RTOL,
            atol=0.0,
            restart=200,
            maxiter=20,
            M=self.preconditioner,
        )
        if info != 0:
            raise ConvergenceError(f"GMRES did not reach rtol {settings.GMRES_RTOL:g} (info={info})")
        return x


def _deflated_step(solver: _ComplementSolver, F: np.ndarray, cutoff: float) -> Tuple[np.ndarray, int]:
    """Newton update by block elimination; returns (step, retained tangent rank)."""
    Tq = solver.Tq
    y0 = solver.solve(-solver.project(F))
    JT = solver.apply_J(Tq)
    Y = np.column_stack([solver.solve(solver.project(JT[:, j])) for j in range(Tq.shape[1])])
    S = Tq.T @ JT - JT.T @ Y
    rhs = -Tq.T @ F - JT.T @ y0
    U, sv, Vt = linalg.svd(S)
    keep = sv > cutoff
    a = Vt[keep].T @ ((U[:, keep].T @ rhs) / sv[keep])
    return y0 - Y @ a + Tq @ a, int(np.count_nonzero(keep))


def _tangent_frame(b: Bubble, basis) -> np.ndarray:
    T = lift_tangents(b, basis).T
    Tq, _ = linalg.qr(T, mode="economic")
    return Tq


def newton_iterate(
    problem: GalerkinProblem,
    coeffs: np.ndarray,
    Tq: np.ndarray,
    tol: float,
    max_iter: int = settings.NEWTON_MAX_ITER,
) -> Tuple[np.ndarray, List[Dict[str, float]]]:
    """
    Deflated Newton with backtracking on ||F||.

    Raises:
        ConvergenceError: On line-search stagnation, non-finite residuals or
            when max_iter steps do not reach tol; carries the residual trace
    """
    from ..utils.exceptions import ConvergenceError

    cutoff = settings.DEFLATION_CUTOFF * float(np.max(problem.lam))
    c = np.array(coeffs, dtype=float)
    F = problem.residual(c)
    norm = float(np.linalg.norm(F))
    trace: List[Dict[str, float]] = [{"iteration": 0, "residual": norm}]
    for it in range(1, max_iter + 1):
        if norm <= tol:
            return c, trace
        if not np.isfinite(norm):
            raise ConvergenceError("Newton residual is not finite", trace)
        solver = _ComplementSolver(problem, problem.jacobian_weight(c), Tq)
        step, rank = _deflated_step(solver, F, cutoff)
        t = 1.0
        while t >= 1.0 / 64.0:
            trial = c + t * step
            F_trial = problem.residual(trial)
            trial_norm = float(np.linalg.norm(F_trial))
            if np.isfinite(trial_norm) and trial_norm <= (1.0 - 1e-4 * t) * norm:
                break
            t *= 0.5
        else:
            trace.append({"iteration": it, "residual": norm, "step": float(np.linalg.norm(step)), "t": 0.0})
            raise ConvergenceError(f"Newton line search stagnated at ||F|| = {norm:.3e}", trace)
        c, F, norm = trial, F_trial, trial_norm
        trace.append(
            {
                "iteration": it,
                "residual": norm,
                "step": float(t * np.linalg.norm(step)),
                "t": t,
                "tangent_rank": rank,
            }
        )
        logger.debug(f"Newton {it}: ||F|| = {norm:.3e} (t = {t:g}, tangent rank {rank})")
    if norm <= tol:
        return c, trace
    raise ConvergenceError(f"Newton did not reach {tol:.1e} in {max_iter} steps (||F|| = {norm:.3e})", trace)


def solve_newton(
    seed: SphereField,
    epsilon: float,
    K: Optional[CurvatureField],
    params: ProblemParams,
    tol: Optional[float] = None,
    seed_bubble: Optional[Bubble] = None,
    epsilon_max: float = settings.EPSILON_MAX,
    compute_gap: bool = True,
    threads: int = settings.THREADS,
) -> SolutionRecord:
    """
    Solve P_gamma v = (1 + eps K o F) v_+^p from a seed field.

    Args:
        seed: Starting field, typically the lifted bubble at a zero of Gamma'
        epsilon: Perturbation size, |epsilon| <= epsilon_max
        K: Curvature perturbation
        params: Problem parameters (n in {1, 2})
        tol: Residual tolerance (default NEWTON_TOL[n])
        seed_bubble: Bubble whose tangents span the deflated directions;
            fitted to the seed when omitted
        epsilon_max: Upper end of the perturbative range
        compute_gap: Also report the smallest |eigenvalue| of the Jacobian
        threads: Worker threads for dense Jacobian assembly

    Returns:
        SolutionRecord of the accepted solution

    Raises:
        ValidationError: If |epsilon| > epsilon_max
        ConvergenceError: If Newton stagnates
        PositivityError: If the converged field is not strictly positive
    """
    from ..utils.exceptions import PositivityError, ValidationError

    if abs(epsilon) > epsilon_max:
        raise ValidationError(
            f"epsilon = {epsilon:g} outside the perturbative range |ε| <= {epsilon_max:g}",
            "epsilon",
            f"real with |ε| <= {epsilon_max:g}",
        )
    tol = settings.NEWTON_TOL.get(params.n, 1e-7) if tol is None else tol
    basis = seed.basis
    problem = GalerkinProblem.for_curvature(params, basis, K, epsilon)
    anchor = seed_bubble or nearest_bubble(seed, params)[0]
    coeffs, trace = newton_iterate(problem, seed.coeffs, _tangent_frame(anchor, basis), tol)
    solution = SphereField(basis, coeffs)

    fine_basis = get_basis(params.n, 2 * basis.L)
    fine_coeffs = basis.resample(coeffs, fine_basis)
    fine_problem = problem.with_basis(fine_basis, K)
    margin = float(np.min(fine_basis.synthesis(fine_coeffs)))
    if margin <= 0.0:
        raise PositivityError(
            f"Converged field is not positive (min = {margin:.3e}) at ε = {epsilon:g}", margin
        )

    bubble, distance = nearest_bubble(solution, params, anchor)
    gap = float("nan")
    if compute_gap:
        evals = linalg.eigvalsh(problem.jacobian_matrix(coeffs, threads))
        gap = float(np.min(np.abs(evals)))

    record = SolutionRecord(
        epsilon=float(epsilon),
        field=solution,
        residual_L2=problem.residual_norm(coeffs),
        newton_iters=len(trace) - 1,
        nearest_bubble=bubble,
        distance_to_Z=distance,
        positivity_margin=margin,
        kernel_gap=gap,
        fine_residual=fine_problem.residual_norm(fine_coeffs),
        decay_slope=decay_slope(solution, params, bubble.xi),
        energy=problem.energy(coeffs),
        trace=trace,
    )
    logger.info(
        f"✅ Solve at ε = {epsilon:g} completed: {record.newton_iters} Newton step(s), "
        f"||F|| = {record.residual_L2:.2e}, dist(u, Z) = {distance:.3e}"
    )
    return record


@dataclass
class SweepResult:
    """Rows of an epsilon sweep and the fit log(distance) = log C + slope log(eps)."""

    records: List[SolutionRecord]
    rows: List[Dict[str, Any]]
    slope: Optional[float] = None
    C: Optional[float] = None
    monotone: Optional[bool] = None

    @property
    def failures(self) -> List[Dict[str, Any]]:
        return [r for r in self.rows if r["status"] != "ok"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "fit": {"slope": self.slope, "C": self.C, "monotone": self.monotone},
        }


def fit_sweep(rows: Sequence[Dict[str, Any]]) -> Tuple[Optional[float], Optional[float], Optional[bool]]:
    """Least-squares slope and constant of log(distance) against log(eps) over eps > 0."""
    usable = [(r["epsilon"], r["distance_to_Z"]) for r in rows if r["status"] == "ok" and r["epsilon"] > 0 and r["distance_to_Z"] > 0]
    if len(usable) < 2:
        return None, None, None
    eps, dist = np.array(usable).T
    slope, intercept = np.polyfit(np.log(eps), np.log(dist), 1)
    monotone = bool(np.all(np.diff(dist[np.argsort(eps)]) >= 0.0))
    return float(slope), float(math.exp(intercept)), monotone


def _row(epsilon: float, record: Optional[SolutionRecord], error: str = "") -> Dict[str, Any]:
    if record is None:
        return {"epsilon": epsilon, "status": "failed", "error": error}
    b = record.nearest_bubble
    return {
        "epsilon": epsilon,
        "status": "ok",
        "error": "",
        "residual_L2": record.residual_L2,
        "newton_iters": record.newton_iters,
        "mu": b.mu,
        **{f"xi_{i + 1}": float(x) for i, x in enumerate(b.xi)},
        "distance_to_Z": record.distance_to_Z,
        "positivity_margin": record.positivity_margin,
        "kernel_gap": record.kernel_gap,
    }


def continuation_sweep(
    K: CurvatureField,
    params: ProblemParams,
    eps_list: Sequence[float],
    seed_bubble: Bubble,
    L: Optional[int] = None,
    warm_start: bool = True,
    threads: int = settings.THREADS,
    tol: Optional[float] = None,
) -> SweepResult:
    """
    Solve for every epsilon in eps_list and fit distance_to_Z against eps.

    Warm-started sweeps run in order, each solve seeded by the previous
    solution; cold sweeps seed every solve with the lifted bubble and may run
    on a thread pool. Failures are recorded and the sweep continues.
    """
    from ..utils.exceptions import QGammaError, ValidationError

    eps_list = [float(e) for e in eps_list]
    if eps_list != sorted(eps_list):
        raise ValidationError("eps_list must be sorted ascending", "eps_list", "ascending reals")
    L = L or settings.DEFAULT_L.get(params.n, 0)
    basis = get_basis(params.n, L)
    lifted = lift_bubble(seed_bubble, basis)
    tracker = ProgressTracker(len(eps_list), "ε sweep")

    def attempt(eps: float, seed: SphereField, anchor: Bubble) -> Tuple[Optional[SolutionRecord], str]:
        try:
            return solve_newton(seed, eps, K, params, tol=tol, seed_bubble=anchor, compute_gap=False), ""
        except QGammaError as e:
            logger.warning(f"⚠️ WARN: solve at ε = {eps:g} failed: {e}")
            return None, str(e)

    outcomes: List[Tuple[Optional[SolutionRecord], str]] = []
    if warm_start:
        seed, anchor = lifted, seed_bubble
        for eps in eps_list:
            record, error = attempt(eps, seed, anchor)
            if record is not None:
                seed, anchor = record.field, record.nearest_bubble
            outcomes.append((record, error))
            tracker.update()
    else:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            for outcome in executor.map(lambda e: attempt(e, lifted, seed_bubble), eps_list):
                outcomes.append(outcome)
                tracker.update()
    tracker.finish()

    records = [r for r, _ in outcomes if r is not None]
    rows = [_row(eps, r, err) for eps, (r, err) in zip(eps_list, outcomes)]
    slope, C, monotone = fit_sweep(rows)
    if slope is not None:
        logger.info(f"✅ ε sweep completed: slope {slope:.3f}, C = {C:.3e}")
    else:
        logger.warning("⚠️ WARN: ε sweep has fewer than two usable rows; no fit")
    return SweepResult(records, rows, slope, C, monotone)


__all__ = [
    "SolutionRecord",
    "SweepResult",
    "continuation_sweep",
    "fit_sweep",
    "initial_bubble",
    "nearest_bubble",
    "newton_iterate",
    "solve_newton",
]
