"""
Checkers for the hypotheses (K1)-(K6), the degree bookkeeping of the
reduced functional and the aggregated applicability verdict.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..degree import (
    CritSearch,
    DegreeResult,
    MapUnderTest,
    brouwer_degree,
    crit_points,
)
from ..geometry.params import ProblemParams
from ..reduced import (
    HomogeneousModel,
    ReducedFunctional,
    a_xi,
    a_xi_first_order,
    a_xi_log_corrected,
    angular_rule,
    boundary_repulsion,
    c1,
)
from ..utils.logger import logger
from .curvature import CurvatureField

PASS, FAIL, NOT_APPLICABLE, UNKNOWN = "pass", "fail", "not-applicable", "unknown"


@dataclass
class Verdict:
    """Outcome of one condition check."""

    status: str
    detail: str = ""
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        return {"status": self.status, "detail": self.detail, "evidence": self.evidence}


@dataclass
class CritEntry:
    """A critical point of K with its local data."""

    xi: np.ndarray
    deg_loc: int
    beta: Optional[float] = None
    A: Optional[float] = None
    route: str = ""
    verified: bool = False
    laplacian: Optional[float] = None
    a_tilde: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "xi": self.xi.tolist(),
            "deg_loc": self.deg_loc,
            "beta": self.beta,
            "A": self.A,
            "route": self.route,
            "verified": self.verified,
            "laplacian": self.laplacian,
            "a_tilde": self.a_tilde,
            "detail": self.detail,
        }


def gradient_map(K: CurvatureField) -> MapUnderTest:
    """K' as a map R^n -> R^n."""
    jac = None
    if K.hessian_func is not None and K.smooth_hessian:
        jac = lambda x: K.hessian(x)  # noqa: E731
    return MapUnderTest(K.n, lambda X: K.grad(X), jac, name="K′")


def gamma_map(rf: ReducedFunctional, threads: int = settings.THREADS) -> MapUnderTest:
    """Gamma' as a map R^{n+1} -> R^{n+1}."""
    K = rf.K
    jac = rf.prime_jacobian if (K.hessian_func is not None and K.smooth_hessian) else None
    return MapUnderTest.from_pointwise(rf.n + 1, rf.prime, jac, threads=threads, name="Γ′")


def _shell_directions(n: int, count: int = settings.K1_PROBES) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    k = np.arange(count) + 0.5
    if n == 2:
        phi = 2.0 * np.pi * k / count
        return np.stack([np.cos(phi), np.sin(phi)], axis=1)
    z = 1.0 - 2.0 * k / count
    phi = np.pi * (3.0 - np.sqrt(5.0)) * np.arange(count)
    s = np.sqrt(1.0 - z * z)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)


def _k1_integral(K: CurvatureField, h: float = settings.REDUCED_RADIAL_STEP, t_max: float = 4.5) -> float:
    """int <K'(x), x> dx by exp-sinh in r times the panel angular rule."""
    n = K.n
    steps = int(round(t_max / h))
    t = h * np.arange(-steps, steps + 1)
    r = np.exp(0.5 * np.pi * np.sinh(t))
    wr = h * 0.5 * np.pi * np.cosh(t) * r ** (n + 1)
    dirs, aw = angular_rule(n)
    pts = r[:, None, None] * dirs[None, :, :]
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        inner = np.sum(K.grad(pts) * dirs[None, :, :], axis=-1)
        return float(wr @ (inner @ aw))


def check_K1(K: CurvatureField) -> Verdict:
    """
    (K1): K bounded, <K'(x), x> < 0 for |x| >= eta and int <K'(x), x> dx < 0.

    Shells |x| = eta 2^k (k <= K1_MAX_SHELLS) are probed; probes where both
    K'(x) underflows to zero and K(x) equals its tail value are skipped. The
    integral must converge absolutely: shell averages of <K'(x), x> have to
    decay faster than |x|^{-n}.
    """
    n = K.n
    dirs = _shell_directions(n)
    radii = K.eta * 2.0 ** np.arange(settings.K1_MAX_SHELLS + 1)
    pts = radii[:, None, None] * dirs[None, :, :]
    evidence: Dict[str, Any] = {"eta": K.eta, "shells": int(radii.size), "probes_per_shell": int(dirs.shape[0])}

    with np.errstate(over="ignore", invalid="ignore"):
        vals = K.eval(pts)
        center = float(K.eval(np.zeros(n)))
        grads = K.grad(pts)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(grads)) and np.isfinite(center)):
        evidence["bounded"] = False
        return Verdict(FAIL, "K is not finite on the probe shells (unbounded)", evidence)
    sup = max(abs(center), float(np.max(np.abs(vals))))
    evidence["sup_abs_K"] = sup
    inner_scale = max(1.0, abs(center), float(np.max(np.abs(vals[0]))))
    if (K.bound is not None and sup > K.bound * (1.0 + 1e-9) + 1e-12) or float(
        np.max(np.abs(vals[-1]))
    ) > 1e3 * inner_scale:
        evidence["bounded"] = False
        return Verdict(FAIL, f"K is unbounded on the probe shells (sup |K| = {sup:.3e})", evidence)
    evidence["bounded"] = True
    if sup == 0.0 and not np.any(grads):
        evidence["degenerate"] = True
        return Verdict(FAIL, "degenerate input: K ≡ 0", evidence)

    inner = np.sum(grads * pts, axis=-1)
    zero_grad = ~np.any(grads, axis=-1)
    underflow = zero_grad & (np.isclose(vals, K.tail_value, rtol=0.0, atol=0.0) if K.tail_value is not None else True)
    checked = ~underflow
    evidence["probes_checked"] = int(np.count_nonzero(checked))
    bad = checked & (inner >= 0.0)
    if np.any(bad):
        s, p = np.argwhere(bad)[0]
        return Verdict(
            FAIL,
            f"<K′(x), x> = {inner[s, p]:.3e} >= 0 at |x| = {radii[s]:g}",
            evidence,
        )

    averages = [
        (r, float(np.mean(inner[k][checked[k]]))) for k, r in enumerate(radii) if np.any(checked[k])
    ]
    tail = [(r, a) for r, a in averages if a < 0.0][-4:]
    if len(tail) >= 3:
        slope = float(np.polyfit(np.log([r for r, _ in tail]), np.log([-a for _, a in tail]), 1)[0])
        evidence["shell_decay_slope"] = slope
        if slope >= -n - settings.K1_SLOPE_MARGIN:
            return Verdict(
                FAIL,
                f"∫<K′(x), x>dx diverges: shell averages decay like |x|^{slope:.2f}, need < -{n}",
                evidence,
            )

    integral = _k1_integral(K)
    evidence["integral"] = integral
    if not np.isfinite(integral):
        return Verdict(NOT_APPLICABLE, "∫<K′(x), x>dx did not converge numerically", evidence)
    if integral >= 0.0 or abs(integral) <= 1e-14 * max(1.0, sup):
        return Verdict(FAIL, f"∫<K′(x), x>dx = {integral:.6g}, not < 0", evidence)
    return Verdict(PASS, f"∫<K′(x), x>dx = {integral:.6g}", evidence)


def check_K2(
    K: CurvatureField, search_box=None, seeds: Optional[Sequence] = None
) -> Tuple[Verdict, CritSearch]:
    """
    (K2): finitely many critical points, all inside B_eta.

    Returns:
        (verdict, critical-point search)
    """
    n = K.n
    if search_box is None:
        R = 2.0 * K.eta
        search_box = [[-R, R]] * n
    search = crit_points(gradient_map(K), search_box, seeds=list(K.seeds) + list(seeds or []))
    evidence = {
        "count": len(search.zeros),
        "box": np.asarray(search_box, dtype=float).tolist(),
        "diagnostics": len(search.diagnostics),
        "flat": len(search.flat),
    }
    inside = [x for x in search.non_isolated if np.linalg.norm(x) <= K.eta * (1.0 + 1e-9)]
    if inside:
        where = np.round(inside[0], 6).tolist()
        return Verdict(FAIL, f"critical set is not isolated near {where}", evidence), search
    outside = [c for c in search.zeros if np.linalg.norm(c.x) > K.eta * (1.0 + 1e-9)]
    if outside:
        where = np.round(outside[0].x, 6).tolist()
        return Verdict(FAIL, f"critical point {where} lies outside B_η", evidence), search
    if not search.zeros:
        return Verdict(FAIL, "no critical points found", evidence), search
    return Verdict(PASS, f"{len(search.zeros)} critical point(s) in B_η", evidence), search


def fit_beta(K: CurvatureField, xi, fit_range: Tuple[float, float] = settings.BETA_FIT_RANGE) -> Tuple[float, float]:
    """
    Log-log fit of the angular mean of |K(xi + r e) - K(xi)| over r in fit_range.

    Returns:
        (beta, R^2); (nan, 0) when the increments vanish
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    dirs, aw = angular_rule(K.n)
    radii = np.geomspace(fit_range[0], fit_range[1], 13)
    kxi = float(K.eval(xi))
    means = np.array(
        [float(aw @ np.abs(K.eval(xi + r * dirs) - kxi)) / float(np.sum(aw)) for r in radii]
    )
    if np.any(means <= 0.0):
        return float("nan"), 0.0
    x, y = np.log(radii), np.log(means)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / total if total > 0 else 0.0
    return float(slope), r2


def estimate_beta_A(K: CurvatureField, xi, rf: ReducedFunctional, use_hessian: bool = True, use_k6: bool = True) -> CritEntry:
    """
    Leading exponent beta and coefficient A_xi at a critical point.

    Routes, in order: analytic nondegenerate Hessian (beta = 2 with
    A = c1 Delta K for n = 3, the log-corrected coefficient for n = 2, and
    beta = 1 with the first-order coefficient for n = 1); coordinate-wise
    expansion data; a log-log fit followed by A of the sampled homogeneous model.
    """
    from ..utils.exceptions import DomainError, QGammaError

    n = K.n
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    entry = CritEntry(xi=xi, deg_loc=0)
    if K.smooth_hessian:
        lap = float(K.laplacian(xi))
        entry.laplacian = lap if np.isfinite(lap) else None

    if use_hessian and K.smooth_hessian and K.hessian_func is not None:
        H = K.hessian(xi)
        eig = np.linalg.eigvalsh(0.5 * (H + H.T))
        if np.min(np.abs(eig)) > 1e-8 * max(1.0, float(np.max(np.abs(eig)))):
            try:
                if n >= 3:
                    entry.beta, entry.A, entry.route = 2.0, c1(rf.params) * entry.laplacian, "hessian"
                elif n == 2:
                    entry.beta, entry.A, entry.route = 2.0, a_xi_log_corrected(rf, xi), "hessian-log"
                else:
                    entry.beta, entry.A, entry.route = 1.0, a_xi_first_order(rf, xi), "first-order"
            except QGammaError as e:
                entry.detail = e.message
                return entry
            entry.verified = entry.A != 0.0
            if not entry.verified:
                entry.detail = "A_ξ = 0"
            return entry

    if use_k6 and K.k6 is not None:
        a = np.asarray(K.k6.coefficients(xi), dtype=float)
        beta = float(K.k6.beta)
        entry.a_tilde = float(np.sum(a))
        model = HomogeneousModel(beta, lambda y: np.sum(a * np.abs(y) ** beta, axis=-1))
        entry.beta, entry.route = beta, "k6"
        try:
            entry.A = a_xi(model, rf.params)
        except DomainError as e:
            entry.detail = e.message
            return entry
        entry.verified = entry.A != 0.0
        return entry

    beta, r2 = fit_beta(K, xi)
    entry.beta, entry.route = beta, "fit"
    if not np.isfinite(beta) or r2 < settings.BETA_FIT_R2:
        entry.detail = f"(K3) not verified: log-log fit quality R² = {r2:.6f}"
        return entry
    rs = settings.HOMOGENEOUS_SAMPLE_RADIUS
    kxi = float(K.eval(xi))

    def Q(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        norm = np.linalg.norm(y, axis=-1)
        safe = np.where(norm > 0, norm, 1.0)
        inc = (K.eval(xi + rs * y / safe[..., None]) - kxi) / rs**beta
        return np.where(norm > 0, norm**beta * inc, 0.0)

    try:
        entry.A = a_xi(HomogeneousModel(beta, Q), rf.params)
    except DomainError as e:
        entry.detail = e.message
        return entry
    entry.verified = entry.A != 0.0
    return entry


def _signed_sum(entries: List[CritEntry], key) -> int:
    return int(sum(e.deg_loc for e in entries if key(e)))


def check_K3(entries: List[CritEntry], n: int) -> Verdict:
    """(K3): every critical point has beta in (1, n) and A_xi != 0."""
    if not entries:
        return Verdict(UNKNOWN, "no critical points")
    unverified = [e for e in entries if not e.verified]
    if unverified:
        return Verdict(UNKNOWN, f"A_ξ not verified at {len(unverified)} point(s): {unverified[0].detail}")
    outside = [e for e in entries if not (1.0 < e.beta < n)]
    if outside:
        routes = sorted({e.route for e in outside})
        return Verdict(
            NOT_APPLICABLE,
            f"β = {outside[0].beta:g} outside (1, {n}); signs of A_ξ from the {', '.join(routes)} expansion",
            {"extended": True},
        )
    return Verdict(PASS, f"β ∈ (1, {n}) and A_ξ ≠ 0 at all {len(entries)} point(s)")


def check_K4(entries: List[CritEntry], n: int) -> Verdict:
    """(K4): sum over A_xi < 0 of deg_loc(K', xi) != (-1)^n."""
    if not entries or any(not e.verified for e in entries):
        return Verdict(UNKNOWN, "A_ξ or local degree not certified")
    total = _signed_sum(entries, lambda e: e.A < 0)
    target = (-1) ** n
    status = PASS if total != target else FAIL
    return Verdict(status, f"Σ_(A<0) deg_loc = {total} vs (-1)^n = {target}", {"sum": total, "target": target})


def check_K5(entries: List[CritEntry], n: int) -> Verdict:
    """(K5): Delta K != 0 at every critical point and sum over Delta K < 0 of deg_loc != (-1)^n."""
    if not entries:
        return Verdict(UNKNOWN, "no critical points")
    if any(e.laplacian is None for e in entries):
        return Verdict(NOT_APPLICABLE, "K is not C² at a critical point")
    if any(e.laplacian == 0.0 for e in entries):
        return Verdict(FAIL, "ΔK(ξ) = 0 at a critical point")
    total = _signed_sum(entries, lambda e: e.laplacian < 0)
    target = (-1) ** n
    status = PASS if total != target else FAIL
    return Verdict(status, f"Σ_(ΔK<0) deg_loc = {total} vs (-1)^n = {target}", {"sum": total, "target": target})


def check_K6(K: CurvatureField, entries: List[CritEntry], n: int) -> Verdict:
    """(K6): coordinate-wise expansion with sum a_j != 0 and sum over that sign < 0 of deg_loc != (-1)^n."""
    if K.k6 is None:
        return Verdict(NOT_APPLICABLE, "no coefficient data a_j supplied")
    if not entries:
        return Verdict(UNKNOWN, "no critical points")
    beta = float(K.k6.beta)
    if not 1.0 < beta < n:
        return Verdict(FAIL, f"β = {beta:g} outside (1, {n})")
    tildes = [float(np.sum(K.k6.coefficients(e.xi))) for e in entries]
    if any(t == 0.0 for t in tildes):
        return Verdict(FAIL, "Σ a_j(ξ) = 0 at a critical point")
    total = int(sum(e.deg_loc for e, t in zip(entries, tildes) if t < 0))
    target = (-1) ** n
    status = PASS if total != target else FAIL
    return Verdict(status, f"Σ_(Ã<0) deg_loc = {total} vs (-1)^n = {target}", {"sum": total, "target": target})


def crit_equivalence(rf: ReducedFunctional, entries: List[CritEntry]) -> Dict[str, Any]:
    """|Gamma'(0, xi)| at every critical point of K."""
    values = [float(np.linalg.norm(rf.gradient(0.0, e.xi))) for e in entries]
    worst = max(values) if values else 0.0
    return {"max_gamma_prime": worst, "passed": bool(worst <= 1e-8)}


def _safe_degree(m: MapUnderTest, box, **kwargs) -> Tuple[Optional[DegreeResult], str]:
    from ..utils.exceptions import QGammaError

    try:
        return brouwer_degree(m, box, **kwargs), ""
    except QGammaError as e:
        return None, str(e)


def global_bookkeeping(
    K: CurvatureField,
    entries: List[CritEntry],
    rf: Optional[ReducedFunctional],
    R_gamma: Optional[float],
    threads: int = settings.THREADS,
) -> Dict[str, Any]:
    """
    Degree identities: deg(K', B_R) = (-1)^n, sum of local degrees = (-1)^n,
    and deg(Gamma', [-R, R]^{n+1}) = (-1)^{n+1} for n >= 2.
    """
    n = K.n
    target = (-1) ** n
    R_K = 2.0 * K.eta
    out: Dict[str, Any] = {"target": target}
    res, err = _safe_degree(gradient_map(K), [[-R_K, R_K]] * n)
    out["deg_K"] = {"value": res.degree if res else None, "expected": target, "error": err}
    total = int(sum(e.deg_loc for e in entries))
    out["sum_local"] = {"value": total, "expected": target}
    if all(e.verified for e in entries) and entries:
        out["sum_by_sign"] = {
            "positive": _signed_sum(entries, lambda e: e.A > 0),
            "negative": _signed_sum(entries, lambda e: e.A < 0),
        }
    if n >= 2 and rf is not None and R_gamma is not None:
        res, err = _safe_degree(gamma_map(rf, threads), [[-R_gamma, R_gamma]] * (n + 1))
        out["deg_gamma"] = {"value": res.degree if res else None, "expected": -target, "error": err}
    else:
        out["deg_gamma"] = {
            "value": None,
            "expected": -target,
            "error": "Γ′ is not continuous across μ = 0 for n = 1" if n == 1 else "no repulsion radius",
        }
    out["consistent"] = bool(
        out["deg_K"]["value"] == target
        and total == target
        and out["deg_gamma"]["value"] in (None, -target)
    )
    return out


@dataclass
class ConditionReport:
    """Aggregated applicability report."""

    name: str
    n: int
    gamma: float
    k1: Verdict
    k2: Verdict
    k3: Verdict
    k4: Verdict
    k5: Verdict
    k6: Verdict
    crit_set: List[CritEntry] = field(default_factory=list)
    omega: Dict[str, Any] = field(default_factory=dict)
    bookkeeping: Dict[str, Any] = field(default_factory=dict)
    crit_equivalence: Dict[str, Any] = field(default_factory=dict)
    theta_plus: List[np.ndarray] = field(default_factory=list)
    verdict: str = UNKNOWN
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "gamma": self.gamma,
            "k1": self.k1.to_dict(),
            "k2": self.k2.to_dict(),
            "k3": self.k3.to_dict(),
            "k4": self.k4.to_dict(),
            "k5": self.k5.to_dict(),
            "k6": self.k6.to_dict(),
            "crit_set": [c.to_dict() for c in self.crit_set],
            "omega": self.omega,
            "bookkeeping": self.bookkeeping,
            "crit_equivalence": self.crit_equivalence,
            "theta_plus": [q.tolist() for q in self.theta_plus],
            "verdict": self.verdict,
            "reason": self.reason,
        }


def repulsion_radius(rf: ReducedFunctional, eta: float, seed: int) -> Tuple[Optional[float], List[Dict[str, Any]]]:
    tried = []
    for R in (2.0 * eta, 4.0 * eta, 8.0 * eta):
        rep = boundary_repulsion(rf, R, seed=seed)
        tried.append(rep)
        if rep["passed"]:
            return R, tried
    return None, tried


def _omega_degree(
    rf: ReducedFunctional, R: float, entries: List[CritEntry], threads: int, mu_min: float
) -> Dict[str, Any]:
    """deg(Gamma', Omega) on [mu_min, R] x [-R, R]^n, halving mu_min on boundary zeros."""
    n = rf.n
    m = gamma_map(rf, threads)
    omega: Dict[str, Any] = {"R": R}
    result = None
    err = ""
    for _ in range(4):
        box = [[mu_min, R]] + [[-R, R]] * n
        result, err = _safe_degree(m, box)
        if result is not None:
            break
        mu_min *= 0.5
    omega.update({"mu_min": mu_min, "box": [[mu_min, R]] + [[-R, R]] * n})
    omega["degree"] = result.degree if result else None
    omega["certified"] = bool(result and result.certified)
    omega["error"] = err

    seeds = [np.concatenate([[mu], e.xi]) for e in entries for mu in (0.25 * R, 0.5 * R)]
    search = crit_points(m, omega["box"], seeds=seeds, grid=3)
    omega["theta_plus"] = [z.x for z in search.zeros]
    omega["theta_plus_degree_sum"] = int(sum(z.deg_loc for z in search.zeros))
    return omega


def theorem_applicability(
    K: CurvatureField,
    params: ProblemParams,
    seed: int = 0,
    threads: int = settings.THREADS,
    mu_min: float = settings.OMEGA_MU_MIN,
) -> ConditionReport:
    """
    Run every checker and decide whether the existence theorem applies.

    The verdict is "applicable" only when (K1) and (K2) pass, one of
    (K4)/(K5)/(K6) passes and deg(Gamma', Omega) is certified and nonzero;
    "unknown" when a needed quantity could not be certified.
    """
    from ..utils.exceptions import QGammaError

    n = params.n
    k1 = check_K1(K)
    k2, search = check_K2(K)
    entries = [CritEntry(xi=z.x, deg_loc=z.deg_loc) for z in search.zeros]

    reducible = k1.evidence.get("bounded", True) and not k1.evidence.get("degenerate", False)
    rf = None
    if reducible:
        try:
            rf = ReducedFunctional(K, params, strict=K.smooth_hessian)
        except QGammaError as e:
            logger.warning(f"⚠️ WARN: reduced functional unavailable: {e}")

    if rf is not None:
        resolved = []
        for e in entries:
            est = estimate_beta_A(K, e.xi, rf)
            est.deg_loc = e.deg_loc
            resolved.append(est)
        entries = resolved
    else:
        for e in entries:
            if K.smooth_hessian:
                lap = float(K.laplacian(e.xi))
                e.laplacian = lap if np.isfinite(lap) else None
            e.detail = "reduced functional unavailable"

    k3 = check_K3(entries, n) if rf is not None else Verdict(UNKNOWN, "reduced functional unavailable")
    k4 = check_K4(entries, n)
    k5 = check_K5(entries, n)
    k6 = check_K6(K, entries, n)

    report = ConditionReport(K.name, n, params.gamma, k1, k2, k3, k4, k5, k6, crit_set=entries)

    R_gamma = None
    if rf is not None:
        report.crit_equivalence = crit_equivalence(rf, entries)
        R_gamma, tried = repulsion_radius(rf, K.eta, seed)
        report.omega["repulsion"] = tried
    report.bookkeeping = global_bookkeeping(K, entries, rf, R_gamma, threads)

    predicted = None
    if entries and all(e.verified for e in entries):
        predicted = _signed_sum(entries, lambda e: e.A < 0) - (-1) ** n
    report.omega["predicted"] = predicted

    failures = [f"({k.upper()}) {v.detail}" for k, v in (("k1", k1), ("k2", k2)) if v.status == FAIL]
    degree_conditions = (k4, k5, k6)
    if failures or not (k1.passed and k2.passed):
        report.verdict = NOT_APPLICABLE
        sums = [f"({name}) {v.detail}" for name, v in zip(("K4", "K5", "K6"), degree_conditions) if v.status == FAIL]
        report.reason = "; ".join(failures + sums) or "(K1)/(K2) not verified"
        return report
    if not any(v.passed for v in degree_conditions):
        failed = [f"({name}) {v.detail}" for name, v in zip(("K4", "K5", "K6"), degree_conditions) if v.status == FAIL]
        if failed:
            report.verdict = NOT_APPLICABLE
            report.reason = "; ".join(failed)
        else:
            report.verdict = UNKNOWN
            report.reason = "no degree condition could be certified"
        return report
    if rf is None or R_gamma is None:
        report.verdict = UNKNOWN
        report.reason = "no radius with <Γ′(q), q> < 0 on the boundary"
        return report

    omega = _omega_degree(rf, R_gamma, entries, threads, mu_min)
    report.theta_plus = omega.pop("theta_plus")
    report.omega.update(omega)
    degree = omega["degree"]
    if degree is None or not omega["certified"]:
        report.verdict = UNKNOWN
        report.reason = f"deg(Γ′, Ω) not certified: {omega['error']}"
    elif degree == 0:
        report.verdict = UNKNOWN
        report.reason = "deg(Γ′, Ω) = 0"
    else:
        report.verdict = "applicable"
        report.reason = f"deg(Γ′, Ω) = {degree} ≠ 0"
    logger.info(f"✅ Applicability for K = {K.name}: {report.verdict} ({report.reason})")
    return report


__all__ = [
    "ConditionReport",
    "CritEntry",
    "Verdict",
    "check_K1",
    "check_K2",
    "check_K3",
    "check_K4",
    "check_K5",
    "check_K6",
    "crit_equivalence",
    "estimate_beta_A",
    "fit_beta",
    "gamma_map",
    "global_bookkeeping",
    "gradient_map",
    "repulsion_radius",
    "theorem_applicability",
]
