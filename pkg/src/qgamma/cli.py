"""
Command-line front door for qgamma.

Every command validates its full run configuration before computing,
writes summary.json, report.txt and per-command CSV tables into the output
directory, and exits with 0 (success), 2 (hypotheses not satisfied) or
1 (computational error).
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .config import RunConfig, build_run_config, load_run_config, settings
from .utils import logger, set_level
from .utils.output_formatter import (
    export_csv,
    export_summary_json,
    export_summary_toon,
    format_condition_report,
    read_csv,
    write_report_text,
)
from .utils.rich_help import RichHelpFormatter, print_main_help

EXIT_OK, EXIT_ERROR, EXIT_UNMET = 0, 1, 2
DEFAULT_EPSILONS: List[float] = [0.005, 0.01, 0.02, 0.04]
SWEEP_HEADER: List[str] = [
    "epsilon",
    "status",
    "residual_L2",
    "newton_iters",
    "mu",
    "distance_to_Z",
    "positivity_margin",
    "error",
]


@dataclass
class CommandOutcome:
    """What a command hands back to run() for writing."""

    results: Dict[str, Any]
    lines: List[str]
    exit_code: int = EXIT_OK
    tables: Dict[str, Tuple[List[str], List[List[Any]]]] = field(default_factory=dict)
    verdict: Optional[str] = None


def _problem(cfg: RunConfig):
    from .conditions import field_from_spec
    from .geometry import make_params

    params = make_params(cfg.n, cfg.gamma)
    return params, field_from_spec(cfg.K, params.n)


def check_k_command(cfg: RunConfig) -> CommandOutcome:
    """(K1)-(K6) and the applicability verdict."""
    from .conditions import theorem_applicability

    params, K = _problem(cfg)
    report = theorem_applicability(
        K, params, seed=cfg.seed, threads=cfg.threads, mu_min=cfg.numeric("mu_min", settings.OMEGA_MU_MIN)
    )
    data = report.to_dict()
    lines = format_condition_report(data)
    rows = [
        [*c.xi.tolist(), c.deg_loc, c.beta, c.A, c.route, c.verified, c.laplacian]
        for c in report.crit_set
    ]
    header = [f"xi_{i + 1}" for i in range(params.n)] + ["deg_loc", "beta", "A", "route", "verified", "laplacian"]
    code = EXIT_OK if report.verdict == "applicable" else EXIT_UNMET
    return CommandOutcome(data, lines, code, {"crit_points.csv": (header, rows)}, report.verdict)


def landscape_command(cfg: RunConfig) -> CommandOutcome:
    """Grid scan of Gamma over a box in (mu, xi)."""
    from .reduced import ReducedFunctional, landscape_scan

    params, K = _problem(cfg)
    rf = ReducedFunctional(K, params, strict=K.smooth_hessian)
    R = 2.0 * K.eta
    box = cfg.numeric("box") or [[0.0, R]] + [[-R, R]] * params.n
    resolution = cfg.numeric("resolution", 21)
    table = landscape_scan(rf, box, resolution, threads=cfg.threads)
    minima = table.interior_minima()
    results = {
        "box": box,
        "resolution": resolution,
        "gamma_min": float(np.min(table.rows[:, -2])),
        "gamma_max": float(np.max(table.rows[:, -2])),
        "interior_minima": minima,
        "c0": rf.c0,
    }
    lines = [
        f"Landscape of Γ for K = {K.name} on {box} ({resolution} points per axis)",
        f"  Γ range: [{results['gamma_min']:.6e}, {results['gamma_max']:.6e}]",
        f"  Interior grid minima: {len(minima)}",
    ]
    return CommandOutcome(results, lines, tables={"landscape.csv": (table.header, table.rows.tolist())})


def degree_command(cfg: RunConfig) -> CommandOutcome:
    """Degrees of K' and Gamma' with the global bookkeeping identities."""
    from .conditions import CritEntry, check_K2, global_bookkeeping, repulsion_radius
    from .reduced import ReducedFunctional

    params, K = _problem(cfg)
    k2, search = check_K2(K)
    entries = [CritEntry(xi=z.x, deg_loc=z.deg_loc) for z in search.zeros]
    rf = ReducedFunctional(K, params, strict=K.smooth_hessian)
    R_gamma = cfg.numeric("omega_radius")
    repulsion: List[Dict[str, Any]] = []
    if R_gamma is None:
        R_gamma, repulsion = repulsion_radius(rf, K.eta, cfg.seed)
    book = global_bookkeeping(K, entries, rf, R_gamma, cfg.threads)
    results = {
        "k2": k2.to_dict(),
        "crit_set": [e.to_dict() for e in entries],
        "bookkeeping": book,
        "repulsion": repulsion,
        "R_gamma": R_gamma,
        "diagnostics": search.diagnostics,
    }
    lines = [f"Degrees for K = {K.name} (n={params.n})"]
    for e in entries:
        lines.append(f"  ξ = {np.round(e.xi, 8).tolist()}  deg_loc = {e.deg_loc}")
    lines.append(f"  deg(K′, B_R) = {book['deg_K']['value']} (expected {book['deg_K']['expected']})")
    lines.append(f"  Σ deg_loc = {book['sum_local']['value']}")
    lines.append(f"  deg(Γ′, [-R, R]^(n+1)) = {book['deg_gamma']['value']} (expected {book['deg_gamma']['expected']})")
    code = EXIT_OK
    if not book["consistent"]:
        logger.error("Degree bookkeeping identities do not hold")
        lines.append("  ERROR degree bookkeeping identities do not hold")
        code = EXIT_ERROR
    rows = [[*e.xi.tolist(), e.deg_loc] for e in entries]
    header = [f"xi_{i + 1}" for i in range(params.n)] + ["deg_loc"]
    return CommandOutcome(results, lines, code, {"crit_points.csv": (header, rows)})


def verify_bubble_command(cfg: RunConfig) -> CommandOutcome:
    """Bubble identity, constants, nondegeneracy and the sphere-constant anchor."""
    from .bubbles import Bubble, bubble_constant, bubble_pde_residual, bubble_ratio, kernel_check, linearized_operator
    from .geometry import bubble_constant_closed_form, make_params
    from .solver import sphere_constant_check

    params = make_params(cfg.n, cfg.gamma)
    radii, ratio = bubble_ratio(params)
    lam, alpha = bubble_constant(params)
    closed = bubble_constant_closed_form(params)
    residual = bubble_pde_residual(params)
    spread = float(np.std(ratio) / abs(np.mean(ratio)))
    results: Dict[str, Any] = {
        "Lambda": lam,
        "alpha": alpha,
        "Lambda_closed_form": closed,
        "relative_difference": abs(lam - closed) / closed,
        "ratio_spread": spread,
        "pde_residual": residual,
    }
    lines = [
        f"Bubble n={params.n} γ={params.gamma}: Λ = {lam:.12g}, α = {alpha:.12g}",
        f"  closed form Λ = {closed:.12g} (relative difference {results['relative_difference']:.2e})",
        f"  ratio spread = {spread:.2e}",
        f"  PDE residual = {residual:.2e}",
    ]
    ok = residual <= 1e-6 and results["relative_difference"] <= 1e-6
    if params.n <= 2:
        kernel = kernel_check(linearized_operator(Bubble.standard(params), cfg.numeric("L"), cfg.threads))
        anchor = sphere_constant_check(params)
        results["kernel"] = kernel.to_dict()
        results["sphere_constant"] = anchor.to_dict()
        lines.append(
            f"  kernel dim = {kernel.dim} (expected {kernel.expected_dim}), "
            f"max angle = {max(kernel.angles) if kernel.angles else float('nan'):.2e}, negatives = {kernel.negatives}"
        )
        lines.append(f"  sphere constant: |v - 1| = {anchor.deviation:.2e}, Λ = 2^(2γ)λ₀ = {anchor.implied_Lambda:.12g}")
        ok = ok and kernel.passed
    for line in lines:
        logger.info(line)
    table = {"bubble_ratio.csv": (["r", "ratio"], np.column_stack([radii, ratio]).tolist())}
    return CommandOutcome(results, lines, EXIT_OK if ok else EXIT_ERROR, table)


def _seed_bubble(cfg: RunConfig, params, K) -> Tuple[Any, Dict[str, Any]]:
    """User-supplied seed bubble, or the first zero of Gamma' in Omega."""
    from .bubbles import Bubble
    from .conditions import theorem_applicability
    from .utils.exceptions import ValidationError

    seed = cfg.numeric("seed_bubble")
    if seed is not None:
        b = Bubble(seed.get("mu", 1.0), seed.get("xi", [0.0] * params.n), params)
        return b, {"source": "config", **b.describe()}
    report = theorem_applicability(K, params, seed=cfg.seed, threads=cfg.threads)
    if not report.theta_plus:
        raise ValidationError(
            f"No zero of Γ′ with μ > 0 was found ({report.verdict}: {report.reason}); "
            "supply numerics.seed_bubble",
            "numerics.seed_bubble",
            "{mu, xi}",
        )
    q = report.theta_plus[0]
    b = Bubble(float(q[0]), q[1:], params)
    return b, {"source": "theta_plus", "verdict": report.verdict, **b.describe()}


def solve_command(cfg: RunConfig) -> CommandOutcome:
    """Newton-Galerkin solve at one epsilon."""
    from .bubbles import lift_bubble
    from .geometry import get_basis
    from .solver import riesz_residual, solve_newton

    params, K = _problem(cfg)
    epsilon = cfg.numeric("epsilon", 0.02)
    bubble, seed_info = _seed_bubble(cfg, params, K)
    basis = get_basis(params.n, cfg.numeric("L") or settings.DEFAULT_L[params.n])
    record = solve_newton(
        lift_bubble(bubble, basis), epsilon, K, params, tol=cfg.numeric("tol"), seed_bubble=bubble, threads=cfg.threads
    )
    riesz = riesz_residual(record.field, epsilon, K, params)
    results = {"seed": seed_info, "record": record.to_dict(), "riesz": riesz.to_dict()}
    lines = [
        f"Solve for K = {K.name}, ε = {epsilon:g} (n={params.n}, γ={params.gamma}, L={basis.L})",
        f"  Newton steps = {record.newton_iters}, ||F|| = {record.residual_L2:.3e}, fine-grid ||F|| = {record.fine_residual:.3e}",
        f"  nearest bubble μ = {record.nearest_bubble.mu:.8g}, ξ = {np.round(record.nearest_bubble.xi, 8).tolist()}",
        f"  dist(u, Z) = {record.distance_to_Z:.3e}, min v = {record.positivity_margin:.3e}",
        f"  decay slope = {record.decay_slope:.4f} (expected {-2.0 * params.s:.4f})",
        f"  Riesz residual = {riesz.value:.3e}" + ("" if riesz.available else " (unavailable)"),
    ]
    for line in lines:
        logger.info(line)
    header, rows = record.field_rows(params)
    return CommandOutcome(results, lines, tables={"solution.csv": (header, rows)})


def sweep_command(cfg: RunConfig) -> CommandOutcome:
    """Continuation in epsilon with the fitted distance rate."""
    from .solver import continuation_sweep

    params, K = _problem(cfg)
    eps_list = cfg.epsilons or DEFAULT_EPSILONS
    bubble, seed_info = _seed_bubble(cfg, params, K)
    sweep = continuation_sweep(
        K,
        params,
        eps_list,
        bubble,
        L=cfg.numeric("L"),
        warm_start=cfg.numeric("warm_start", True),
        threads=cfg.threads,
        tol=cfg.numeric("tol"),
    )
    rows = [[r.get(h, "") for h in SWEEP_HEADER] for r in sweep.rows]
    results = {"seed": seed_info, **sweep.to_dict()}
    lines = [f"ε sweep for K = {K.name} (n={params.n}, γ={params.gamma})"]
    for r in sweep.rows:
        if r["status"] == "ok":
            lines.append(f"  ε = {r['epsilon']:g}: dist(u, Z) = {r['distance_to_Z']:.3e} ({r['newton_iters']} steps)")
        else:
            lines.append(f"  ε = {r['epsilon']:g}: failed: {r['error']}")
    if sweep.slope is not None:
        lines.append(f"  fit: slope = {sweep.slope:.4f}, C = {sweep.C:.4e}")
    code = EXIT_OK if sweep.records else EXIT_ERROR
    return CommandOutcome(results, lines, code, {"sweep.csv": (SWEEP_HEADER, rows)})


REPORT_DIR = "report"


def report_command(cfg: RunConfig) -> CommandOutcome:
    """
    Merge sweep tables found under the output directory into one CSV.

    Each sweep contributes one row per epsilon plus a fit row; output goes
    to <output_dir>/report so repeated invocations see the same inputs.
    """
    from .solver import fit_sweep
    from .utils.exceptions import FileSystemError

    root = Path(cfg.output_dir)
    dirs = [root] + sorted(p for p in root.iterdir() if p.is_dir() and p.name != REPORT_DIR) if root.is_dir() else []
    summaries = [d / "summary.json" for d in dirs if (d / "summary.json").is_file()]
    sweeps = [d / "sweep.csv" for d in dirs if (d / "sweep.csv").is_file()]
    if not summaries and not sweeps:
        raise FileSystemError(
            f"No run artifacts under {root}: missing summary.json, sweep.csv", str(root), "read"
        )

    merged: List[List[Any]] = []
    fits: Dict[str, Any] = {}
    for path in sweeps:
        source = str(path.parent.relative_to(root)) or "."
        rows = read_csv(path)
        if not rows:
            logger.warning(f"⚠️ WARN: sweep table {path} is empty; no fit row")
            continue
        parsed = []
        for row in rows:
            merged.append([source] + [row.get(h, "") for h in SWEEP_HEADER] + ["", ""])
            if row.get("status") == "ok":
                parsed.append(
                    {"epsilon": float(row["epsilon"]), "status": "ok", "distance_to_Z": float(row["distance_to_Z"])}
                )
        slope, C, _ = fit_sweep(parsed)
        if slope is None:
            logger.warning(f"⚠️ WARN: sweep table {path} has fewer than two usable rows; no fit row")
            continue
        fits[source] = {"slope": slope, "C": C}
        merged.append([source, "fit"] + [""] * (len(SWEEP_HEADER) - 1) + [slope, C])

    lines = [f"Report for {root}"]
    for path in summaries:
        lines.append(f"  {path.relative_to(root)}")
    for source, fit in fits.items():
        lines.append(f"  sweep {source}: slope = {fit['slope']:.4f}, C = {fit['C']:.4e}")
    header = ["source"] + SWEEP_HEADER + ["slope", "C"]
    results = {
        "summaries": [str(p.relative_to(root)) for p in summaries],
        "sweeps": [str(p.relative_to(root)) for p in sweeps],
        "fits": fits,
    }
    return CommandOutcome(results, lines, tables={"sweep_merged.csv": (header, merged)})


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig], CommandOutcome]] = {
    "check-k": check_k_command,
    "landscape": landscape_command,
    "degree": degree_command,
    "verify-bubble": verify_bubble_command,
    "solve": solve_command,
    "sweep": sweep_command,
    "report": report_command,
}


def _status(code: int) -> str:
    return {EXIT_OK: "ok", EXIT_UNMET: "hypotheses-unmet"}.get(code, "error")


def _base_summary(cfg: RunConfig) -> Dict[str, Any]:
    summary: Dict[str, Any] = {"command": cfg.command, "seed": cfg.seed, "version": __version__}
    if cfg.command != "report":
        summary["params"] = {"n": cfg.n, "gamma": cfg.gamma}
        summary["K"] = cfg.K.describe()
    return summary


def run(cfg: RunConfig) -> int:
    """
    Execute one validated run and write its artifacts.

    Returns:
        Exit status: 0 success, 2 hypotheses not satisfied, 1 computational error
    """
    from .utils.exceptions import FileSystemError, QGammaError

    out = Path(cfg.output_dir)
    if cfg.command == "report":
        out = out / REPORT_DIR
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(str(FileSystemError(f"Cannot create output directory: {e}", str(out), "create")))
        return EXIT_ERROR

    summary = _base_summary(cfg)
    try:
        outcome = COMMAND_HANDLERS[cfg.command](cfg)
    except QGammaError as e:
        logger.error(f"{cfg.command} failed: {e}")
        lines = [f"ERROR {e}"]
        trace = getattr(e, "trace", None)
        if trace:
            lines += [f"  {step}" for step in trace]
        outcome = CommandOutcome({"error": str(e), "error_code": e.error_code}, lines, EXIT_ERROR)
    except Exception as e:
        logger.error(f"{cfg.command} failed with an unexpected error: {e}")
        outcome = CommandOutcome({"error": str(e), "error_code": type(e).__name__}, [f"ERROR {e}"], EXIT_ERROR)

    try:
        artifacts = ["report.txt", "summary.json"]
        for name, (header, rows) in sorted(outcome.tables.items()):
            export_csv(rows, header, out / name)
            artifacts.append(name)
        write_report_text(outcome.lines, out / "report.txt")
        if cfg.numeric("toon", False):
            export_summary_toon({**summary, "results": outcome.results}, out / "summary.toon")
            artifacts.append("summary.toon")
        summary.update(
            {
                "status": _status(outcome.exit_code),
                "exit_code": outcome.exit_code,
                "verdict": outcome.verdict,
                "results": outcome.results,
                "artifacts": sorted(artifacts),
            }
        )
        export_summary_json(summary, out / "summary.json")
    except QGammaError as e:
        logger.error(str(e))
        return EXIT_ERROR
    return outcome.exit_code


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    from .conditions import BUILTINS

    overrides: Dict[str, Any] = {
        "command": args.command,
        "n": args.n,
        "gamma": args.gamma,
        "seed": args.seed,
        "threads": args.threads,
        "output_dir": args.output_dir,
        "L": args.L,
        "tol": args.tol,
        "toon": True if args.toon else None,
    }
    if args.k is not None:
        overrides["K"] = {"builtin": args.k} if args.k in BUILTINS else {"expression": args.k}
    for key in ("box", "resolution", "mu_min", "omega_radius", "epsilon"):
        overrides[key] = getattr(args, key, None)
    if getattr(args, "box", None) is not None:
        flat = args.box
        overrides["box"] = [flat[i : i + 2] for i in range(0, len(flat), 2)]
    if getattr(args, "mu", None) is not None:
        overrides["seed_bubble"] = {"mu": args.mu, **({"xi": args.xi} if args.xi else {})}
    if getattr(args, "cold", False):
        overrides["warm_start"] = False
    if getattr(args, "eps", None):
        overrides["epsilons"] = sorted(args.eps)
    return overrides


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output-dir", "-o", help=f"Artifact directory (default: {settings.OUTPUT_DIR})")
    common.add_argument("--seed", type=int, help="Seed for randomized probing (default: 0)")
    common.add_argument("--threads", type=int, help=f"Worker threads (default: {settings.THREADS})")
    common.add_argument("--n", type=int, help="Dimension n")
    common.add_argument("--gamma", type=float, help="Order γ in (0, n/2)")
    common.add_argument("--k", help="Built-in K name or K expression")
    common.add_argument("--L", type=int, help="Sphere truncation degree")
    common.add_argument("--tol", type=float, help="Newton residual tolerance")
    common.add_argument("--toon", action="store_true", help="Also export summary.toon")
    common.add_argument("--log-level", help="Logging level (default: QGAMMA_LOG_LEVEL or INFO)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="qgamma",
        description="Perturbative solutions of the fractional Q_γ curvature problem",
        add_help=False,
        epilog="For detailed help on a command: %(prog)s <command> --help",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-h", "--help", action="store_true", help="Show this help message")
    sub = parser.add_subparsers(title="commands", dest="command")

    def add(name: str, help_text: str, epilog: str) -> argparse.ArgumentParser:
        return sub.add_parser(
            name,
            help=help_text,
            description=help_text,
            epilog=f"Examples:\n{epilog}",
            parents=[common],
            formatter_class=RichHelpFormatter,
        )

    p = add("check-k", "Verify (K1)-(K6) and the applicability verdict", "  qgamma check-k --n 2 --gamma 0.5 --k two-bump")
    p.add_argument("--mu-min", dest="mu_min", type=float, help="Lower μ edge of Ω")

    p = add("landscape", "Grid scan of the reduced functional", "  qgamma landscape --n 1 --gamma 0.25 --k two-bump --resolution 41")
    p.add_argument("--box", type=float, nargs="+", help="lo hi pairs, μ first")
    p.add_argument("--resolution", type=int, help="Grid points per axis (default: 21)")

    p = add("degree", "Brouwer degrees of K′ and Γ′", "  qgamma degree --n 2 --gamma 0.5 --k gaussian")
    p.add_argument("--omega-radius", dest="omega_radius", type=float, help="Box half-width for deg(Γ′)")

    add("verify-bubble", "Bubble identity, constants and nondegeneracy", "  qgamma verify-bubble --n 3 --gamma 0.5")

    p = add("solve", "Newton-Galerkin solve at one ε", "  qgamma solve --n 1 --gamma 0.25 --k two-bump --epsilon 0.02")
    p.add_argument("--epsilon", type=float, help="Perturbation size (default: 0.02)")
    p.add_argument("--mu", type=float, help="Seed bubble scale")
    p.add_argument("--xi", type=float, nargs="+", help="Seed bubble center")

    p = add("sweep", "ε continuation with fitted rate", "  qgamma sweep --n 1 --gamma 0.25 --k two-bump --eps 0.005 0.01 0.02 0.04")
    p.add_argument("--eps", type=float, nargs="+", help="ε values")
    p.add_argument("--cold", action="store_true", help="Seed every ε with the bubble (parallel)")
    p.add_argument("--mu", type=float, help="Seed bubble scale")
    p.add_argument("--xi", type=float, nargs="+", help="Seed bubble center")

    add("report", "Merge run artifacts into one bundle", "  qgamma report --output-dir qgamma-out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Console entry point."""
    from .utils.exceptions import QGammaError

    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or (len(argv) == 1 and argv[0] in ("--help", "-h", "help")):
        print_main_help()
        sys.exit(EXIT_OK)

    args = build_parser().parse_args(argv)
    if not args.command:
        print_main_help()
        sys.exit(EXIT_ERROR)
    if args.log_level:
        try:
            set_level(args.log_level)
        except ValueError as e:
            logger.error(str(e))
            sys.exit(EXIT_ERROR)

    try:
        overrides = _overrides(args)
        if args.config:
            cfg = load_run_config(args.config, overrides)
        else:
            cfg = build_run_config({"command": args.command}, overrides)
    except QGammaError as e:
        logger.error(str(e))
        sys.exit(EXIT_ERROR)

    sys.exit(run(cfg))


__all__ = ["COMMAND_HANDLERS", "CommandOutcome", "build_parser", "main", "run"]
