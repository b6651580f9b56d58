"""
Brouwer degree of maps on boxes in R^d (d <= 4), local degrees at isolated
zeros and the multistart Newton critical-point finder.

The degree is read off the boundary: every face of the box is cut into
cells on global per-axis grids, each cell into Kuhn simplices, and the
simplices whose piecewise-linear image cone contains a fixed generic ray
are counted with orientation. A cell is accepted once the directions of
F at its corners spread less than DEGREE_ANGLE_LIMIT; otherwise the grid
intervals it spans are bisected, which keeps the triangulation conforming.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .config import settings
from .geometry.params import sphere_area
from .utils.logger import logger

ArrayMap = Callable[[np.ndarray], np.ndarray]


@dataclass
class MapUnderTest:
    """
    A continuous map R^d -> R^d.

    Attributes:
        dim: Dimension d
        eval: Vectorized map, (N, d) -> (N, d)
        jacobian: Optional single-point Jacobian, (d,) -> (d, d)
        lipschitz_hint: Optional Lipschitz bound used by the volume integral
        name: Label for logs
    """

    dim: int
    eval: ArrayMap
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lipschitz_hint: Optional[float] = None
    name: str = "map"

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] <= settings.CHUNK_SIZE:
            return np.asarray(self.eval(X), dtype=float).reshape(X.shape[0], self.dim)
        chunks = [
            np.asarray(self.eval(X[i : i + settings.CHUNK_SIZE]), dtype=float)
            for i in range(0, X.shape[0], settings.CHUNK_SIZE)
        ]
        return np.concatenate(chunks).reshape(X.shape[0], self.dim)

    def jac(self, x: np.ndarray) -> np.ndarray:
        """Analytic Jacobian when available, central differences otherwise."""
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        h = 1e-7 * (1.0 + np.linalg.norm(x))
        steps = np.eye(self.dim) * h
        plus = self(x + steps)
        minus = self(x - steps)
        return ((plus - minus) / (2.0 * h)).T

    @classmethod
    def from_pointwise(
        cls,
        dim: int,
        f: Callable[[np.ndarray], np.ndarray],
        jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        threads: int = 1,
        name: str = "map",
    ) -> "MapUnderTest":
        """Wrap a single-point function; rows are evaluated in order on a thread pool."""

        def batch(X: np.ndarray) -> np.ndarray:
            if threads <= 1 or X.shape[0] < 2:
                return np.stack([np.asarray(f(x), dtype=float) for x in X])
            with ThreadPoolExecutor(max_workers=threads) as executor:
                return np.stack([np.asarray(v, dtype=float) for v in executor.map(f, X)])

        return cls(dim, batch, jacobian, name=name)


@dataclass
class DegreeResult:
    """Outcome of a degree computation."""

    degree: int
    certified: bool
    min_boundary_norm: float
    subdivision_depth: int
    cells: int = 0
    method: str = "boundary"

    def to_dict(self) -> Dict[str, object]:
        return {
            "degree": self.degree,
            "certified": self.certified,
            "min_boundary_norm": self.min_boundary_norm,
            "subdivision_depth": self.subdivision_depth,
            "cells": self.cells,
            "method": self.method,
        }


class _EvalCache:
    """Memoized map values keyed by point coordinates."""

    def __init__(self, m: MapUnderTest) -> None:
        self.m = m
        self.store: Dict[Tuple[float, ...], np.ndarray] = {}

    def values(self, points: np.ndarray) -> np.ndarray:
        flat = points.reshape(-1, points.shape[-1])
        keys = [tuple(p) for p in flat]
        missing = [i for i, k in enumerate(keys) if k not in self.store]
        if missing:
            fresh = self.m(flat[missing])
            for i, v in zip(missing, fresh):
                self.store[keys[i]] = v
        out = np.stack([self.store[k] for k in keys])
        return out.reshape(points.shape[:-1] + (self.m.dim,))


def _as_box(box, d: int) -> np.ndarray:
    from .utils.exceptions import ValidationError

    b = np.asarray(box, dtype=float)
    if b.shape != (d, 2) or np.any(b[:, 1] <= b[:, 0]):
        raise ValidationError(
            f"Box must be {d} intervals (lo < hi), got {b.tolist()}", "box", f"{d} x 2 array"
        )
    return b


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _face_corners(
    cache: _EvalCache, grids: List[np.ndarray], box: np.ndarray, axis: int, side: int
) -> np.ndarray:
    """Map values at the corners of every cell of one face: shape (2^{d-1}, m_1, ..., m_{d-1}, d)."""
    d = box.shape[0]
    face_axes = [j for j in range(d) if j != axis]
    mesh = np.meshgrid(*[grids[j] for j in face_axes], indexing="ij")
    pts = np.empty(mesh[0].shape + (d,))
    pts[..., axis] = box[axis, side]
    for k, j in enumerate(face_axes):
        pts[..., j] = mesh[k]
    vals = cache.values(pts)
    corners = []
    for off in itertools.product((0, 1), repeat=d - 1):
        sl = tuple(slice(o, vals.shape[k] - 1 + o) for k, o in enumerate(off))
        corners.append(vals[sl])
    return np.stack(corners)


def _cell_ok(corners: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Accepted cells, cells holding a numerical zero, and the smallest corner norm.

    A corner is a numerical zero when |F| <= tol * max |F| over the corners of
    its cell.
    """
    norms = np.linalg.norm(corners, axis=-1)
    min_norm = float(np.min(norms))
    scale = np.max(norms, axis=0)
    vanishing = np.any(norms <= tol * scale[None], axis=0) | ~np.isfinite(scale)
    unit = corners / np.maximum(norms, np.finfo(float).tiny)[..., None]
    mean = np.sum(unit, axis=0)
    mean /= np.maximum(np.linalg.norm(mean, axis=-1), np.finfo(float).tiny)[..., None]
    cosang = np.clip(np.sum(unit * mean[None], axis=-1), -1.0, 1.0)
    spread = np.max(np.arccos(cosang), axis=0)
    ok = (spread < settings.DEGREE_ANGLE_LIMIT) & ~vanishing
    return ok, vanishing, min_norm


def _count_face(corners: np.ndarray, axis: int, side: int, e: np.ndarray) -> Tuple[int, bool]:
    """Signed ray crossings on one face; second value flags a degenerate direction."""
    d = corners.shape[-1]
    k = d - 1
    sigma = 1 if side == 1 else -1
    flat = corners.reshape(corners.shape[0], -1, d)  # (2^k, cells, d)
    # crossings depend on directions only
    flat = flat / np.maximum(np.linalg.norm(flat, axis=-1, keepdims=True), np.finfo(float).tiny)
    total = 0
    degenerate = False
    for perm in itertools.permutations(range(k)):
        orient = sigma * (-1) ** axis * _permutation_sign(perm)
        idx = [0]
        off = [0] * k
        for p in perm:
            off[p] = 1
            # corner index in itertools.product((0,1), repeat=k) order
            idx.append(int("".join(str(b) for b in off), 2) if k else 0)
        W = np.stack([flat[i] for i in idx], axis=-1)  # (cells, d, d), columns are vertex values
        det = np.linalg.det(W)
        live = np.abs(det) > 1e-300
        if not np.any(live):
            continue
        lam = np.linalg.solve(W[live], np.broadcast_to(e, (int(live.sum()), d))[..., None])[..., 0]
        scale = np.max(np.abs(lam), axis=-1, keepdims=True)
        if np.any(np.all(lam > -1e-12 * scale, axis=-1) & np.any(np.abs(lam) <= 1e-12 * scale, axis=-1)):
            degenerate = True
        hit = np.all(lam > 0.0, axis=-1)
        total += orient * int(np.sum(np.sign(det[live][hit])))
    return total, degenerate


def _boundary_count(faces: Dict[Tuple[int, int], np.ndarray], d: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    for _ in range(8):
        e = rng.standard_normal(d)
        e /= np.linalg.norm(e)
        total, bad = 0, False
        for (axis, side), corners in faces.items():
            t, b = _count_face(corners, axis, side, e)
            total += t
            bad = bad or b
        if not bad:
            return total
    return total


def _refine(grid: np.ndarray, intervals: np.ndarray) -> np.ndarray:
    mids = 0.5 * (grid[intervals] + grid[intervals + 1])
    return np.sort(np.concatenate([grid, mids]))


def brouwer_degree(
    m: MapUnderTest,
    box,
    tol: float = settings.DEGREE_TOL,
    max_depth: int = settings.DEGREE_MAX_DEPTH,
    seed: int = 0,
    cross_check: bool = False,
) -> DegreeResult:
    """
    Degree of m on a box with respect to 0.

    Args:
        m: Map under test
        box: (d, 2) array of intervals
        tol: Relative evaluation-error bound; a boundary value with |m| <= tol
            times the largest |m| on its cell counts as a zero. Exact zeros are
            reported at once; relative ones only if refinement cannot separate them
        max_depth: Maximum refinement rounds
        seed: Seed for the generic ray direction
        cross_check: Also run mollified_degree and require agreement

    Returns:
        Certified DegreeResult

    Raises:
        ValidationError: If d exceeds DEGREE_MAX_DIM or the box is malformed
        DegreeError: On a boundary zero or when certification fails at max depth;
            carries the best estimate
    """
    from .utils.exceptions import DegreeError, ValidationError

    d = m.dim
    if d < 1 or d > settings.DEGREE_MAX_DIM:
        raise ValidationError(
            f"Degree engine supports 1 <= d <= {settings.DEGREE_MAX_DIM}, got d = {d}",
            "dim",
            f"integer <= {settings.DEGREE_MAX_DIM}",
        )
    box = _as_box(box, d)

    if d == 1:
        lo, hi = float(box[0, 0]), float(box[0, 1])
        h = (hi - lo) * 2.0 ** -(max_depth + 2)
        va, vb, na, nb = m(np.array([[lo], [hi], [lo + h], [hi - h]]))[:, 0]
        mb = min(abs(va), abs(vb))
        deg = int(vb > 0) - int(va > 0)
        if not np.all(np.isfinite([va, vb])) or abs(va) <= tol * abs(na) or abs(vb) <= tol * abs(nb):
            raise DegreeError(
                f"Zero of the map on the boundary (|F| = {mb:.2e})", estimate=deg, min_boundary_norm=mb
            )
        return DegreeResult(deg, True, mb, 0, 2)

    cache = _EvalCache(m)
    grids = [np.linspace(lo, hi, settings.DEGREE_INITIAL_CELLS + 1) for lo, hi in box]
    faces: Dict[Tuple[int, int], np.ndarray] = {}
    for depth in range(max_depth + 1):
        refine: List[set] = [set() for _ in range(d)]
        min_norm = math.inf
        cells = 0
        vanishing = False
        for axis in range(d):
            for side in (0, 1):
                corners = _face_corners(cache, grids, box, axis, side)
                faces[(axis, side)] = corners
                ok, zero, mn = _cell_ok(corners, tol)
                min_norm = min(min_norm, mn)
                vanishing = vanishing or bool(np.any(zero))
                cells += ok.size
                bad = np.argwhere(~ok)
                face_axes = [j for j in range(d) if j != axis]
                for k, j in enumerate(face_axes):
                    refine[j].update(int(v) for v in bad[:, k])
        if not min_norm > 0.0 or (vanishing and depth == max_depth):
            raise DegreeError(
                f"Zero of the map on the boundary (|F| = {min_norm:.2e}, relative tol {tol:.0e})",
                estimate=_boundary_count(faces, d, seed),
                min_boundary_norm=min_norm,
            )
        if not any(refine):
            degree = _boundary_count(faces, d, seed)
            result = DegreeResult(degree, True, min_norm, depth, cells)
            break
        if depth == max_depth:
            raise DegreeError(
                f"Degree not certified after {max_depth} refinements",
                estimate=_boundary_count(faces, d, seed),
                min_boundary_norm=min_norm,
            )
        grids = [
            _refine(g, np.array(sorted(r), dtype=int)) if r else g for g, r in zip(grids, refine)
        ]

    if cross_check:
        mol = mollified_degree(m, box, min_boundary_norm=result.min_boundary_norm)
        if mol.degree != result.degree:
            raise DegreeError(
                f"Boundary count {result.degree} disagrees with volume integral {mol.degree}",
                estimate=result.degree,
                min_boundary_norm=result.min_boundary_norm,
            )
    logger.debug(
        f"deg({m.name}) = {result.degree} on box (depth {result.subdivision_depth}, "
        f"{result.cells} cells, min |F| = {result.min_boundary_norm:.2e})"
    )
    return result


# -- volume integral ---------------------------------------------------------


def _bump_normalization(d: int) -> float:
    radial, _ = integrate.quad(lambda r: r ** (d - 1) * math.exp(-1.0 / (1.0 - r * r)), 0.0, 1.0)
    return 1.0 / (sphere_area(d) * radial)


def _boundary_min_norm(m: MapUnderTest, box: np.ndarray, per_axis: int = 17) -> float:
    d = box.shape[0]
    best = math.inf
    for axis in range(d):
        for side in (0, 1):
            axes = [np.linspace(lo, hi, per_axis) for lo, hi in box]
            axes[axis] = np.array([box[axis, side]])
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([g.reshape(-1) for g in mesh], axis=1)
            best = min(best, float(np.min(np.linalg.norm(m(pts), axis=1))))
    return best


def _batch_jacobian(m: MapUnderTest, X: np.ndarray) -> np.ndarray:
    """Jacobians at every row of X, shape (N, d, d)."""
    if m.jacobian is not None:
        return np.stack([np.asarray(m.jacobian(x), dtype=float) for x in X])
    h = 1e-7 * (1.0 + np.linalg.norm(X, axis=1, keepdims=True))
    cols = []
    for j in range(m.dim):
        step = np.zeros_like(X)
        step[:, j] = h[:, 0]
        cols.append((m(X + step) - m(X - step)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def mollified_degree(
    m: MapUnderTest,
    box,
    delta: Optional[float] = None,
    min_boundary_norm: Optional[float] = None,
    max_depth: int = 10,
    leaf_nodes: int = 4,
) -> DegreeResult:
    """
    Regularized volume integral int_box phi_delta(F(x)) det DF(x) dx.

    phi_delta is the normalized bump exp(-1/(1 - |y|^2/delta^2)) of radius
    delta = min_boundary_norm / 4. Cells whose values stay safely away from
    the bump support are skipped; the rest are bisected until their diameter
    drops below delta / (4 L) and then integrated with tensor Gauss-Legendre,
    Jacobians by central differences.
    """
    d = m.dim
    box = _as_box(box, d)
    mb = min_boundary_norm if min_boundary_norm is not None else _boundary_min_norm(m, box)
    delta = delta or mb / 4.0
    norm_c = _bump_normalization(d) / delta**d
    lip = m.lipschitz_hint
    x, w = np.polynomial.legendre.leggauss(leaf_nodes)
    offsets = np.array(list(itertools.product(range(leaf_nodes), repeat=d)))
    leaf_x, leaf_w = x[offsets], np.prod(w[offsets], axis=1)
    corners01 = np.array(list(itertools.product((0.0, 1.0), repeat=d)))

    def bump(y: np.ndarray) -> np.ndarray:
        r2 = np.sum(y * y, axis=-1) / delta**2
        out = np.zeros(r2.shape)
        inside = r2 < 1.0
        out[inside] = norm_c * np.exp(-1.0 / (1.0 - r2[inside]))
        return out

    total = 0.0
    stack = [(box.copy(), 0)]
    while stack:
        cell, depth = stack.pop()
        lo, hi = cell[:, 0], cell[:, 1]
        diam = float(np.linalg.norm(hi - lo))
        pts = lo + corners01 * (hi - lo)
        center = 0.5 * (lo + hi)
        vals = m(np.vstack([pts, center[None]]))
        norms = np.linalg.norm(vals, axis=1)
        spread = lip * diam if lip else 2.0 * float(np.max(np.linalg.norm(vals[:-1] - vals[-1], axis=1)))
        if float(np.min(norms)) - spread > delta:
            continue
        local_lip = lip or spread / max(diam, np.finfo(float).tiny)
        if depth >= max_depth or diam * max(local_lip, 1e-12) <= delta / 4.0:
            nodes = center + 0.5 * (hi - lo) * leaf_x
            vol = float(np.prod(0.5 * (hi - lo)))
            f = m(nodes)
            dets = np.linalg.det(_batch_jacobian(m, nodes))
            total += vol * float(np.sum(leaf_w * bump(f) * dets))
            continue
        mid = center
        for choice in itertools.product((0, 1), repeat=d):
            child = cell.copy()
            for j, c in enumerate(choice):
                if c == 0:
                    child[j, 1] = mid[j]
                else:
                    child[j, 0] = mid[j]
            stack.append((child, depth + 1))

    degree = int(round(total))
    certified = abs(total - degree) < 0.1
    return DegreeResult(degree, certified, mb, max_depth, method="mollified")


# -- shortcuts and local degrees --------------------------------------------


def boundary_sign_shortcut(
    m: MapUnderTest, radius: float, center=None, probes: int = 512, seed: int = 0
) -> Optional[int]:
    """
    (-1)^d if <m(x), x - c> < 0 on all probes of |x - c| = radius, +1 if all > 0, else None.
    """
    d = m.dim
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((probes, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    u = np.vstack([u, np.eye(d), -np.eye(d)])
    inner = np.sum(m(c + radius * u) * u, axis=1)
    if np.all(inner < 0.0):
        return (-1) ** d
    if np.all(inner > 0.0):
        return 1
    return None


def local_degree(m: MapUnderTest, zero, radius: float, tol: float = settings.DEGREE_TOL) -> int:
    """
    Degree of m on the cube of half-width radius around an isolated zero.

    Raises:
        DegreeError: If isolation cannot be certified
    """
    from .utils.exceptions import DegreeError

    z = np.asarray(zero, dtype=float)
    box = np.stack([z - radius, z + radius], axis=1)
    result = brouwer_degree(m, box, tol=tol)
    if not result.certified:
        raise DegreeError(
            "Local degree not certified", estimate=result.degree, min_boundary_norm=result.min_boundary_norm
        )
    return result.degree


# -- critical points ---------------------------------------------------------


@dataclass
class CritPoint:
    """Certified isolated zero."""

    x: np.ndarray
    residual: float
    deg_loc: int
    radius: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "x": self.x.tolist(),
            "residual": self.residual,
            "deg_loc": self.deg_loc,
            "radius": self.radius,
        }


@dataclass
class CritSearch:
    """
    Zeros found by crit_points plus diagnostics for discarded candidates.

    Attributes:
        zeros: Certified isolated zeros
        diagnostics: One line per discarded seed or candidate
        non_isolated: Converged candidates whose local degree could not be certified
        flat: Converged candidates where the map is numerically zero on a whole cube
        scale: Largest |F| over the seed grid; residuals are measured against it
    """

    zeros: List[CritPoint] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)
    non_isolated: List[np.ndarray] = field(default_factory=list)
    flat: List[np.ndarray] = field(default_factory=list)
    scale: float = 0.0


def _newton(
    m: MapUnderTest, x0: np.ndarray, box: np.ndarray, tol: float, max_iter: int
) -> Tuple[Optional[np.ndarray], float, str]:
    x = x0.copy()
    fx = m(x)[0]
    res = float(np.linalg.norm(fx))
    width = box[:, 1] - box[:, 0]
    for it in range(max_iter):
        if res <= tol:
            return x, res, f"converged in {it} iterations"
        try:
            step = np.linalg.solve(m.jac(x), -fx)
        except np.linalg.LinAlgError:
            return None, res, "singular Jacobian"
        t = 1.0
        while t > 1e-6:
            trial = x + t * step
            ft = m(trial)[0]
            rt = float(np.linalg.norm(ft))
            if np.isfinite(rt) and rt < res:
                break
            t *= 0.5
        else:
            return None, res, "line search failed"
        x, fx, res = trial, ft, rt
        if np.any(x < box[:, 0] - 0.1 * width) or np.any(x > box[:, 1] + 0.1 * width):
            return None, res, "left the search box"
    if res <= tol:
        return x, res, f"converged in {max_iter} iterations"
    return None, res, f"no convergence in {max_iter} iterations"


def _is_flat(m: MapUnderTest, x: np.ndarray, radius: float, tol: float) -> bool:
    """|F| <= tol at the corners and face centres of the cube around x, and |DF| * radius <= tol."""
    d = m.dim
    offsets = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=d)))
    with np.errstate(under="ignore"):
        near = np.linalg.norm(m(x + radius * offsets), axis=1)
        if not np.all(near <= tol):
            return False
        return bool(np.linalg.norm(m.jac(x), 2) * radius <= tol)


def crit_points(
    m: MapUnderTest,
    box,
    seeds: Optional[Sequence] = None,
    grid: int = 5,
    tol: float = settings.CRIT_RESIDUAL_TOL,
    max_iter: int = settings.NEWTON_MAX_ITER_CRIT,
) -> CritSearch:
    """
    Multistart Newton search for isolated zeros inside a box.

    Seeds are a uniform grid of `grid` points per axis plus any supplied
    seeds. The residual tolerance is relative: Newton stops once
    |F| <= tol * max |F| over the seeds. Converged points closer than
    CRIT_MERGE_REL * diam(box) are merged to the one with the smallest
    residual. A survivor around which the map stays below
    CRIT_FLAT_REL * max |F| on its whole certification cube, with a
    numerically zero Jacobian, is a flat region (a decaying tail, or K
    constant) and is dropped. The rest are certified by their local degree;
    non-isolated candidates are dropped with a diagnostic.

    Returns:
        CritSearch with zeros sorted lexicographically
    """
    from .utils.exceptions import DegreeError

    d = m.dim
    box = _as_box(box, d)
    width = box[:, 1] - box[:, 0]
    diam = float(np.linalg.norm(width))
    axes = [np.linspace(lo, hi, grid + 2)[1:-1] for lo, hi in box]
    starts = [np.array(p) for p in itertools.product(*axes)]
    for s in seeds or []:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if s.shape == (d,) and np.all(s >= box[:, 0]) and np.all(s <= box[:, 1]):
            starts.append(s)

    search = CritSearch()
    with np.errstate(under="ignore"):
        values = np.linalg.norm(m(np.array(starts)), axis=1)
    search.scale = float(np.max(values[np.isfinite(values)], initial=0.0))
    res_tol = tol * search.scale
    flat_tol = settings.CRIT_FLAT_REL * search.scale
    found: List[Tuple[np.ndarray, float]] = []
    for s in starts:
        x, res, note = _newton(m, s, box, res_tol, max_iter)
        if x is None:
            search.diagnostics.append(f"seed {np.round(s, 6).tolist()}: {note}")
            continue
        if np.any(x < box[:, 0]) or np.any(x > box[:, 1]):
            search.diagnostics.append(f"seed {np.round(s, 6).tolist()}: zero outside box")
            continue
        found.append((x, res))

    merged: List[Tuple[np.ndarray, float]] = []
    radius_merge = settings.CRIT_MERGE_REL * diam
    for x, res in sorted(found, key=lambda t: t[1]):
        if all(np.linalg.norm(x - y) > radius_merge for y, _ in merged):
            merged.append((x, res))

    for i, (x, res) in enumerate(merged):
        others = [np.linalg.norm(x - y) for j, (y, _) in enumerate(merged) if j != i]
        r = 0.02 * diam
        if others:
            r = min(r, 0.3 * min(others))
        edge = float(np.min(np.minimum(x - box[:, 0], box[:, 1] - x)))
        if edge > 1e-12:
            r = min(r, 0.9 * edge)
        if _is_flat(m, x, r, flat_tol):
            search.flat.append(x)
            search.diagnostics.append(f"zero {np.round(x, 8).tolist()}: flat region (|F| <= {flat_tol:.2e} nearby)")
            continue
        try:
            deg = local_degree(m, x, r)
        except DegreeError as e:
            search.non_isolated.append(x)
            search.diagnostics.append(f"zero {np.round(x, 8).tolist()}: not isolated ({e.message})")
            continue
        search.zeros.append(CritPoint(x, res, deg, r))

    search.zeros.sort(key=lambda c: tuple(np.round(c.x, 8)))
    if not search.zeros:
        logger.info(f"No certified zeros of {m.name}: {len(search.diagnostics)} diagnostics")
    else:
        logger.info(f"✅ {len(search.zeros)} certified zero(s) of {m.name}")
    return search


__all__ = [
    "CritPoint",
    "CritSearch",
    "DegreeResult",
    "MapUnderTest",
    "boundary_sign_shortcut",
    "brouwer_degree",
    "crit_points",
    "local_degree",
    "mollified_degree",
]
