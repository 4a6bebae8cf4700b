"""From raw path endpoints to the finite solution set ``U_n``.

Endpoints are clustered, each cluster is refined once more from its mean, and
the survivors are classified (real, trivial) and put in a canonical order
that does not depend on the seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import _backend
from .core import verify_fixed_point
from .homotopy import PathResult, PathStatus, TrackerConfig, track_all
from .polyroots import RootFindError, verify_ulam_by_roots

__all__ = [
    "Solution",
    "SolutionSet",
    "enumerate_ulam",
    "dedup_cluster",
    "canonicalize",
    "summarize",
    "solutions_from_points",
    "MAX_ENUM_DEGREE",
]

log = logging.getLogger(__name__)

MAX_ENUM_DEGREE = 8


@dataclass(frozen=True)
class Solution:
    x: np.ndarray
    residual_norm: float
    is_real: bool
    is_trivial: bool
    cluster_size: int = 1
    condition_estimate: float = 1.0


@dataclass
class SolutionSet:
    degree: int
    solutions: list[Solution]
    path_stats: dict[str, int]
    seed: int
    config: dict = field(default_factory=dict)
    unverified: int = 0

    @property
    def warning(self) -> bool:
        """Set when some path did not finish cleanly or a solution failed re-verification."""
        return bool(self.path_stats.get("max_steps", 0) or self.path_stats.get("singular", 0) or self.unverified)

    def __len__(self) -> int:
        return len(self.solutions)

    def points(self) -> np.ndarray:
        if not self.solutions:
            return np.empty((0, self.degree), dtype=np.complex128)
        return np.array([s.x for s in self.solutions])


def _link_components(real_view: np.ndarray, radius: float) -> np.ndarray:
    """Connected components of the graph ``|p - q|_inf <= radius``.

    Points are first snapped to a grid a thousand times finer than ``radius``
    so that the many copies of one solution become a single node; node pairs
    near the threshold are then settled on their actual members, which keeps
    the linkage exact.
    """
    m = real_view.shape[0]
    q = radius * 1e-3
    keys = np.floor(real_view / q).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    reps = real_view[first]
    k = reps.shape[0]
    slack = 2.0 * q
    cand = cKDTree(reps).query_pairs(radius + slack, p=np.inf, output_type="ndarray")
    keep = []
    members = None
    for a, b in cand:
        d = np.max(np.abs(reps[a] - reps[b]))
        if d <= radius - slack:
            keep.append((a, b))
            continue
        if members is None:
            order = np.argsort(inverse, kind="stable")
            bounds = np.searchsorted(inverse[order], np.arange(k + 1))
            members = (order, bounds)
        order, bounds = members
        pa = real_view[order[bounds[a]:bounds[a + 1]]]
        pb = real_view[order[bounds[b]:bounds[b + 1]]]
        dist, _ = cKDTree(pb).query(pa, p=np.inf, distance_upper_bound=radius * (1 + 1e-12))
        if np.any(dist <= radius):
            keep.append((a, b))
    keep = np.array(keep, dtype=np.int64).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(keep)), (keep[:, 0], keep[:, 1])), shape=(k, k))
    _, node_labels = connected_components(graph, directed=False)
    return node_labels[inverse]


def dedup_cluster(points, radius: float) -> list[tuple[np.ndarray, int]]:
    """Single-linkage clusters at max-norm distance ``radius``.

    Returns ``(component-wise mean, size)`` per cluster, in order of each
    cluster's first member.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    pts = np.asarray(points, dtype=np.complex128)
    if pts.size == 0:
        return []
    if pts.ndim == 1:
        pts = pts[None, :]
    labels = _link_components(np.hstack([pts.real, pts.imag]), radius)
    _, first = np.unique(labels, return_index=True)
    out = []
    for start in np.sort(first):
        members = labels == labels[start]
        out.append((pts[members].mean(axis=0), int(members.sum())))
    return out


def _sort_key(sol: Solution) -> tuple:
    key = []
    for z in sol.x:
        # +0.0 folds -0.0 into 0.0 after rounding
        key.append(round(float(z.real), 9) + 0.0)
        key.append(round(float(z.imag), 9) + 0.0)
    return tuple(key)


def canonicalize(solutions) -> list[Solution]:
    """Lexicographic order on ``(Re x_1, Im x_1, Re x_2, ...)`` rounded to 9 decimals."""
    return sorted(solutions, key=_sort_key)


def _classify(x, residual_norm, cluster_size, cond, real_tol) -> Solution:
    return Solution(
        x=np.asarray(x, dtype=np.complex128),
        residual_norm=float(residual_norm),
        is_real=bool(np.max(np.abs(np.imag(x))) <= real_tol),
        is_trivial=bool(abs(x[-1]) <= real_tol),
        cluster_size=int(cluster_size),
        condition_estimate=float(cond),
    )


def solutions_from_points(points, cfg: TrackerConfig, members=None, kernel=None) -> tuple[list[Solution], int]:
    """Cluster, re-refine, classify and order converged points.

    ``members`` holds, per input point, an index used to pick the best member
    when a cluster mean does not refine (means of a singular cluster can sit
    a little off).  Returns the solutions and the number that failed either
    verifier.
    """
    kern = kernel or _backend.kernel
    pts = np.asarray(points, dtype=np.complex128)
    if pts.size == 0:
        return [], 0
    clusters = dedup_cluster(pts, cfg.dedup_radius)
    reps = np.array([c for c, _ in clusters])
    refined, rv, cv, _ = kern.refine_batch(reps, cfg.refine_tol, cfg.refine_max_iters)
    sols = []
    for k, (rep, size) in enumerate(clusters):
        x, r, cond = refined[k], rv[k], cv[k]
        if not r <= cfg.refine_tol:
            # fall back to the cluster member with the smallest residual
            near = np.max(np.abs(pts - rep), axis=1) <= cfg.dedup_radius * size
            cand, crv, ccv, _ = kern.refine_batch(pts[near].copy(), cfg.refine_tol, cfg.refine_max_iters)
            j = int(np.argmin(crv))
            x, r, cond = cand[j], crv[j], ccv[j]
        sols.append(_classify(x, r, size, cond, cfg.real_tol))
    unverified = 0
    for s in sols:
        ok_res, _ = verify_fixed_point(s.x, 1e-8)
        try:
            ok_roots = verify_ulam_by_roots(s.x, tol=1e-6)
        except RootFindError:
            ok_roots = False
        if not (ok_res and ok_roots):
            unverified += 1
            log.warning("solution %s failed re-verification", s.x)
    return canonicalize(sols), unverified


def _path_stats(results: list[PathResult]) -> dict[str, int]:
    stats = {"total": len(results)}
    for status in PathStatus:
        stats[status.value] = sum(1 for r in results if r.status is status)
    return stats


def enumerate_ulam(n: int, cfg: TrackerConfig | None = None, threads: int | None = None, *, backend=None) -> SolutionSet:
    """Enumerate ``U_n`` by tracking all ``n!`` total-degree paths."""
    cfg = cfg or TrackerConfig()
    if int(n) != n or not 1 <= n <= MAX_ENUM_DEGREE:
        raise ValueError(f"degree must be an integer in [1, {MAX_ENUM_DEGREE}], got {n!r}")
    results = track_all(n, cfg, threads, backend=backend)
    kern = _backend.load(backend) if backend else _backend.kernel
    conv = [r.endpoint for r in results if r.status is PathStatus.CONVERGED]
    sols, unverified = solutions_from_points(conv, cfg, kernel=kern)
    out = SolutionSet(
        degree=int(n),
        solutions=sols,
        path_stats=_path_stats(results),
        seed=cfg.seed,
        config=cfg.to_dict(),
        unverified=unverified,
    )
    if out.warning:
        log.warning("degree %d: path stats %s, %d unverified", n, out.path_stats, unverified)
    return out


def summarize(sset: SolutionSet) -> dict:
    """Counts used in reports, including the real nontrivial ones (``P(0) != 0``)."""
    sols = sset.solutions
    tol = float(sset.config.get("real_tol", 1e-8)) if sset.config else 1e-8
    pts = sset.points()
    pairs = 0
    for i, s in enumerate(sols):
        if s.is_real:
            continue
        d = np.max(np.abs(pts - np.conj(s.x)), axis=1)
        d[i] = np.inf
        if np.any(d <= max(tol, 1e-8)):
            pairs += 1
    return {
        "degree": sset.degree,
        "total": len(sols),
        "real": sum(s.is_real for s in sols),
        "real_nontrivial": sum(s.is_real and not s.is_trivial for s in sols),
        "trivial": sum(s.is_trivial for s in sols),
        "conjugate_pairs": pairs // 2,
        "origin_present": any(np.max(np.abs(s.x)) <= tol for s in sols),
        "diverged_paths": sset.path_stats.get("diverged", 0),
        "singular_paths": sset.path_stats.get("singular", 0),
        "max_steps_paths": sset.path_stats.get("max_steps", 0),
    }
