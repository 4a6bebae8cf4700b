"""Total-degree homotopy continuation for the fixed-point system.

The start system is ``g_j(x) = x_j**j - c_j`` with random unit-modulus
``c_j``; its ``n!`` solutions are deformed along

    H(x, t) = gamma * (1 - t) * G(x) + t * F(x),   t from 0 to 1,

into solutions of ``F(x) = T_n(x) - x = 0``.  The per-path work is done by the
selected kernel (compiled when available, see :mod:`ulampoly._backend`).
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterator

import numpy as np
from scipy.spatial import cKDTree

from . import _backend
from .core import as_cvec, jacobian, residual

__all__ = [
    "MAX_DEGREE",
    "TrackerConfig",
    "PathStatus",
    "PathResult",
    "StartSystem",
    "SingularEndpointError",
    "build_start",
    "homotopy_eval",
    "track_path",
    "refine_endpoint",
    "track_all",
    "default_threads",
]

MAX_DEGREE = 10


class SingularEndpointError(ArithmeticError):
    """Newton refinement hit a Jacobian that is singular to working precision."""

    def __init__(self, msg, point=None, residual_norm=math.inf):
        super().__init__(msg)
        self.point = point
        self.residual_norm = residual_norm


@dataclass(frozen=True)
class TrackerConfig:
    step_init: float = 0.05
    step_min: float = 1e-6
    step_max: float = 0.2
    newton_tol: float = 1e-10
    max_corrector_iters: int = 3
    max_steps: int = 10000
    divergence_radius: float = 1e6
    endgame_start_t: float = 0.99
    refine_tol: float = 1e-12
    refine_max_iters: int = 50
    predictor: str = "rk4"
    dedup_radius: float = 1e-6
    real_tol: float = 1e-8
    recover_failed: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.step_min <= self.step_init <= self.step_max <= 1:
            raise ValueError("need 0 < step_min <= step_init <= step_max <= 1")
        if not 0 < self.endgame_start_t < 1:
            raise ValueError("endgame_start_t must lie in (0, 1)")
        for name in ("newton_tol", "divergence_radius", "refine_tol", "dedup_radius", "real_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_corrector_iters", "max_steps", "refine_max_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.predictor not in ("euler", "rk4"):
            raise ValueError("predictor must be 'euler' or 'rk4'")

    def kernel_params(self) -> tuple:
        return (
            float(self.step_init), float(self.step_min), float(self.step_max),
            float(self.newton_tol), int(self.max_corrector_iters), int(self.max_steps),
            float(self.divergence_radius), float(self.endgame_start_t),
            float(self.refine_tol), int(self.refine_max_iters), int(self.predictor == "rk4"),
        )

    def to_dict(self) -> dict:
        return asdict(self)


class PathStatus(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    MAX_STEPS = "max_steps"
    SINGULAR = "singular"


# order matches the kernel status codes
_STATUS = (PathStatus.CONVERGED, PathStatus.DIVERGED, PathStatus.MAX_STEPS, PathStatus.SINGULAR)


@dataclass(frozen=True)
class PathResult:
    status: PathStatus
    endpoint: np.ndarray
    residual_norm: float
    steps_taken: int
    condition_estimate: float
    t_final: float = 1.0
    start_index: int = -1
    gamma_rotation: float = 0.0
    retried: bool = False


@dataclass(frozen=True)
class StartSystem:
    """``x_j**j = c_j`` for ``j = 1..n``, plus the homotopy twist ``gamma``."""

    n: int
    constants: np.ndarray
    gamma: complex
    seed: int

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @property
    def num_starts(self) -> int:
        return math.factorial(self.n)

    def eval(self, x) -> np.ndarray:
        x = as_cvec(x)
        return x ** np.arange(1, self.n + 1) - self.constants

    def start_point(self, ks) -> np.ndarray:
        """Start solution for root indices ``ks`` with ``0 <= ks[j-1] < j``."""
        out = np.empty(self.n, dtype=np.complex128)
        for j, (c, k) in enumerate(zip(self.constants, ks), start=1):
            if not 0 <= k < j:
                raise ValueError(f"root index {k} out of range for degree {j}")
            out[j - 1] = np.exp((1j * np.angle(c) + 2j * np.pi * k) / j)
        return out

    def start_points(self) -> Iterator[np.ndarray]:
        # last index varies fastest; this order defines the start index
        for ks in itertools.product(*(range(d) for d in self.degrees)):
            yield self.start_point(ks)

    def start_array(self) -> np.ndarray:
        arr = np.empty((self.num_starts, self.n), dtype=np.complex128)
        for i, x in enumerate(self.start_points()):
            arr[i] = x
        return arr


def build_start(n: int, seed: int = 0, constants=None, gamma=None):
    """Random start system for degree ``n`` and an iterator over its ``n!`` solutions.

    ``constants`` and ``gamma`` may be pinned (tests do this); otherwise both
    are drawn uniformly from the unit circle with ``numpy.random.default_rng(seed)``.
    """
    if int(n) != n or not 1 <= n <= MAX_DEGREE:
        raise ValueError(f"degree must be an integer in [1, {MAX_DEGREE}], got {n!r}")
    n = int(n)
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n + 1)
    if constants is None:
        constants = np.exp(1j * angles[:n])
    constants = as_cvec(constants)
    if constants.size != n:
        raise ValueError(f"need {n} constants, got {constants.size}")
    if gamma is None:
        gamma = np.exp(1j * angles[n])
    system = StartSystem(n=n, constants=constants, gamma=complex(gamma), seed=int(seed))
    return system, system.start_points()


def homotopy_eval(x, t: float, system: StartSystem) -> tuple[np.ndarray, np.ndarray]:
    """``H(x, t)`` and its Jacobian in ``x``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    x = as_cvec(x)
    d = np.arange(1, system.n + 1)
    a = system.gamma * (1.0 - t)
    h = a * system.eval(x) + t * residual(x)
    jac = t * jacobian(x) + np.diag(a * d * x ** (d - 1))
    return h, jac


def _results(raw, offset=0) -> list[PathResult]:
    status, ends, tv, rv, sv, cv = raw
    return [
        PathResult(
            status=_STATUS[int(status[i])],
            endpoint=ends[i].copy(),
            residual_norm=float(rv[i]),
            steps_taken=int(sv[i]),
            condition_estimate=float(cv[i]),
            t_final=float(tv[i]),
            start_index=offset + i,
        )
        for i in range(len(status))
    ]


def track_path(start, system: StartSystem, cfg: TrackerConfig | None = None, *, backend=None) -> PathResult:
    """Track one path from ``start`` (a root of the start system) to ``t = 1``."""
    cfg = cfg or TrackerConfig()
    kern = _backend.load(backend) if backend else _backend.kernel
    start = as_cvec(start)
    if start.size != system.n:
        raise ValueError(f"start has {start.size} entries, system has degree {system.n}")
    h0 = np.max(np.abs(system.eval(start)))
    if h0 > 1e-12:
        raise ValueError(f"start point is not a root of the start system (|G| = {h0:.3e})")
    raw = kern.track_batch(start[None, :].copy(), system.constants, system.gamma, cfg.kernel_params())
    return _results(raw)[0]


def refine_endpoint(x, cfg: TrackerConfig | None = None, *, backend=None):
    """Newton on ``F`` from ``x``: returns ``(point, residual_norm, condition_estimate)``.

    Iterates until the residual max-norm is below ``cfg.refine_tol`` (then a
    couple of polishing steps) or ``cfg.refine_max_iters`` steps, keeping the
    best iterate.  A point that never reaches the tolerance is returned as is,
    unless a Jacobian solve broke down, which raises
    :class:`SingularEndpointError`.
    """
    cfg = cfg or TrackerConfig()
    kern = _backend.load(backend) if backend else _backend.kernel
    x = as_cvec(x)
    pts, rv, cv, sg = kern.refine_batch(x[None, :].copy(), cfg.refine_tol, cfg.refine_max_iters)
    point, r, cond = pts[0], float(rv[0]), float(cv[0])
    if sg[0] and r > cfg.refine_tol:
        raise SingularEndpointError("singular Jacobian during refinement", point, r)
    return point, r, cond


def default_threads() -> int:
    env = os.environ.get("ULAM_THREADS")
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


def _run(kern, starts, system: StartSystem, params, threads: int, offset: int = 0) -> list[PathResult]:
    m = starts.shape[0]
    if threads == 1 or m < 2 * threads:
        return _results(kern.track_batch(starts, system.constants, system.gamma, params), offset)
    bounds = np.linspace(0, m, min(m, 4 * threads) + 1).astype(int)
    chunks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]

    def work(b):
        return _results(
            kern.track_batch(starts[b[0]:b[1]].copy(), system.constants, system.gamma, params),
            offset + b[0],
        )

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(work, chunks))
    return [r for part in parts for r in part]


# Retry schedule for failed paths: (gamma rotation in radians, use finer steps).
# Rotations stay small so the detour only crosses the near-singularity that
# stopped the path; wider ones sweep over other branch points.
_RECOVERY_ROUNDS = ((0.0, True), (0.01, False), (-0.01, False), (0.02, True), (-0.02, True),
                    (0.005, True), (-0.005, True))
_WELL_CONDITIONED = 1e8


def _finer(cfg: TrackerConfig) -> TrackerConfig:
    return replace(
        cfg,
        step_min=cfg.step_min * 1e-3,
        step_init=min(cfg.step_init, 0.01),
        step_max=min(cfg.step_max, 0.05),
        max_steps=cfg.max_steps * 10,
    )


def _recover(kern, results: list[PathResult], system: StartSystem, starts, cfg: TrackerConfig) -> None:
    """Re-track failed paths in place.

    All failed paths of one round share the same rotated twist, so a near
    collision between two of them at worst swaps their endpoints.  A round is
    kept only if every retried path converges and none lands within the dedup
    radius of a well-conditioned endpoint that another path already reached
    (a regular solution is the end of exactly one path).
    """
    for rotation, finer in _RECOVERY_ROUNDS:
        failed = [r.start_index for r in results if r.status is not PathStatus.CONVERGED]
        if not failed:
            return
        sys_r = replace(system, gamma=system.gamma * complex(np.exp(1j * rotation)))
        params = (_finer(cfg) if finer else cfg).kernel_params()
        idx = np.array(failed)
        retry = _results(kern.track_batch(starts[idx].copy(), sys_r.constants, sys_r.gamma, params))
        if any(r.status is not PathStatus.CONVERGED for r in retry) and rotation != 0.0:
            continue
        anchors = [r.endpoint for r in results
                   if r.status is PathStatus.CONVERGED and r.condition_estimate < _WELL_CONDITIONED]
        new_pts = [r.endpoint for r in retry if r.status is PathStatus.CONVERGED]
        if anchors and new_pts:
            tree = cKDTree(np.hstack([np.real(anchors), np.imag(anchors)]))
            q = np.asarray(new_pts)
            dist, _ = tree.query(np.hstack([q.real, q.imag]), p=np.inf)
            if np.any(dist <= cfg.dedup_radius):
                continue
        for i, r in zip(failed, retry):
            if r.status is PathStatus.CONVERGED or rotation == 0.0:
                results[i] = replace(
                    r,
                    start_index=i,
                    steps_taken=r.steps_taken + results[i].steps_taken,
                    gamma_rotation=rotation,
                    retried=True,
                )


def track_all(n: int, cfg: TrackerConfig | None = None, threads: int | None = None, *, backend=None) -> list[PathResult]:
    """Track all ``n!`` paths; results are ordered by start index.

    Paths are independent, so splitting them over threads cannot change any
    result.  Only the compiled kernel releases the GIL; with the Python kernel
    the batch runs on the calling thread.  Paths that fail are re-tracked per
    :func:`_recover` when ``cfg.recover_failed`` is set; their ``retried`` flag
    and ``gamma_rotation`` record how they finished.
    """
    cfg = cfg or TrackerConfig()
    name = backend or _backend.BACKEND
    kern = _backend.load(name)
    system, _ = build_start(n, cfg.seed)
    starts = system.start_array()
    threads = default_threads() if threads is None else max(1, int(threads))
    if name != "cython":
        threads = 1
    results = _run(kern, starts, system, cfg.kernel_params(), threads)
    if cfg.recover_failed:
        _recover(kern, results, system, starts, cfg)
    return results
