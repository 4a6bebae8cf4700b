"""Checks that share no code path with the homotopy tracker.

* :func:`exact_verify_rational` expands the product over ``Fraction``s, so a
  rational candidate is confirmed or rejected with no rounding at all.
* :func:`oracle_u3` solves the degree-3 system by elimination (sympy does the
  algebra, and the rational roots are checked exactly).
* :func:`multistart_newton` samples random starting points and refines them
  with plain Newton.  It finds solutions only probabilistically, which is
  enough to cross-check the tracker's set at small degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _backend
from .core import residual
from .enumeration import SolutionSet, solutions_from_points
from .homotopy import TrackerConfig

__all__ = [
    "RationalTuple",
    "OracleDerivationError",
    "exact_verify_rational",
    "multistart_newton",
    "oracle_u3",
    "u3_quartic",
]


class OracleDerivationError(RuntimeError):
    """The elimination produced a root that does not solve the system."""


@dataclass(frozen=True)
class RationalTuple:
    entries: tuple[Fraction, ...]

    def __init__(self, entries: Iterable):
        vals = tuple(Fraction(e) for e in entries)
        if not vals:
            raise ValueError("need at least one entry")
        object.__setattr__(self, "entries", vals)

    @classmethod
    def parse(cls, text: str) -> "RationalTuple":
        """``"1,-2,3/4"`` -> ``RationalTuple``; decimal literals are read exactly."""
        return cls(Fraction(part.strip()) for part in text.split(","))

    def __len__(self) -> int:
        return len(self.entries)

    def to_cvec(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=np.complex128)


def exact_verify_rational(x) -> bool:
    """``(-1)**j sigma_j(x) == x_j`` for every ``j``, in exact arithmetic."""
    if not isinstance(x, RationalTuple):
        x = RationalTuple(x)
    c = [Fraction(1)]
    for xi in x.entries:
        c.append(Fraction(0))
        for j in range(len(c) - 1, 0, -1):
            c[j] = c[j] - xi * c[j - 1]
    return all(c[j + 1] == xj for j, xj in enumerate(x.entries))


def _polydisc_sample(rng, num: int, n: int, radius: float) -> np.ndarray:
    # uniform in each coordinate disc
    r = radius * np.sqrt(rng.uniform(size=(num, n)))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(num, n))
    return r * np.exp(1j * theta)


def multistart_newton(n: int, num_starts: int, box_radius: float = 3.0, seed: int = 0,
                      cfg: TrackerConfig | None = None, *, backend=None) -> SolutionSet:
    """Refine ``num_starts`` random points of the polydisc ``|x_j| <= box_radius``.

    Points whose residual reaches ``cfg.refine_tol`` are deduplicated and
    canonicalized like tracker output.  ``path_stats`` here counts starts,
    not homotopy paths.
    """
    if num_starts < 1:
        raise ValueError("num_starts must be at least 1")
    if not box_radius > 0:
        raise ValueError("box_radius must be positive")
    if int(n) != n or n < 1:
        raise ValueError("degree must be a positive integer")
    cfg = cfg or TrackerConfig(seed=seed)
    kern = _backend.load(backend) if backend else _backend.kernel
    rng = np.random.default_rng(seed)
    starts = _polydisc_sample(rng, num_starts, int(n), box_radius)
    pts, rv, _, sing = kern.refine_batch(starts, cfg.refine_tol, cfg.refine_max_iters)
    ok = rv <= cfg.refine_tol
    sols, unverified = solutions_from_points(pts[ok], cfg, kernel=kern)
    return SolutionSet(
        degree=int(n),
        solutions=sols,
        path_stats={
            "total": int(num_starts),
            "converged": int(ok.sum()),
            "diverged": 0,
            "max_steps": 0,
            "singular": int(np.sum(~ok & (sing != 0))),
        },
        seed=int(seed),
        config={**cfg.to_dict(), "box_radius": float(box_radius), "num_starts": int(num_starts)},
        unverified=unverified,
    )


def u3_quartic():
    """The quartic in ``x_1`` on the branch ``x_1 x_2 = -1`` of the degree-3 system.

    Derived symbolically: the first equation gives ``x_3 = -2 x_1 - x_2``; with
    ``x_2 = -1/x_1`` the second equation becomes a rational function of
    ``x_1`` whose numerator is returned (made primitive, positive leading
    coefficient), as a ``sympy.Poly``.
    """
    import sympy as sp

    x1, x2, x3 = sp.symbols("x1 x2 x3")
    e1 = -(x1 + x2 + x3) - x1
    e2 = (x1 * x2 + x1 * x3 + x2 * x3) - x2
    x3_sol = sp.solve(e1, x3)[0]
    sub = sp.together(e2.subs(x3, x3_sol).subs(x2, -1 / x1))
    num, _ = sp.fraction(sub)
    poly = sp.Poly(sp.expand(num), x1).primitive()[1]
    if poly.LC() < 0:
        poly = -poly
    return poly


def oracle_u3(check_tol: float = 1e-12) -> SolutionSet:
    """All degree-3 Ulam tuples by case analysis.

    The third equation factors as ``x_3 (1 + x_1 x_2) = 0``.  On ``x_3 = 0``
    the system is the degree-2 one padded with a zero root, giving ``(0,0,0)``
    and ``(1,-2,0)``.  On ``x_1 x_2 = -1`` it reduces to :func:`u3_quartic`.
    Rational members are confirmed exactly, the others by residual.
    """
    import sympy as sp

    x1 = sp.Symbol("x1")
    quartic = u3_quartic()
    if quartic.degree() != 4:
        raise OracleDerivationError(f"expected a quartic, got {quartic.as_expr()}")
    candidates = [
        (Fraction(0), Fraction(0), Fraction(0)),
        (Fraction(1), Fraction(-2), Fraction(0)),
    ]
    numeric = []
    for root in sp.Poly(quartic, x1).all_roots():
        if root.is_rational:
            a = Fraction(int(root.p), int(root.q))
            candidates.append((a, -1 / a, -2 * a + 1 / a))
        else:
            a = complex(sp.N(root, 30))
            numeric.append(np.array([a, -1 / a, -2 * a + 1 / a], dtype=np.complex128))
    pts = []
    for cand in candidates:
        if not exact_verify_rational(cand):
            raise OracleDerivationError(f"rational candidate {cand} is not a fixed point")
        pts.append(RationalTuple(cand).to_cvec())
    for x in numeric:
        r = float(np.max(np.abs(residual(x))))
        if not r < check_tol:
            raise OracleDerivationError(f"quartic root {x} leaves residual {r:.3e}")
        pts.append(x)
    cfg = TrackerConfig()
    sols, unverified = solutions_from_points(np.array(pts), cfg)
    return SolutionSet(
        degree=3,
        solutions=sols,
        path_stats={"total": len(pts), "converged": len(pts), "diverged": 0, "max_steps": 0, "singular": 0},
        seed=0,
        config=cfg.to_dict(),
        unverified=unverified,
    )
