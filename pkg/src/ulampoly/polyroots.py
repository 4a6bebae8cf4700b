"""Monic univariate polynomials: Horner evaluation and Ehrlich-Aberth roots.

Root extraction inverts the Ulam map (coefficients -> roots), which gives a
second Ulam test that never looks at the fixed-point residual: the roots of
the polynomial with coefficient vector ``c`` must be ``c`` itself, as a
multiset.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import as_cvec

__all__ = [
    "MonicPoly",
    "RootFindConfig",
    "RootFindError",
    "eval_horner",
    "roots_aberth",
    "multiset_match",
    "verify_ulam_by_roots",
    "MAX_POLY_DEGREE",
]

MAX_POLY_DEGREE = 32
_EPS = float(np.finfo(float).eps)


class RootFindError(ArithmeticError):
    """Ehrlich-Aberth did not converge; ``best`` holds the last iterate."""

    def __init__(self, msg, best=None, iterations=0):
        super().__init__(msg)
        self.best = best
        self.iterations = iterations


@dataclass(frozen=True)
class MonicPoly:
    """``z**n + coeffs[0] z**(n-1) + ... + coeffs[n-1]``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = as_cvec(self.coeffs)
        if c.size > MAX_POLY_DEGREE:
            raise ValueError(f"degree {c.size} exceeds {MAX_POLY_DEGREE}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size

    def __call__(self, z):
        return eval_horner(self, z)[0]


@dataclass(frozen=True)
class RootFindConfig:
    max_iterations: int = 1000
    convergence_tol: float = 1e-13
    initial_radius_factor: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if not self.initial_radius_factor > 0:
            raise ValueError("initial_radius_factor must be positive")


def _as_poly(p) -> MonicPoly:
    return p if isinstance(p, MonicPoly) else MonicPoly(p)


def eval_horner(p, z: complex) -> tuple[complex, complex]:
    """``(P(z), P'(z))`` in one Horner pass."""
    p = _as_poly(p)
    z = complex(z)
    val, der = 1.0 + 0.0j, 0.0 + 0.0j
    for a in p.coeffs:
        der = der * z + val
        val = val * z + complex(a)
    return val, der


def _horner_vec(coeffs, z):
    # value, derivative and a running rounding bound sum |a_i| |z|^i
    val = np.ones_like(z)
    der = np.zeros_like(z)
    bound = np.ones(z.shape)
    az = np.abs(z)
    for a in coeffs:
        der = der * z + val
        val = val * z + a
        bound = bound * az + abs(a)
    return val, der, bound


def roots_aberth(p, cfg: RootFindConfig | None = None) -> np.ndarray:
    """All roots of a monic polynomial by Ehrlich-Aberth iteration.

    Starts from equally spaced, phase-shifted points on the circle of radius
    ``initial_radius_factor * (1 + max|coeff|)``.  A root stops moving once
    its update drops below ``convergence_tol * (1 + |z|)`` or ``|P(z)|``
    reaches the Horner rounding level; the latter is what lets clusters at
    multiple roots terminate.  Order of the result is unspecified.
    """
    p = _as_poly(p)
    cfg = cfg or RootFindConfig()
    n = p.degree
    coeffs = p.coeffs
    radius = cfg.initial_radius_factor * (1.0 + float(np.max(np.abs(coeffs))))
    k = np.arange(n)
    z = radius * np.exp(1j * (2.0 * np.pi * k / n + 0.4 + 0.1 * k / n))
    if n == 1:
        return -coeffs.copy()
    active = np.ones(n, dtype=bool)
    for it in range(1, cfg.max_iterations + 1):
        val, der, bound = _horner_vec(coeffs, z)
        done = np.abs(val) <= 4.0 * n * _EPS * bound
        active &= ~done
        if not active.any():
            return z
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        recip = 1.0 / diff
        np.fill_diagonal(recip, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = val / der
            step = w / (1.0 - w * recip.sum(axis=1))
        step = np.where(active & np.isfinite(step), step, 0.0)
        z = z - step
        converged = np.abs(step) < cfg.convergence_tol * (1.0 + np.abs(z))
        active &= ~converged
        if not active.any():
            return z
    raise RootFindError(f"no convergence after {cfg.max_iterations} iterations", best=z, iterations=it)


def multiset_match(a, b, tol: float) -> bool:
    """True iff some bijection pairs each ``a_i`` with a ``b_j`` within ``tol``.

    Solved exactly as an assignment problem on 0/1 costs (cost 1 for pairs
    farther apart than ``tol``), so no greedy pairing can miss a matching.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = as_cvec(a)
    b = as_cvec(b)
    if a.size != b.size:
        raise ValueError("multisets must have the same size")
    cost = (np.abs(a[:, None] - b[None, :]) > tol).astype(float)
    rows, cols = linear_sum_assignment(cost)
    return bool(cost[rows, cols].sum() == 0)


def verify_ulam_by_roots(c, cfg: RootFindConfig | None = None, tol: float = 1e-6) -> bool:
    """Do the roots of ``z**n + c_1 z**(n-1) + ... + c_n`` equal ``c`` as a multiset?"""
    c = as_cvec(c)
    return multiset_match(roots_aberth(MonicPoly(c), cfg), c, tol)
