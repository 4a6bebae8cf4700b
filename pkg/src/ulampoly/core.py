"""The Ulam map and its fixed-point system.

A tuple ``x = (x_1, ..., x_n)`` is sent to the coefficient vector of the monic
polynomial ``(z - x_1)...(z - x_n)``; position ``j`` holds the coefficient of
``z**(n - j)``, which equals ``(-1)**j * sigma_j(x)``.  Fixed points of this map
are exactly the Ulam polynomials.

All functions accept any 1-D sequence of numbers and return fresh complex128
arrays; nothing here mutates its input.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InputDomainError",
    "UlamSystem",
    "Orbit",
    "as_cvec",
    "elem_sym",
    "ulam_map",
    "residual",
    "jacobian",
    "verify_fixed_point",
    "hypersurface_f",
    "pad_zero",
    "opposite_residual",
    "iterate_map",
    "ORBIT_DIVERGENCE_RADIUS",
]

ORBIT_DIVERGENCE_RADIUS = 1e8


class InputDomainError(ValueError):
    """Raised for empty or non-finite input tuples."""


def as_cvec(x) -> np.ndarray:
    """Coerce ``x`` to a finite, non-empty complex128 vector."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    if arr.ndim != 1 or arr.size == 0:
        raise InputDomainError(f"expected a non-empty 1-D tuple, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputDomainError("tuple has non-finite components")
    return arr.copy()


def _monic_coeffs(x: np.ndarray) -> np.ndarray:
    # c[j] is the coefficient of z**(n-j) in prod(z - x_i); c[0] == 1.
    c = np.zeros(x.size + 1, dtype=np.complex128)
    c[0] = 1.0
    for j, xi in enumerate(x):
        c[1 : j + 2] = c[1 : j + 2] - xi * c[: j + 1]
    return c


def elem_sym(x) -> np.ndarray:
    """Elementary symmetric functions ``(sigma_1(x), ..., sigma_n(x))``.

    Uses the incremental product recurrence (one linear factor at a time), so
    no divisions are involved.
    """
    x = as_cvec(x)
    c = _monic_coeffs(x)[1:]
    signs = np.where(np.arange(1, x.size + 1) % 2 == 0, 1.0, -1.0)
    return signs * c


def ulam_map(x) -> np.ndarray:
    """Coefficient vector of ``prod(z - x_i)`` with the leading 1 dropped."""
    return _monic_coeffs(as_cvec(x))[1:]


def residual(x) -> np.ndarray:
    """Fixed-point residual ``T(x) - x``."""
    x = as_cvec(x)
    return _monic_coeffs(x)[1:] - x


def jacobian(x) -> np.ndarray:
    """Analytic Jacobian of :func:`residual`.

    Entry ``(j, k)`` is ``(-1)**j * sigma_{j-1}(x with x_k removed) - delta_jk``.
    Each deleted tuple is re-expanded from scratch rather than obtained by
    dividing out ``(z - x_k)``, which stays accurate at repeated entries.
    """
    x = as_cvec(x)
    n = x.size
    jac = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        # (-1)**j sigma_{j-1}(rest) = -c_{j-1}(rest)
        jac[:, k] = -_monic_coeffs(np.delete(x, k))
    jac -= np.eye(n)
    return jac


def verify_fixed_point(x, tol: float = 1e-10) -> tuple[bool, float]:
    """Return ``(max|residual(x)| <= tol, max|residual(x)|)``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    norm = float(np.max(np.abs(residual(x))))
    return norm <= tol, norm


def hypersurface_f(z: complex, x) -> complex:
    """``z**n + x_1 z**(n-1) + ... + x_n - prod(z - x_i)``.

    Both polynomials are taken in coefficient form and evaluated in one Horner
    pass over their difference, so the two leading ``z**n`` terms cancel
    exactly instead of leaving rounding of size ``eps * |z|**n``.  The value
    vanishes for every ``z`` exactly when ``x`` is a fixed point, i.e. the
    whole line ``z -> (z, x)`` lies on the hypersurface.
    """
    x = as_cvec(x)
    z = complex(z)
    if not np.isfinite(z):
        raise InputDomainError("z must be finite")
    diff = x - _monic_coeffs(x)[1:]
    acc = 0.0 + 0.0j
    for d in diff:
        acc = acc * z + complex(d)
    return acc


def pad_zero(x) -> np.ndarray:
    """Append the root 0, i.e. multiply the polynomial by ``z``."""
    return np.append(as_cvec(x), 0.0 + 0.0j)


def opposite_residual(x) -> np.ndarray:
    """``T(x) + x``: zero when the roots are the negated coefficients."""
    x = as_cvec(x)
    return _monic_coeffs(x)[1:] + x


@dataclass(frozen=True)
class UlamSystem:
    """The degree-``n`` fixed-point system ``T_n(x) - x = 0``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"degree must be a positive integer, got {self.n!r}")

    def _check(self, x) -> np.ndarray:
        x = as_cvec(x)
        if x.size != self.n:
            raise InputDomainError(f"expected {self.n} entries, got {x.size}")
        return x

    def residual(self, x) -> np.ndarray:
        return residual(self._check(x))

    def jacobian(self, x) -> np.ndarray:
        return jacobian(self._check(x))

    def ulam_map(self, x) -> np.ndarray:
        return ulam_map(self._check(x))


@dataclass
class Orbit:
    points: list[np.ndarray] = field(default_factory=list)
    diverged: bool = False


def iterate_map(x0, k: int, divergence_radius: float = ORBIT_DIVERGENCE_RADIUS) -> Orbit:
    """Forward orbit ``[x0, T(x0), ..., T^k(x0)]``.

    The orbit is cut short, with ``diverged`` set, at the first iterate whose
    max-norm exceeds ``divergence_radius`` or that overflows; that iterate is
    not included.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    x = as_cvec(x0)
    orbit = Orbit(points=[x.copy()])
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k):
            x = _monic_coeffs(x)[1:]
            if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > divergence_radius:
                orbit.diverged = True
                break
            orbit.points.append(x.copy())
    return orbit
