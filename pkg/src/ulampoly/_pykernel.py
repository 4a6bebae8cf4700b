"""Pure-Python path-tracking kernel, used when the compiled one is unavailable.

Same entry points and the same algorithm as ``_ckernel``:

* predictor: tangent ``dx/dt = -H_x^{-1} H_t`` integrated by one RK4 (or Euler)
  step;
* corrector: Newton on ``H(., t + h)``, failing when an update does not shrink
  to half of the previous one or ``max_corr`` iterations pass;
* step control: halve on failure, grow by 1.5 after three successes, clamp to
  ``[step_min, step_max]``, cap at ``10 * step_min`` once ``t >= endgame_t``;
* endgame: a step failure at ``step_min`` inside the endgame hands the iterate
  to Newton on the target system at ``t = 1`` (singular endpoints end here);
  the same failure earlier marks the path singular.
"""
from __future__ import annotations

import math

import numpy as np

CONVERGED, DIVERGED, MAX_STEPS, SINGULAR = 0, 1, 2, 3
MAXN = 12
EPS = float(np.finfo(float).eps)


def _monic(x, skip=-1):
    c = [1.0 + 0.0j]
    for i, xi in enumerate(x):
        if i == skip:
            continue
        c.append(0.0j)
        for j in range(len(c) - 1, 0, -1):
            c[j] = c[j] - xi * c[j - 1]
    return c


def _resid(x):
    c = _monic(x)
    return [c[j + 1] - x[j] for j in range(len(x))]


def _jac(x):
    n = len(x)
    J = [[0.0j] * n for _ in range(n)]
    for k in range(n):
        c = _monic(x, k)
        for j in range(n):
            J[j][k] = -c[j]
        J[k][k] = J[k][k] - 1.0
    return J


def _maxnorm(v):
    m = 0.0
    for z in v:
        a = abs(z)
        if not math.isfinite(a):
            return a
        if a > m:
            m = a
    return m


def _lu_solve(A, b):
    # partial pivoting; None when singular to working precision
    n = len(b)
    A = [row[:] for row in A]
    b = list(b)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(A[i][k]))
        best = abs(A[p][k])
        if best == 0.0 or not math.isfinite(best):
            return None
        if p != k:
            A[k], A[p] = A[p], A[k]
            b[k], b[p] = b[p], b[k]
        akk = A[k][k]
        rowk = A[k]
        for i in range(k + 1, n):
            m = A[i][k] / akk
            if m != 0:
                rowi = A[i]
                for j in range(k + 1, n):
                    rowi[j] = rowi[j] - m * rowk[j]
                b[i] = b[i] - m * b[k]
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, n):
            acc = acc - A[i][j] * b[j]
        b[i] = acc / A[i][i]
        if not (math.isfinite(b[i].real) and math.isfinite(b[i].imag)):
            return None
    return b


def _cond_est(x):
    n = len(x)
    J = _jac(x)
    normj = max(sum(abs(v) for v in row) for row in J)
    if normj == 0.0 or not math.isfinite(normj):
        return 1.0 / EPS
    floor = EPS * normj
    A = [row[:] for row in J]
    perm = list(range(n))
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(A[i][k]))
        if abs(A[p][k]) <= abs(A[k][k]):
            p = k
        if p != k:
            A[k], A[p] = A[p], A[k]
            perm[k], perm[p] = perm[p], perm[k]
        if abs(A[k][k]) < floor:
            A[k][k] = complex(floor)
        for i in range(k + 1, n):
            m = A[i][k] / A[k][k]
            A[i][k] = m
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - m * A[k][j]
    rowsum = [0.0] * n
    for e in range(n):
        col = [1.0 + 0.0j if perm[i] == e else 0.0j for i in range(n)]
        for i in range(n):
            for j in range(i):
                col[i] = col[i] - A[i][j] * col[j]
        for i in range(n - 1, -1, -1):
            for j in range(i + 1, n):
                col[i] = col[i] - A[i][j] * col[j]
            col[i] = col[i] / A[i][i]
        for i in range(n):
            rowsum[i] += abs(col[i])
    inv = max(rowsum)
    if not math.isfinite(inv):
        return 1.0 / EPS
    return normj * inv


class _Start:
    __slots__ = ("n", "gamma", "c")

    def __init__(self, consts, gamma):
        self.n = len(consts)
        self.gamma = complex(gamma)
        self.c = [complex(v) for v in consts]


def _h_eval(x, t, s, want_h=True, want_hx=True, want_ht=False):
    n = s.n
    f = _resid(x)
    a = s.gamma * (1.0 - t)
    H = [0j] * n if want_h else None
    HT = [0j] * n if want_ht else None
    HX = None
    if want_hx:
        HX = _jac(x)
        for row in HX:
            for k in range(n):
                row[k] = t * row[k]
    for j in range(n):
        p = 1.0 + 0.0j
        for _ in range(j):
            p = p * x[j]
        dg = (j + 1) * p
        g = dg * x[j] / (j + 1) - s.c[j]
        if want_h:
            H[j] = a * g + t * f[j]
        if want_ht:
            HT[j] = f[j] - s.gamma * g
        if want_hx:
            HX[j][j] = HX[j][j] + a * dg
    return H, HX, HT


def _tangent(x, t, s):
    _, HX, HT = _h_eval(x, t, s, want_h=False, want_hx=True, want_ht=True)
    return _lu_solve(HX, [-v for v in HT])


def _predict(x, t, h, s, rk4):
    k1 = _tangent(x, t, s)
    if k1 is None:
        return None
    if not rk4:
        return [xi + h * ki for xi, ki in zip(x, k1)]
    k2 = _tangent([xi + 0.5 * h * ki for xi, ki in zip(x, k1)], t + 0.5 * h, s)
    if k2 is None:
        return None
    k3 = _tangent([xi + 0.5 * h * ki for xi, ki in zip(x, k2)], t + 0.5 * h, s)
    if k3 is None:
        return None
    k4 = _tangent([xi + h * ki for xi, ki in zip(x, k3)], t + h, s)
    if k4 is None:
        return None
    return [
        xi + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for xi, a, b, c, d in zip(x, k1, k2, k3, k4)
    ]


def _correct(y, t, s, p):
    prev = 0.0
    for it in range(p["max_corr"]):
        H, HX, _ = _h_eval(y, t, s)
        dx = _lu_solve(HX, [-v for v in H])
        if dx is None:
            return None
        y = [a + b for a, b in zip(y, dx)]
        nd = _maxnorm(dx)
        if not math.isfinite(nd):
            return None
        if nd <= p["newton_tol"] * (1.0 + _maxnorm(y)):
            return y
        if it > 0 and nd >= 0.5 * prev:
            return None
        prev = nd
    return None


def _refine(x, tol, maxit):
    x = list(x)
    f = _resid(x)
    best_r = _maxnorm(f)
    best = list(x)
    stall = 0
    singular = False
    for _ in range(maxit):
        if best_r == 0.0:
            break
        dx = _lu_solve(_jac(x), [-v for v in f])
        if dx is None:
            singular = True
            break
        x = [a + b for a, b in zip(x, dx)]
        nd = _maxnorm(dx)
        f = _resid(x)
        r = _maxnorm(f)
        if not math.isfinite(r):
            break
        if r < best_r:
            best_r = r
            best = list(x)
            stall = 0
        else:
            stall += 1
        if best_r <= tol and (stall >= 2 or nd <= 4.0 * EPS * (1.0 + _maxnorm(x))):
            break
        if stall >= 5:
            break
    return best, best_r, singular


def _track(x, s, p):
    n = s.n
    t = 0.0
    h = p["step_init"]
    streak = 0
    steps = 0
    while t < 1.0:
        if steps >= p["max_steps"]:
            return MAX_STEPS, x, t, _maxnorm(_resid(x)), steps, _cond_est(x)
        steps += 1
        if t >= p["endgame_t"] and h > 10.0 * p["step_min"]:
            h = 10.0 * p["step_min"]
        if h >= 1.0 - t:
            h = 1.0 - t
            t_new = 1.0
        else:
            t_new = t + h
        y = _predict(x, t, h, s, p["rk4"])
        if y is not None:
            y = _correct(y, t_new, s, p)
        if y is not None:
            x = y
            t = t_new
            if _maxnorm(x) > p["radius"]:
                return DIVERGED, x, t, _maxnorm(_resid(x)), steps, _cond_est(x)
            streak += 1
            if streak >= 3:
                h = min(h * 1.5, p["step_max"])
                streak = 0
        else:
            streak = 0
            if h <= p["step_min"]:
                if t >= p["endgame_t"]:
                    break
                return SINGULAR, x, t, _maxnorm(_resid(x)), steps, _cond_est(x)
            h = max(h * 0.5, p["step_min"])
    x, r, _ = _refine(x, p["refine_tol"], p["refine_max"])
    cond = _cond_est(x)
    if r <= p["refine_tol"]:
        status = CONVERGED
    elif _maxnorm(x) > p["radius"]:
        status = DIVERGED
    else:
        status = SINGULAR
    return status, x, 1.0, r, steps, cond


_PARAM_NAMES = (
    "step_init", "step_min", "step_max", "newton_tol", "max_corr", "max_steps",
    "radius", "endgame_t", "refine_tol", "refine_max", "rk4",
)


def _check_n(n):
    if n < 1 or n > MAXN:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")


def track_batch(starts, consts, gamma, params):
    """Track every row of ``starts``; returns (status, endpoints, t, residual, steps, cond)."""
    starts = np.asarray(starts, dtype=np.complex128)
    m, n = starts.shape
    _check_n(n)
    if len(consts) != n:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")
    p = dict(zip(_PARAM_NAMES, params))
    s = _Start(consts, gamma)
    status = np.empty(m, dtype=np.int8)
    ends = np.empty((m, n), dtype=np.complex128)
    tv = np.empty(m)
    rv = np.empty(m)
    sv = np.empty(m, dtype=np.int64)
    cv = np.empty(m)
    for i in range(m):
        st, x, t, r, steps, cond = _track([complex(v) for v in starts[i]], s, p)
        status[i], ends[i], tv[i], rv[i], sv[i], cv[i] = st, x, t, r, steps, cond
    return status, ends, tv, rv, sv, cv


def refine_batch(points, tol, maxit):
    """Newton-refine every row; returns (points, residual, cond, singular_flag)."""
    points = np.asarray(points, dtype=np.complex128)
    m, n = points.shape
    _check_n(n)
    out = np.empty((m, n), dtype=np.complex128)
    rv = np.empty(m)
    cv = np.empty(m)
    sg = np.empty(m, dtype=np.int8)
    for i in range(m):
        x, r, singular = _refine([complex(v) for v in points[i]], tol, maxit)
        out[i], rv[i], sg[i] = x, r, singular
        cv[i] = _cond_est(x)
    return out, rv, cv, sg


def residual(x):
    x = [complex(v) for v in np.asarray(x, dtype=np.complex128)]
    _check_n(len(x))
    return np.array(_resid(x), dtype=np.complex128)


def jacobian(x):
    x = [complex(v) for v in np.asarray(x, dtype=np.complex128)]
    _check_n(len(x))
    return np.array(_jac(x), dtype=np.complex128)


def condition(x):
    x = [complex(v) for v in np.asarray(x, dtype=np.complex128)]
    _check_n(len(x))
    return _cond_est(x)
