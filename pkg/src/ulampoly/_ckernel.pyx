# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled path-tracking kernel.

Mirrors ``_pykernel`` operation for operation; see that module for the
algorithm description.  All per-path work runs without the GIL so that
``track_batch`` calls on disjoint slices can share a thread pool.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, isfinite

cnp.import_array()

ctypedef double complex cplx

cdef enum:
    MAXN = 12
    CONVERGED = 0
    DIVERGED = 1
    MAX_STEPS = 2
    SINGULAR = 3

cdef double EPS = 2.220446049250313e-16

cdef struct Params:
    double step_init
    double step_min
    double step_max
    double newton_tol
    int max_corr
    long max_steps
    double radius
    double endgame_t
    double refine_tol
    int refine_max
    int rk4

cdef struct Start:
    int n
    cplx gamma
    cplx c[MAXN]


cdef inline double cmod(cplx z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline double maxnorm(const cplx* v, int n) noexcept nogil:
    cdef double m = 0.0, a
    cdef int i
    for i in range(n):
        a = cmod(v[i])
        if not isfinite(a):
            return a
        if a > m:
            m = a
    return m


cdef inline void monic(const cplx* x, int n, int skip, cplx* c) noexcept nogil:
    # coefficients of prod_{i != skip} (z - x_i); c[0] = 1
    cdef int i, j, m = 0
    c[0] = 1.0
    for i in range(n):
        if i == skip:
            continue
        c[m + 1] = 0.0
        for j in range(m + 1, 0, -1):
            c[j] = c[j] - x[i] * c[j - 1]
        m += 1


cdef inline void resid(const cplx* x, int n, cplx* f) noexcept nogil:
    cdef cplx c[MAXN + 1]
    cdef int j
    monic(x, n, -1, c)
    for j in range(n):
        f[j] = c[j + 1] - x[j]


cdef inline void jac(const cplx* x, int n, cplx* J) noexcept nogil:
    cdef cplx c[MAXN + 1]
    cdef int j, k
    for k in range(n):
        monic(x, n, k, c)
        for j in range(n):
            J[j * n + k] = -c[j]
        J[k * n + k] = J[k * n + k] - 1.0


cdef int lu_solve(cplx* A, int n, cplx* b) noexcept nogil:
    # in-place Gaussian elimination with partial pivoting; -1 if singular
    cdef int i, j, k, p
    cdef double best, a
    cdef cplx tmp, m
    for k in range(n):
        p = k
        best = cmod(A[k * n + k])
        for i in range(k + 1, n):
            a = cmod(A[i * n + k])
            if a > best:
                best = a
                p = i
        if best == 0.0 or not isfinite(best):
            return -1
        if p != k:
            for j in range(k, n):
                tmp = A[k * n + j]
                A[k * n + j] = A[p * n + j]
                A[p * n + j] = tmp
            tmp = b[k]
            b[k] = b[p]
            b[p] = tmp
        for i in range(k + 1, n):
            m = A[i * n + k] / A[k * n + k]
            if m != 0.0:
                for j in range(k + 1, n):
                    A[i * n + j] = A[i * n + j] - m * A[k * n + j]
                b[i] = b[i] - m * b[k]
    for i in range(n - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, n):
            tmp = tmp - A[i * n + j] * b[j]
        b[i] = tmp / A[i * n + i]
        if not isfinite(b[i].real) or not isfinite(b[i].imag):
            return -1
    return 0


cdef double cond_est(const cplx* x, int n) noexcept nogil:
    # ||J||_inf * ||J^-1||_inf, pivots floored at eps*||J|| so the result stays finite
    cdef cplx J[MAXN * MAXN]
    cdef cplx A[MAXN * MAXN]
    cdef cplx col[MAXN]
    cdef double rowsum[MAXN]
    cdef double normj = 0.0, s, best, a, floor_, inv = 0.0
    cdef int i, j, k, p, e
    cdef cplx tmp, m
    jac(x, n, J)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += cmod(J[i * n + j])
        if s > normj:
            normj = s
    if normj == 0.0 or not isfinite(normj):
        return 1.0 / EPS
    floor_ = EPS * normj
    cdef int perm[MAXN]
    for i in range(n * n):
        A[i] = J[i]
    for i in range(n):
        perm[i] = i
    for k in range(n):
        p = k
        best = cmod(A[k * n + k])
        for i in range(k + 1, n):
            a = cmod(A[i * n + k])
            if a > best:
                best = a
                p = i
        if p != k:
            for j in range(n):
                tmp = A[k * n + j]
                A[k * n + j] = A[p * n + j]
                A[p * n + j] = tmp
            i = perm[k]
            perm[k] = perm[p]
            perm[p] = i
        if cmod(A[k * n + k]) < floor_:
            A[k * n + k] = floor_
        for i in range(k + 1, n):
            m = A[i * n + k] / A[k * n + k]
            A[i * n + k] = m
            for j in range(k + 1, n):
                A[i * n + j] = A[i * n + j] - m * A[k * n + j]
    for i in range(n):
        rowsum[i] = 0.0
    for e in range(n):
        # solve J y = unit(e): P J = L U
        for i in range(n):
            col[i] = 1.0 if perm[i] == e else 0.0
        for i in range(n):
            for j in range(i):
                col[i] = col[i] - A[i * n + j] * col[j]
        for i in range(n - 1, -1, -1):
            for j in range(i + 1, n):
                col[i] = col[i] - A[i * n + j] * col[j]
            col[i] = col[i] / A[i * n + i]
        for i in range(n):
            rowsum[i] += cmod(col[i])
    for i in range(n):
        if rowsum[i] > inv:
            inv = rowsum[i]
    if not isfinite(inv):
        return 1.0 / EPS
    return normj * inv


cdef inline cplx ipow(cplx z, int d) noexcept nogil:
    cdef cplx r = 1.0
    cdef int i
    for i in range(d):
        r = r * z
    return r


cdef void h_eval(const cplx* x, double t, const Start* s, cplx* H, cplx* HX, cplx* HT) noexcept nogil:
    # H = gamma (1-t) G + t F, its x-Jacobian, and dH/dt = F - gamma G
    cdef int n = s.n, j, k
    cdef cplx f[MAXN]
    cdef cplx g, dg, a = s.gamma * (1.0 - t)
    resid(x, n, f)
    if HX != NULL:
        jac(x, n, HX)
        for j in range(n):
            for k in range(n):
                HX[j * n + k] = t * HX[j * n + k]
    for j in range(n):
        dg = (j + 1) * ipow(x[j], j)
        g = dg * x[j] / (j + 1) - s.c[j]
        if H != NULL:
            H[j] = a * g + t * f[j]
        if HT != NULL:
            HT[j] = f[j] - s.gamma * g
        if HX != NULL:
            HX[j * n + j] = HX[j * n + j] + a * dg


cdef int tangent(const cplx* x, double t, const Start* s, cplx* v) noexcept nogil:
    cdef cplx HX[MAXN * MAXN]
    cdef int j
    h_eval(x, t, s, NULL, HX, v)
    for j in range(s.n):
        v[j] = -v[j]
    return lu_solve(HX, s.n, v)


cdef int predict(const cplx* x, double t, double h, const Start* s, int rk4, cplx* y) noexcept nogil:
    cdef cplx k1[MAXN]
    cdef cplx k2[MAXN]
    cdef cplx k3[MAXN]
    cdef cplx k4[MAXN]
    cdef cplx tmp[MAXN]
    cdef int j, n = s.n
    if tangent(x, t, s, k1) != 0:
        return -1
    if not rk4:
        for j in range(n):
            y[j] = x[j] + h * k1[j]
        return 0
    for j in range(n):
        tmp[j] = x[j] + 0.5 * h * k1[j]
    if tangent(tmp, t + 0.5 * h, s, k2) != 0:
        return -1
    for j in range(n):
        tmp[j] = x[j] + 0.5 * h * k2[j]
    if tangent(tmp, t + 0.5 * h, s, k3) != 0:
        return -1
    for j in range(n):
        tmp[j] = x[j] + h * k3[j]
    if tangent(tmp, t + h, s, k4) != 0:
        return -1
    for j in range(n):
        y[j] = x[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    return 0


cdef int correct(cplx* y, double t, const Start* s, const Params* p) noexcept nogil:
    cdef cplx H[MAXN]
    cdef cplx HX[MAXN * MAXN]
    cdef int it, j, n = s.n
    cdef double nd, prev = 0.0
    for it in range(p.max_corr):
        h_eval(y, t, s, H, HX, NULL)
        for j in range(n):
            H[j] = -H[j]
        if lu_solve(HX, n, H) != 0:
            return -1
        for j in range(n):
            y[j] = y[j] + H[j]
        nd = maxnorm(H, n)
        if not isfinite(nd):
            return -1
        if nd <= p.newton_tol * (1.0 + maxnorm(y, n)):
            return 0
        if it > 0 and nd >= 0.5 * prev:
            return -1
        prev = nd
    return -1


cdef int refine(cplx* x, int n, double tol, int maxit, double* out_r) noexcept nogil:
    # Newton on F keeping the best iterate; returns 1 if a Jacobian solve failed
    cdef cplx f[MAXN]
    cdef cplx J[MAXN * MAXN]
    cdef cplx best[MAXN]
    cdef double r, best_r, nd
    cdef int it, j, stall = 0, singular = 0
    resid(x, n, f)
    best_r = maxnorm(f, n)
    for j in range(n):
        best[j] = x[j]
    for it in range(maxit):
        if best_r == 0.0:
            break
        jac(x, n, J)
        for j in range(n):
            f[j] = -f[j]
        if lu_solve(J, n, f) != 0:
            singular = 1
            break
        for j in range(n):
            x[j] = x[j] + f[j]
        nd = maxnorm(f, n)
        resid(x, n, f)
        r = maxnorm(f, n)
        if not isfinite(r):
            break
        if r < best_r:
            best_r = r
            stall = 0
            for j in range(n):
                best[j] = x[j]
        else:
            stall += 1
        if best_r <= tol and (stall >= 2 or nd <= 4.0 * EPS * (1.0 + maxnorm(x, n))):
            break
        if stall >= 5:
            break
    for j in range(n):
        x[j] = best[j]
    out_r[0] = best_r
    return singular


cdef int track(cplx* x, const Start* s, const Params* p, double* t_out, long* steps_out,
               double* r_out, double* cond_out) noexcept nogil:
    cdef int n = s.n, j, streak = 0, handoff = 0
    cdef double t = 0.0, h = p.step_init, t_new
    cdef long steps = 0
    cdef cplx y[MAXN]
    cdef double r
    while t < 1.0:
        if steps >= p.max_steps:
            t_out[0] = t
            steps_out[0] = steps
            resid(x, n, y)
            r_out[0] = maxnorm(y, n)
            cond_out[0] = cond_est(x, n)
            return MAX_STEPS
        steps += 1
        if t >= p.endgame_t and h > 10.0 * p.step_min:
            h = 10.0 * p.step_min
        if h >= 1.0 - t:
            h = 1.0 - t
            t_new = 1.0
        else:
            t_new = t + h
        if predict(x, t, h, s, p.rk4, y) == 0 and correct(y, t_new, s, p) == 0:
            for j in range(n):
                x[j] = y[j]
            t = t_new
            if maxnorm(x, n) > p.radius:
                t_out[0] = t
                steps_out[0] = steps
                resid(x, n, y)
                r_out[0] = maxnorm(y, n)
                cond_out[0] = cond_est(x, n)
                return DIVERGED
            streak += 1
            if streak >= 3:
                h = h * 1.5
                if h > p.step_max:
                    h = p.step_max
                streak = 0
        else:
            streak = 0
            if h <= p.step_min:
                if t >= p.endgame_t:
                    handoff = 1
                    break
                t_out[0] = t
                steps_out[0] = steps
                resid(x, n, y)
                r_out[0] = maxnorm(y, n)
                cond_out[0] = cond_est(x, n)
                return SINGULAR
            h = h * 0.5
            if h < p.step_min:
                h = p.step_min
    t_out[0] = 1.0
    steps_out[0] = steps
    cdef int singular = refine(x, n, p.refine_tol, p.refine_max, r_out)
    cond_out[0] = cond_est(x, n)
    if r_out[0] <= p.refine_tol:
        return CONVERGED
    if maxnorm(x, n) > p.radius:
        return DIVERGED
    return SINGULAR


cdef Params unpack(tuple params):
    cdef Params p
    (p.step_init, p.step_min, p.step_max, p.newton_tol, p.max_corr, p.max_steps,
     p.radius, p.endgame_t, p.refine_tol, p.refine_max, p.rk4) = params
    return p


def track_batch(cplx[:, ::1] starts, cplx[::1] consts, cplx gamma, tuple params):
    """Track every row of ``starts``; returns (status, endpoints, t, residual, steps, cond)."""
    cdef Py_ssize_t m = starts.shape[0], i
    cdef int n = starts.shape[1], j
    if n < 1 or n > MAXN or consts.shape[0] != n:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")
    cdef Params p = unpack(params)
    cdef Start s
    s.n = n
    s.gamma = gamma
    for j in range(n):
        s.c[j] = consts[j]
    ends_arr = np.array(starts, dtype=np.complex128, copy=True)
    status_arr = np.empty(m, dtype=np.int8)
    t_arr = np.empty(m, dtype=np.float64)
    r_arr = np.empty(m, dtype=np.float64)
    steps_arr = np.empty(m, dtype=np.int64)
    cond_arr = np.empty(m, dtype=np.float64)
    cdef cplx[:, ::1] ends = ends_arr
    cdef signed char[::1] status = status_arr
    cdef double[::1] tv = t_arr, rv = r_arr, cv = cond_arr
    cdef cnp.int64_t[::1] sv = steps_arr
    cdef long steps
    with nogil:
        for i in range(m):
            status[i] = track(&ends[i, 0], &s, &p, &tv[i], &steps, &rv[i], &cv[i])
            sv[i] = steps
    return status_arr, ends_arr, t_arr, r_arr, steps_arr, cond_arr


def refine_batch(cplx[:, ::1] points, double tol, int maxit):
    """Newton-refine every row; returns (points, residual, cond, singular_flag)."""
    cdef Py_ssize_t m = points.shape[0], i
    cdef int n = points.shape[1]
    if n < 1 or n > MAXN:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")
    out_arr = np.array(points, dtype=np.complex128, copy=True)
    r_arr = np.empty(m, dtype=np.float64)
    cond_arr = np.empty(m, dtype=np.float64)
    sing_arr = np.empty(m, dtype=np.int8)
    cdef cplx[:, ::1] out = out_arr
    cdef double[::1] rv = r_arr, cv = cond_arr
    cdef signed char[::1] sg = sing_arr
    with nogil:
        for i in range(m):
            sg[i] = refine(&out[i, 0], n, tol, maxit, &rv[i])
            cv[i] = cond_est(&out[i, 0], n)
    return out_arr, r_arr, cond_arr, sing_arr


def residual(cplx[::1] x):
    cdef int n = x.shape[0]
    if n < 1 or n > MAXN:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")
    out_arr = np.empty(n, dtype=np.complex128)
    cdef cplx[::1] out = out_arr
    resid(&x[0], n, &out[0])
    return out_arr


def jacobian(cplx[::1] x):
    cdef int n = x.shape[0]
    if n < 1 or n > MAXN:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")
    out_arr = np.empty((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    jac(&x[0], n, &out[0, 0])
    return out_arr


def condition(cplx[::1] x):
    cdef int n = x.shape[0]
    if n < 1 or n > MAXN:
        raise ValueError(f"kernel supports 1 <= n <= {MAXN}")
    return cond_est(&x[0], n)
