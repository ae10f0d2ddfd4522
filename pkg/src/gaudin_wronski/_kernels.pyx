# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Newton kernel for the Bethe system.

Mirrors ``_kernels_py`` step for step. The iteration runs without the GIL,
so independent starts can be driven from a thread pool.
"""
import numpy as np

from libc.math cimport hypot, isfinite, INFINITY

cdef double MIN_STEP = 9.5367431640625e-07  # 2 ** -20
cdef int POLISH_STEPS = 3
cdef double EPS = 2.220446049250313e-16

OK, SINGULAR, STALL, ESCAPE, MAXITER, DOMAIN = range(6)

BACKEND = "cython"


cdef inline double cabs_(double complex c) nogil:
    return hypot(c.real, c.imag)


cdef inline double maxabs(const double complex* v, int n) nogil:
    cdef double out = 0.0, a
    cdef int i
    for i in range(n):
        a = cabs_(v[i])
        if a > out or a != a:
            out = a
    return out


cdef int evaluate(const double complex* t, int k, const double complex* z, const double* m, int n,
                  double complex* r, double complex* g, double complex* jg) nogil:
    """Fill the residual, scaled residual and scaled Jacobian; 0 when off-domain."""
    cdef int i, j, l
    cdef double complex d, inv, w, s, diag_r, ri
    for i in range(k):
        ri = 0.0
        diag_r = 0.0
        w = 1.0
        s = 0.0
        for l in range(n):
            d = t[i] - z[l]
            if d == 0:
                return 0
            inv = 1.0 / d
            ri = ri + m[l] * inv
            diag_r = diag_r - m[l] * inv * inv
            w = w * d
            s = s + inv
        for j in range(k):
            if j == i:
                continue
            d = t[i] - t[j]
            if d == 0:
                return 0
            inv = 1.0 / d
            ri = ri - 2.0 * inv
            diag_r = diag_r + 2.0 * inv * inv
            jg[i * k + j] = w * (-2.0 * inv * inv)
        r[i] = ri
        g[i] = w * ri
        jg[i * k + i] = w * diag_r + w * s * ri
        if not (isfinite(g[i].real) and isfinite(g[i].imag)):
            return 0
    for i in range(k * k):
        if not (isfinite(jg[i].real) and isfinite(jg[i].imag)):
            return 0
    return 1


cdef double min_gap(const double complex* t, int k, const double complex* z, int n) nogil:
    """Smallest distance from a root to a marked point or to another root."""
    cdef double out = INFINITY, d
    cdef int i, j
    for i in range(k):
        for j in range(n):
            d = cabs_(t[i] - z[j])
            if d < out:
                out = d
        for j in range(i + 1, k):
            d = cabs_(t[i] - t[j])
            if d < out:
                out = d
    return out


cdef double term_scale(const double complex* t, int k, const double complex* z, const double* m,
                       int n) nogil:
    """Largest sum of term magnitudes in one residual component."""
    cdef double out = 0.0, s
    cdef int i, j
    for i in range(k):
        s = 0.0
        for j in range(n):
            s += m[j] / cabs_(t[i] - z[j])
        for j in range(k):
            if j != i:
                s += 2.0 / cabs_(t[i] - t[j])
        if s > out:
            out = s
    return out


cdef int lu_solve(double complex* a, double complex* b, int k) nogil:
    """Solve ``a x = b`` in place (``b`` becomes ``x``); 0 when singular."""
    cdef int col, row, piv, c
    cdef double best, v
    cdef double complex tmp, fac
    for col in range(k):
        piv = col
        best = cabs_(a[col * k + col])
        for row in range(col + 1, k):
            v = cabs_(a[row * k + col])
            if v > best:
                best = v
                piv = row
        if best == 0.0 or best != best:
            return 0
        if piv != col:
            for c in range(k):
                tmp = a[col * k + c]
                a[col * k + c] = a[piv * k + c]
                a[piv * k + c] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
        for row in range(col + 1, k):
            fac = a[row * k + col] / a[col * k + col]
            if fac == 0:
                continue
            for c in range(col, k):
                a[row * k + c] = a[row * k + c] - fac * a[col * k + c]
            b[row] = b[row] - fac * b[col]
    for row in range(k - 1, -1, -1):
        tmp = b[row]
        for c in range(row + 1, k):
            tmp = tmp - a[row * k + c] * b[c]
        b[row] = tmp / a[row * k + row]
        if not (isfinite(b[row].real) and isfinite(b[row].imag)):
            return 0
    return 1


cdef int newton_core(double complex* t, int k, const double complex* z, const double* m, int n,
                     double complex center, double escape_radius, double collapse_radius,
                     double tol, int max_iter, double complex* work, int* iterations, double* residual) nogil:
    cdef double complex* r = work
    cdef double complex* g = work + k
    cdef double complex* jg = work + 2 * k
    cdef double complex* rn = work + 2 * k + k * k
    cdef double complex* gn = rn + k
    cdef double complex* jgn = gn + k
    cdef double complex* step = jgn + k * k
    cdef double complex* tn = step + k
    cdef double complex* lu = tn + k
    cdef double gnorm, rnorm, gtrial, rtrial, a, dist
    cdef int it = 0, i, accepted, p
    iterations[0] = 0
    residual[0] = INFINITY
    if not evaluate(t, k, z, m, n, r, g, jg):
        return 5
    gnorm = maxabs(g, k)
    rnorm = maxabs(r, k)
    while rnorm > tol:
        if it == max_iter:
            iterations[0] = it
            residual[0] = rnorm
            return 4
        it += 1
        for i in range(k * k):
            lu[i] = jg[i]
        for i in range(k):
            step[i] = -g[i]
        if not lu_solve(lu, step, k):
            iterations[0] = it
            residual[0] = rnorm
            return 1
        a = 1.0
        accepted = 0
        while a >= MIN_STEP:
            for i in range(k):
                tn[i] = t[i] + a * step[i]
            if evaluate(tn, k, z, m, n, rn, gn, jgn):
                gtrial = maxabs(gn, k)
                if gtrial < (1.0 - 0.25 * a) * gnorm:
                    accepted = 1
                    break
            a *= 0.5
        if not accepted:
            iterations[0] = it
            residual[0] = rnorm
            return 2
        for i in range(k):
            t[i] = tn[i]
            r[i] = rn[i]
            g[i] = gn[i]
        for i in range(k * k):
            jg[i] = jgn[i]
        gnorm = gtrial
        rnorm = maxabs(r, k)
        dist = 0.0
        for i in range(k):
            if cabs_(t[i] - center) > dist:
                dist = cabs_(t[i] - center)
        if dist > escape_radius:
            iterations[0] = it
            residual[0] = rnorm
            return 3
        if rnorm > tol and min_gap(t, k, z, n) < collapse_radius:
            iterations[0] = it
            residual[0] = rnorm
            return 5
    for p in range(POLISH_STEPS):
        for i in range(k * k):
            lu[i] = jg[i]
        for i in range(k):
            step[i] = -g[i]
        if not lu_solve(lu, step, k):
            break
        for i in range(k):
            tn[i] = t[i] + step[i]
        if not evaluate(tn, k, z, m, n, rn, gn, jgn):
            break
        rtrial = maxabs(rn, k)
        if not rtrial < rnorm:
            break
        for i in range(k):
            t[i] = tn[i]
            r[i] = rn[i]
            g[i] = gn[i]
        for i in range(k * k):
            jg[i] = jgn[i]
        rnorm = rtrial
    iterations[0] = it
    residual[0] = rnorm
    # a residual below tol means nothing if rounding in its terms exceeds tol
    if EPS * term_scale(t, k, z, m, n) > tol:
        return 5
    return 0


def bethe_residual(z, m, t):
    """Unscaled Bethe residual, or None when ``t`` is off the domain."""
    cdef double complex[::1] zv = np.ascontiguousarray(z, dtype=complex)
    cdef double[::1] mv = np.ascontiguousarray(m, dtype=float)
    cdef double complex[::1] tv = np.ascontiguousarray(t, dtype=complex)
    cdef int k = tv.shape[0], n = zv.shape[0]
    out = np.zeros(k, dtype=complex)
    if k == 0:
        return out
    cdef double complex[::1] rv = out
    scratch = np.zeros(k + k * k, dtype=complex)
    cdef double complex[::1] sv = scratch
    if not evaluate(&tv[0], k, &zv[0], &mv[0], n, &rv[0], &sv[0], &sv[k]):
        return None
    return out


def newton_bethe(z, m, t0, double complex center, double escape_radius, double collapse_radius,
                 double tol, int max_iter):
    """Damped Newton on the node-scaled Bethe system from one start.

    Returns ``(t, status, iterations, residual)``.
    """
    cdef double complex[::1] zv = np.ascontiguousarray(z, dtype=complex)
    cdef double[::1] mv = np.ascontiguousarray(m, dtype=float)
    t = np.array(t0, dtype=complex)
    cdef int k = t.shape[0], n = zv.shape[0]
    if k == 0:
        return t, 0, 0, 0.0
    cdef double complex[::1] tv = t
    work = np.zeros(6 * k + 3 * k * k, dtype=complex)
    cdef double complex[::1] wv = work
    cdef int iterations = 0, status
    cdef double residual = 0.0
    with nogil:
        status = newton_core(&tv[0], k, &zv[0], &mv[0], n, center, escape_radius, collapse_radius,
                             tol, max_iter, &wv[0], &iterations, &residual)
    return t, status, iterations, residual
