"""Pure-Python implementation of the Newton kernel (fallback for ``_kernels``).

Both implementations run the same algorithm; they differ only in floating
point summation order.
"""
import numpy as np

OK, SINGULAR, STALL, ESCAPE, MAXITER, DOMAIN = range(6)

_MIN_STEP = 2.0 ** -20
_POLISH_STEPS = 3
_EPS = np.finfo(float).eps

BACKEND = "python"


def _system(t, z, m):
    """Unscaled residual, node-scaled residual and its Jacobian, or None off-domain."""
    dz = t[:, None] - z[None, :]
    dt = t[:, None] - t[None, :]
    k = len(t)
    np.fill_diagonal(dt, 1.0)
    if not (np.all(dz != 0) and np.all(dt != 0)):
        return None
    inv_dz = 1.0 / dz
    inv_dt = 1.0 / dt
    np.fill_diagonal(inv_dt, 0.0)
    r = (m * inv_dz).sum(axis=1) - 2.0 * inv_dt.sum(axis=1)
    inv_dt2 = inv_dt * inv_dt
    jr = -2.0 * inv_dt2
    jr[np.diag_indices(k)] = -(m * inv_dz * inv_dz).sum(axis=1) + 2.0 * inv_dt2.sum(axis=1)
    w = np.prod(dz, axis=1)
    dw = w * inv_dz.sum(axis=1)
    g = w * r
    jg = w[:, None] * jr
    jg[np.diag_indices(k)] += dw * r
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(jg))):
        return None
    return r, g, jg


def _min_gap(t, z):
    gap = np.abs(t[:, None] - z[None, :]).min()
    if len(t) > 1:
        dt = np.abs(t[:, None] - t[None, :])
        gap = min(gap, dt[np.triu_indices(len(t), 1)].min())
    return gap


def _term_scale(t, z, m):
    """Largest sum of term magnitudes in one residual component."""
    dt = np.abs(t[:, None] - t[None, :])
    np.fill_diagonal(dt, np.inf)
    return float(((m / np.abs(t[:, None] - z[None, :])).sum(axis=1) + (2.0 / dt).sum(axis=1)).max())


def bethe_residual(z, m, t):
    z = np.asarray(z, dtype=complex)
    m = np.asarray(m, dtype=float)
    t = np.asarray(t, dtype=complex)
    out = _system(t, z, m)
    if out is None:
        return None
    return out[0]


def newton_bethe(z, m, t0, center, escape_radius, collapse_radius, tol, max_iter):
    """Damped Newton on the node-scaled Bethe system from one start.

    Returns ``(t, status, iterations, residual)`` where ``residual`` is the
    max-norm of the unscaled Bethe residual at the returned point. Iterates
    that come within ``collapse_radius`` of a marked point or of each other
    stop with status ``DOMAIN``; those farther than ``escape_radius`` from
    ``center`` stop with ``ESCAPE``.
    """
    z = np.asarray(z, dtype=complex)
    m = np.asarray(m, dtype=float)
    t = np.array(t0, dtype=complex)
    if t.size == 0:
        return t, OK, 0, 0.0
    sysval = _system(t, z, m)
    if sysval is None:
        return t, DOMAIN, 0, np.inf
    r, g, jg = sysval
    gnorm = np.abs(g).max(initial=0.0)
    rnorm = np.abs(r).max(initial=0.0)
    it = 0
    while rnorm > tol:
        if it == max_iter:
            return t, MAXITER, it, rnorm
        it += 1
        try:
            step = np.linalg.solve(jg, -g)
        except np.linalg.LinAlgError:
            return t, SINGULAR, it, rnorm
        if not np.all(np.isfinite(step)):
            return t, SINGULAR, it, rnorm
        a = 1.0
        while a >= _MIN_STEP:
            tn = t + a * step
            trial = _system(tn, z, m)
            if trial is not None:
                gn = np.abs(trial[1]).max(initial=0.0)
                if gn < (1.0 - 0.25 * a) * gnorm:
                    break
            a *= 0.5
        else:
            return t, STALL, it, rnorm
        t = tn
        r, g, jg = trial
        gnorm = gn
        rnorm = np.abs(r).max(initial=0.0)
        if np.abs(t - center).max(initial=0.0) > escape_radius:
            return t, ESCAPE, it, rnorm
        if rnorm > tol and _min_gap(t, z) < collapse_radius:
            return t, DOMAIN, it, rnorm
    for _ in range(_POLISH_STEPS):
        try:
            step = np.linalg.solve(jg, -g)
        except np.linalg.LinAlgError:
            break
        tn = t + step
        trial = _system(tn, z, m)
        if trial is None:
            break
        rn = np.abs(trial[0]).max(initial=0.0)
        if not rn < rnorm:
            break
        t, (r, g, jg), rnorm = tn, trial, rn
    # a residual below tol means nothing if rounding in its terms exceeds tol
    if _EPS * _term_scale(t, z, m) > tol:
        return t, DOMAIN, it, rnorm
    return t, OK, it, rnorm
