"""Master functions, the Bethe equations, Bethe vectors and eigenvalues.

For weights ``M``, distinct points ``z`` and level ``k`` the Bethe system is::

    sum_l m_l / (t_i - z_l) - sum_{j != i} 2 / (t_i - t_j) = 0,   i = 1..k

which is ``-dS/dt_i = 0`` for the multivalued master function ``S``.
"""
from __future__ import annotations

import itertools
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .errors import DomainCollapseWarning, DomainError, PreconditionError, UnderCountWarning
from .gaudin import PointConfig, as_points, hamiltonians
from .sl2rep import (TensorVector, WeightVector, act_e, as_weights, dim_sing_bruteforce,
                     dim_sing_formula, level_basis, shapovalov_inner)

DEFAULT_SEED = 20061015
#: symmetrizing over k! permutations is refused above this k
MAX_SYMMETRIZE_K = 8
EIGENPAIR_TOL = 1e-8
HESSIAN_TOL = 1e-8


@dataclass(frozen=True)
class ModelConfig:
    """One problem instance: weights ``M``, marked points ``z`` and level ``k``."""

    weights: WeightVector
    points: PointConfig
    k: int

    def __post_init__(self):
        weights, points = as_weights(self.weights), as_points(self.points)
        if weights.n != points.n:
            raise PreconditionError(f"{points.n} points given for {weights.n} weights")
        k = int(self.k)
        if k < 0 or weights.total - 2 * k < 0:
            raise PreconditionError(f"need 0 <= k <= |M|/2, got k={k}, |M|={weights.total}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "k", k)

    @classmethod
    def build(cls, m, z, k: int) -> "ModelConfig":
        return cls(WeightVector(tuple(m)), PointConfig(tuple(z)), k)

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def m_array(self) -> np.ndarray:
        return np.array(self.weights.m, dtype=float)

    @property
    def z_array(self) -> np.ndarray:
        return self.points.array()

    def expected_orbits(self) -> int:
        """``dim Sing_k``, the number of orbits for generic ``z``."""
        if self.n >= 2:
            return dim_sing_formula(self.weights, self.k)
        return dim_sing_bruteforce(self.weights, self.k)

    def to_json(self) -> dict:
        return {"m": list(self.weights.m), "z": [[c.real, c.imag] for c in self.points.z],
                "k": self.k}


def _canonical(t) -> tuple:
    return tuple(sorted((complex(x) for x in t), key=lambda c: (c.real, c.imag)))


def json_float(x: float):
    """JSON-safe float: infinities and NaN become None."""
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class CriticalOrbit:
    """An unordered solution ``t`` of the Bethe equations, stored sorted by (real, imag)."""

    t: tuple
    residual: float
    hessian_min_singular: float

    def __post_init__(self):
        object.__setattr__(self, "t", _canonical(self.t))

    @property
    def k(self) -> int:
        return len(self.t)

    def array(self) -> np.ndarray:
        return np.array(self.t, dtype=complex)

    def to_json(self) -> dict:
        return {"t": [[c.real, c.imag] for c in self.t], "residual": json_float(self.residual),
                "hessian_min_singular": json_float(self.hessian_min_singular)}


def orbit_distance(a, b) -> float:
    """Max-norm distance between two unordered tuples under the best matching."""
    a = np.asarray(a.t if isinstance(a, CriticalOrbit) else a, dtype=complex)
    b = np.asarray(b.t if isinstance(b, CriticalOrbit) else b, dtype=complex)
    if a.shape != b.shape:
        return math.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# -- master function ------------------------------------------------------------


def _as_t(t) -> np.ndarray:
    if isinstance(t, CriticalOrbit):
        t = t.t
    return np.asarray(t, dtype=complex).reshape(-1)


def check_domain(cfg: ModelConfig, t) -> np.ndarray:
    """Return ``t`` as an array, or raise DomainError off the domain."""
    t = _as_t(t)
    if len(t) != cfg.k:
        raise PreconditionError(f"expected {cfg.k} Bethe roots, got {len(t)}")
    z = cfg.z_array
    if np.any(t[:, None] == z[None, :]):
        raise DomainError("a Bethe root coincides with a marked point")
    if len(set(t.tolist())) != len(t):
        raise DomainError("Bethe roots are not pairwise distinct")
    return t


def bethe_residual(cfg: ModelConfig, t) -> np.ndarray:
    """``sum_l m_l/(t_i - z_l) - sum_{j != i} 2/(t_i - t_j)`` for each ``i``."""
    t = check_domain(cfg, t)
    r = kernels.bethe_residual(cfg.z_array, cfg.m_array, t)
    if r is None:
        raise DomainError("Bethe residual is not finite at this point")
    return r


def bethe_jacobian(cfg: ModelConfig, t) -> np.ndarray:
    """Derivative of :func:`bethe_residual` with respect to ``t``."""
    t = check_domain(cfg, t)
    z, m = cfg.z_array, cfg.m_array
    k = len(t)
    jac = np.zeros((k, k), dtype=complex)
    for i in range(k):
        jac[i, i] = -np.sum(m / (t[i] - z) ** 2)
        for j in range(k):
            if j != i:
                d2 = 2.0 / (t[i] - t[j]) ** 2
                jac[i, j] = -d2
                jac[i, i] += d2
    return jac


def master_hessian(cfg: ModelConfig, t) -> np.ndarray:
    """Second derivatives of ``S`` in ``t``; equals minus the residual Jacobian."""
    return -bethe_jacobian(cfg, t)


def hessian_min_singular(cfg: ModelConfig, t) -> float:
    if cfg.k == 0:
        return math.inf
    return float(np.linalg.svd(master_hessian(cfg, t), compute_uv=False).min())


def master_gradient(cfg: ModelConfig, t) -> np.ndarray:
    """``dS/dt_i``, which is minus the Bethe residual."""
    return -bethe_residual(cfg, t)


def master_log_value(cfg: ModelConfig, t, z=None) -> complex:
    """``S(t, z)`` on the principal branch of every logarithm.

    ``z`` overrides the marked points of ``cfg`` (used for derivatives in z).
    """
    t = _as_t(t)
    z = cfg.z_array if z is None else np.asarray(z, dtype=complex)
    m = cfg.m_array
    if np.any(t[:, None] == z[None, :]) or len(set(t.tolist())) != len(t):
        raise DomainError("point outside the domain of S")
    s = 0j
    n = len(z)
    for i in range(n):
        for j in range(i + 1, n):
            s += 0.5 * m[i] * m[j] * np.log(z[i] - z[j])
    for i in range(len(t)):
        s -= np.sum(m * np.log(t[i] - z))
        for j in range(i + 1, len(t)):
            s += 2.0 * np.log(t[i] - t[j])
    return complex(s)


def master_value_phi(cfg: ModelConfig, t) -> complex:
    """``prod (t_i - z_l)^(-m_l) * prod_{i<j} (t_i - t_j)^2``."""
    t = check_domain(cfg, t)
    z, m = cfg.z_array, cfg.weights.m
    out = 1.0 + 0j
    for i in range(len(t)):
        for l in range(len(z)):
            out /= (t[i] - z[l]) ** m[l]
        for j in range(i + 1, len(t)):
            out *= (t[i] - t[j]) ** 2
    return complex(out)


def eigenvalues_mu(cfg: ModelConfig, t) -> np.ndarray:
    """``mu_j = sum_{l != j} m_l m_j / (2 (z_j - z_l)) - sum_i m_j / (z_j - t_i)``."""
    t = _as_t(t)
    z, m = cfg.z_array, cfg.m_array
    mu = np.zeros(cfg.n, dtype=complex)
    for j in range(cfg.n):
        for l in range(cfg.n):
            if l != j:
                mu[j] += m[l] * m[j] / (2.0 * (z[j] - z[l]))
        mu[j] -= np.sum(m[j] / (z[j] - t))
    return mu


# -- solver ---------------------------------------------------------------------


def _env_threads() -> int:
    cap = os.environ.get("GW_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


@dataclass
class SolverOptions:
    """Multi-start Newton settings.

    ``max_starts`` defaults to ``200 * target``; ``threads`` defaults to the
    CPU count capped by the ``GW_THREADS`` environment variable.
    """

    tol: float = 1e-11
    cluster_eps: float = 1e-7
    radius_factor: float = 3.0
    max_starts: int | None = None
    seed: int = DEFAULT_SEED
    max_iter: int = 100
    escape_factor: float = 1e3
    collapse_factor: float = 1e-9
    threads: int | None = None

    @classmethod
    def from_mapping(cls, data: dict) -> "SolverOptions":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise PreconditionError(f"unknown solver options: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        return {"tol": self.tol, "cluster_eps": self.cluster_eps,
                "radius_factor": self.radius_factor, "max_starts": self.max_starts,
                "seed": self.seed, "max_iter": self.max_iter}


@dataclass
class SolveReport:
    config: ModelConfig
    options: SolverOptions
    orbits: list
    target: int
    starts_used: int
    status_counts: dict = field(default_factory=dict)

    @property
    def under_count(self) -> bool:
        return len(self.orbits) < self.target

    @property
    def domain_collapse(self) -> bool:
        bad = self.status_counts.get("domain", 0) + self.status_counts.get("escape", 0)
        return self.under_count and self.starts_used > 0 and bad > self.starts_used // 2

    def to_json(self) -> dict:
        return {"target": self.target, "found": len(self.orbits), "starts_used": self.starts_used,
                "status_counts": dict(sorted(self.status_counts.items())),
                "under_count": self.under_count, "domain_collapse": self.domain_collapse}


def _start_point(seed: int, index: int, k: int, center: complex, radius: float) -> np.ndarray:
    rng = np.random.default_rng([seed, index])
    r = radius * np.sqrt(rng.random(k))
    theta = 2.0 * np.pi * rng.random(k)
    return center + r * np.exp(1j * theta)


def solve_bethe_report(cfg: ModelConfig, opts: SolverOptions | None = None) -> SolveReport:
    """Multi-start damped Newton for all critical orbits, with diagnostics.

    Starts are uniform in a disc of radius ``radius_factor * spread(z)``
    around the centroid of ``z``; each start index has its own seeded
    generator, and outcomes are merged in start-index order, so the result
    does not depend on ``threads``. The search stops as soon as the number
    of distinct orbits reaches ``dim Sing_k``.
    """
    opts = opts or SolverOptions()
    target = cfg.expected_orbits()
    if cfg.k == 0:
        return SolveReport(cfg, opts, [CriticalOrbit((), 0.0, math.inf)], target, 0, {})
    if target == 0:
        return SolveReport(cfg, opts, [], 0, 0, {})
    z, m = cfg.z_array, cfg.m_array
    center = complex(z.mean())
    spread = float(np.abs(z - center).max()) or 1.0
    radius = opts.radius_factor * spread
    escape = opts.escape_factor * radius
    collapse = opts.collapse_factor * spread
    max_starts = opts.max_starts if opts.max_starts is not None else 200 * target
    threads = opts.threads or _env_threads()
    batch = max(8, 4 * threads)

    def run(index):
        t0 = _start_point(opts.seed, index, cfg.k, center, radius)
        return kernels.newton_bethe(z, m, t0, center, escape, collapse, opts.tol, opts.max_iter)

    found: list = []
    counts: dict = {}
    used = 0
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while used < max_starts and len(found) < target:
            indices = range(used, min(used + batch, max_starts))
            results = list(pool.map(run, indices)) if pool else [run(i) for i in indices]
            for t, status, _, resid in results:
                used += 1
                name = kernels.STATUS_NAMES[status]
                counts[name] = counts.get(name, 0) + 1
                if status == kernels.OK and resid <= opts.tol:
                    if all(orbit_distance(t, o) >= opts.cluster_eps for o in found):
                        found.append(CriticalOrbit(t, float(resid), hessian_min_singular(cfg, t)))
                        if len(found) == target:
                            break
    finally:
        if pool:
            pool.shutdown()
    found.sort(key=lambda o: tuple((c.real, c.imag) for c in o.t))
    return SolveReport(cfg, opts, found, target, used, counts)


def solve_bethe(cfg: ModelConfig, opts: SolverOptions | None = None) -> list:
    """Distinct critical orbits of the Bethe system.

    Emits :class:`UnderCountWarning` when fewer than ``dim Sing_k`` orbits
    were found within the start budget.
    """
    report = solve_bethe_report(cfg, opts)
    if report.under_count:
        warnings.warn(f"found {len(report.orbits)} of {report.target} orbits after "
                      f"{report.starts_used} starts", UnderCountWarning, stacklevel=2)
        if report.domain_collapse:
            warnings.warn("most starts left the configuration domain", DomainCollapseWarning,
                          stacklevel=2)
    return report.orbits


# -- Bethe vectors --------------------------------------------------------------


def bethe_coefficients(cfg: ModelConfig, t) -> np.ndarray:
    """Coefficients ``A_J`` on ``level_basis(M, k)``.

    Dividing the sum over all ``k!`` orderings by ``prod j_l!`` leaves one
    term per assignment of roots to tensor factors with ``j_l`` roots on
    factor ``l``. Those terms are the coefficients of
    ``prod_i sum_l y_l / (t_i - z_l)``, which is expanded one root at a time
    in an array indexed by ``J``.
    """
    t = check_domain(cfg, t)
    z, M = cfg.z_array, cfg.weights
    shape = tuple(x + 1 for x in M.m)
    acc = np.zeros(shape, dtype=complex)
    acc[(0,) * M.n] = 1.0
    for ti in t:
        w = 1.0 / (ti - z)
        nxt = np.zeros(shape, dtype=complex)
        for l in range(M.n):
            if M.m[l] == 0:
                continue
            dst = [slice(None)] * M.n
            src = [slice(None)] * M.n
            dst[l] = slice(1, None)
            src[l] = slice(None, -1)
            nxt[tuple(dst)] += w[l] * acc[tuple(src)]
        acc = nxt
    return np.array([acc[J] for J in level_basis(M, cfg.k)])


def bethe_coefficients_symmetrized(cfg: ModelConfig, t) -> np.ndarray:
    """Same coefficients by literal symmetrization over all ``k!`` permutations."""
    t = check_domain(cfg, t)
    if cfg.k > MAX_SYMMETRIZE_K:
        raise PreconditionError(f"k = {cfg.k} too large for explicit symmetrization")
    z = cfg.z_array
    perms = list(itertools.permutations(range(cfg.k)))
    out = []
    for J in level_basis(cfg.weights, cfg.k):
        slots = [l for l, j in enumerate(J) for _ in range(j)]
        total = 0j
        for p in perms:
            term = 1.0 + 0j
            for s, l in enumerate(slots):
                term /= t[p[s]] - z[l]
            total += term
        out.append(total / math.prod(math.factorial(j) for j in J))
    return np.array(out)


def bethe_vector(cfg: ModelConfig, orbit, method: str = "assign") -> TensorVector:
    """``v(t) = sum_{|J| = k} A_J(t, z) f^J v_M``.

    ``method="symmetrize"`` evaluates ``A_J`` by the k!-term sum (k <= 8).
    """
    if method == "assign":
        coeffs = bethe_coefficients(cfg, orbit)
    elif method == "symmetrize":
        coeffs = bethe_coefficients_symmetrized(cfg, orbit)
    else:
        raise PreconditionError(f"unknown method {method!r}")
    basis = level_basis(cfg.weights, cfg.k)
    return TensorVector(cfg.weights, dict(zip(basis, coeffs)), cfg.k)


@dataclass
class EigenpairReport:
    residuals: np.ndarray
    mu: np.ndarray
    singular_residual: float
    hessian_min_singular: float
    tol: float = EIGENPAIR_TOL

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals, initial=0.0))

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol and self.hessian_min_singular > HESSIAN_TOL

    def to_json(self) -> dict:
        return {"residuals": [float(x) for x in self.residuals],
                "max_residual": self.max_residual,
                "mu": [[float(c.real), float(c.imag)] for c in self.mu],
                "singular_residual": self.singular_residual,
                "hessian_min_singular": json_float(self.hessian_min_singular),
                "passed": self.passed}


def verify_eigenpair(cfg: ModelConfig, orbit: CriticalOrbit, hams=None) -> EigenpairReport:
    """Check ``H_j v = mu_j v`` for the Bethe vector of ``orbit``.

    ``r_j = |H_j v - mu_j v| / |v|`` with Euclidean norms of ``f^J``
    coordinates; ``hams`` may pass prebuilt level-``k`` hamiltonians.
    """
    v = bethe_vector(cfg, orbit)
    mu = eigenvalues_mu(cfg, orbit)
    basis = level_basis(cfg.weights, cfg.k)
    x = v.to_array(basis)
    hams = hams if hams is not None else hamiltonians(cfg.weights, cfg.points, level=cfg.k)
    norm = np.linalg.norm(x)
    res = np.array([np.linalg.norm(H.matrix @ x - mu[j] * x) / norm for j, H in enumerate(hams)])
    ev = act_e(v)
    sing = ev.max_abs() / v.max_abs()
    hess = orbit.hessian_min_singular if isinstance(orbit, CriticalOrbit) else \
        hessian_min_singular(cfg, orbit)
    return EigenpairReport(res, mu, float(sing), float(hess))


@dataclass
class GramReport:
    matrix: np.ndarray
    singular_values: np.ndarray

    @property
    def min_singular(self) -> float:
        return float(self.singular_values.min()) if self.singular_values.size else math.inf

    @property
    def condition(self) -> float:
        if not self.singular_values.size:
            return 1.0
        return float(self.singular_values.max() / self.singular_values.min())

    @property
    def nonsingular(self) -> bool:
        if not self.singular_values.size:
            return True
        return bool(self.min_singular > 1e-10 * self.singular_values.max())

    def to_json(self) -> dict:
        return {"size": int(self.matrix.shape[0]), "min_singular": json_float(self.min_singular),
                "condition": json_float(self.condition), "nonsingular": bool(self.nonsingular)}


def bethe_gram(cfg: ModelConfig, orbits) -> GramReport:
    """Shapovalov Gram matrix of the Bethe vectors, each scaled to max-entry 1."""
    vecs = []
    for o in orbits:
        v = bethe_vector(cfg, o)
        vecs.append(v * (1.0 / v.max_abs()))
    G = np.array([[complex(shapovalov_inner(a, b)) for b in vecs] for a in vecs], dtype=complex)
    G = G.reshape(len(vecs), len(vecs))
    sv = np.linalg.svd(G, compute_uv=False) if len(vecs) else np.zeros(0)
    return GramReport(G, sv)
