"""Critical orbits as planes of polynomials, and the second-order equation they solve.

An orbit ``t`` gives ``F = prod (x - t_i)``; the unique plane containing
``F`` with Wronskian ``W = prod (x - z_j)^{m_j}`` is nondegenerate, and its
members solve::

    node(x) u'' + G(x) u' + H(x) u = 0,   node = prod (x - z_j),
    G / node = -sum m_j / (x - z_j),     deg H <= n - 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bethe import (CriticalOrbit, ModelConfig, SolverOptions, eigenvalues_mu, json_float,
                    orbit_distance, solve_bethe_report)
from .errors import DegeneratePlaneError, DivisionRemainderError, PreconditionError
from .gaudin import PointConfig, as_points
from .polywron import (Polynomial, PolyPlane, is_nondegenerate_plane, is_squarefree,
                       max_vanishing_order, plane_wronskian, recover_plane)
from .sl2rep import WeightVector, as_weights, wronski_bound

WF_TOL = 1e-8
REMAINDER_TOL = 1e-8
EQUATION_TOL = 1e-8
MU_SEPARATION = 1e-6
N_SAMPLES = 20
SAMPLE_SEED = 7
POINT_TOL = 1e-10


def _exact_scalar(c) -> bool:
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


@dataclass(frozen=True, eq=False)
class WronskianSpec:
    """Marked points, their multiplicities and ``W = prod (x - z_j)^{m_j}``.

    ``W`` is rational when every point is an int or Fraction.
    """

    z: PointConfig
    m: WeightVector
    W: Polynomial
    raw_points: tuple = ()

    @classmethod
    def build(cls, m, z) -> "WronskianSpec":
        m = as_weights(m)
        raw = tuple(z)
        if len(raw) != m.n:
            raise PreconditionError(f"{len(raw)} points given for {m.n} weights")
        kind = "rational" if all(_exact_scalar(c) for c in raw) else "complex"
        W = Polynomial.from_roots([c for c, mj in zip(raw, m.m) for _ in range(mj)], kind=kind)
        return cls(as_points(raw), m, W, raw)

    @classmethod
    def from_config(cls, cfg: ModelConfig) -> "WronskianSpec":
        return cls.build(cfg.weights, cfg.points.z)

    @property
    def infinity_multiplicity(self) -> int:
        """``m_inf = |M| - 2k`` as a function of ``k``."""
        return self.m.total

    def node_poly(self) -> Polynomial:
        pts = self.raw_points or self.z.z
        kind = self.W.kind
        return Polynomial.from_roots(pts, kind=kind)

    def first_order_coeff(self) -> Polynomial:
        """``G = -sum_j m_j prod_{l != j} (x - z_l)``."""
        pts = self.raw_points or self.z.z
        kind = self.W.kind
        G = Polynomial.zero(kind)
        for j, mj in enumerate(self.m.m):
            G = G - Polynomial.from_roots(pts[:j] + pts[j + 1:], kind=kind) * mj
        return G


@dataclass(frozen=True, eq=False)
class FuchsianEquation:
    """``node u'' + G u' + H u = 0`` with regular singular points at the nodes."""

    node_poly: Polynomial
    first_order_coeff: Polynomial
    van_vleck: Polynomial
    weights: WeightVector

    def __post_init__(self):
        n = self.node_poly.degree
        if self.van_vleck.degree > max(n - 2, 0):
            raise PreconditionError(f"deg H = {self.van_vleck.degree} exceeds n - 2 = {n - 2}")

    def exponents(self) -> list:
        """Prescribed exponents ``(0, m_j + 1)`` at each node."""
        return [(0, mj + 1) for mj in self.weights.m]

    def indicial_exponents(self, nodes) -> list:
        """Exponents ``(0, 1 - G(z_j)/node'(z_j))`` read off the coefficients."""
        dn = self.node_poly.derivative()
        return [(0, 1 - self.first_order_coeff(zj) / dn(zj)) for zj in nodes]

    def residual(self, u: Polynomial, x) -> float:
        """``|node u'' + G u' + H u|`` over the sum of the term sizes at ``x``."""
        du = u.derivative()
        terms = [self.node_poly(x) * du.derivative()(x), self.first_order_coeff(x) * du(x),
                 self.van_vleck(x) * u(x)]
        scale = sum(abs(c) for c in terms)
        return float(abs(sum(terms)) / scale) if scale else 0.0

    def to_json(self) -> dict:
        return {"node_poly": self.node_poly.to_json(),
                "first_order_coeff": self.first_order_coeff.to_json(),
                "van_vleck": self.van_vleck.to_json(),
                "exponents": [list(e) for e in self.exponents()]}


# -- orbits and planes ----------------------------------------------------------


def orbit_to_small_polynomial(orbit) -> Polynomial:
    t = orbit.t if isinstance(orbit, CriticalOrbit) else tuple(orbit)
    if not t:
        return Polynomial.constant(1)
    return Polynomial.from_roots(t)


def orbit_to_plane(spec: WronskianSpec, orbit, k: int | None = None) -> PolyPlane:
    """Plane containing ``prod (x - t_i)`` with Wronskian ``W``.

    Raises
    ------
    NoSolutionError
        If ``orbit`` is not a critical orbit for ``spec``.
    """
    F = orbit_to_small_polynomial(orbit)
    if k is not None and F.degree != k:
        raise PreconditionError(f"orbit has {F.degree} roots, expected k = {k}")
    W = spec.W if F.exact else spec.W.to_complex()
    return recover_plane(F, W)


def _wf_data(V: PolyPlane, t: np.ndarray, spec: WronskianSpec | None):
    """``W'/W`` and ``F''/F'`` at the roots, plus ``-(W'/W)'``.

    With ``spec`` the logarithmic derivatives of ``W`` come from its
    factored form; otherwise from the expanded Wronskian of ``V``.
    """
    F = V.small.to_complex()
    dF, d2F = F.derivative(), F.derivative().derivative()
    lw, lf, q = [], [], []
    if spec is not None:
        z, m = spec.z.array(), np.array(spec.m.m, dtype=float)
    else:
        W = plane_wronskian(V).to_complex()
        dW, d2W = W.derivative(), W.derivative().derivative()
    for ti in t:
        if dF(ti) == 0:
            raise DegeneratePlaneError("the small member has a repeated root")
        if spec is not None:
            if np.abs(ti - z).min() <= POINT_TOL * max(1.0, abs(ti)):
                raise DegeneratePlaneError("a root of the small member is a marked point")
            lw.append(np.sum(m / (ti - z)))
            q.append(np.sum(m / (ti - z) ** 2))
        else:
            w, dw = W(ti), dW(ti)
            if w == 0:
                raise DegeneratePlaneError("a root of the small member is a root of W")
            lw.append(dw / w)
            q.append((dw * dw - w * d2W(ti)) / (w * w))
        lf.append(d2F(ti) / dF(ti))
    return np.array(lw), np.array(lf), np.array(q)


def plane_to_orbit(V: PolyPlane, spec: WronskianSpec | None = None,
                   tol: float = WF_TOL) -> CriticalOrbit:
    """Roots of the small member, checked against ``W'/W = F''/F'`` at each root.

    ``W`` is the Wronskian declared by ``spec``, or ``Wr(V)`` when omitted.
    With ``spec``, genericity is tested as "no root of the small member is a
    marked point": ``Wr(F, G)(t) = -F'(t) G(t)`` at a root ``t`` of ``F``, so
    ``G(t) = 0`` exactly when ``W(t) = 0``. This avoids reading ``G(t)`` off
    expanded coefficients, which is ill-conditioned near clustered points.
    Bethe residual and Hessian need only ``W``, since
    ``sum_l m_l/(t - z_l) = W'/W(t)`` and ``sum_{j != i} 2/(t_i - t_j) = F''/F'(t_i)``.

    Raises
    ------
    DegeneratePlaneError
        If ``V`` is degenerate or the root condition fails.
    """
    if V.order == 0:
        return CriticalOrbit((), 0.0, math.inf)
    if spec is None and not is_nondegenerate_plane(V):
        raise DegeneratePlaneError("plane is degenerate")
    if spec is not None and not is_squarefree(V.small):
        raise DegeneratePlaneError("the small member has a multiple root")
    t = V.small.roots()
    lw, lf, q = _wf_data(V, t, spec)
    scale = np.maximum(np.maximum(np.abs(lw), np.abs(lf)), 1.0)
    err = np.abs(lw - lf) / scale
    if err.max() > tol:
        raise DegeneratePlaneError(f"root condition violated: relative error {err.max():.3e}")
    k = len(t)
    hess = np.zeros((k, k), dtype=complex)
    for i in range(k):
        hess[i, i] = q[i]
        for j in range(k):
            if j != i:
                c = 2.0 / (t[i] - t[j]) ** 2
                hess[i, j] = c
                hess[i, i] -= c
    smin = float(np.linalg.svd(hess, compute_uv=False).min())
    return CriticalOrbit(tuple(t), float(np.abs(lw - lf).max()), smin)


def flag_orders(spec: WronskianSpec, V: PolyPlane) -> list:
    """Largest vanishing order at each ``z_j`` among members of ``V``."""
    return [max_vanishing_order(V, zj) for zj in (spec.raw_points or spec.z.z)]


def flag_membership(spec: WronskianSpec, V: PolyPlane) -> bool:
    """Does ``V`` contain a member divisible by ``(x - z_j)^{m_j + 1}`` for every ``j``?"""
    return all(o >= mj + 1 for o, mj in zip(flag_orders(spec, V), spec.m.m))


# -- Fuchsian equation -----------------------------------------------------------


def _sample_points(spec: WronskianSpec, count: int = N_SAMPLES, seed: int = SAMPLE_SEED):
    z = spec.z.array()
    center = z.mean()
    spread = float(np.abs(z - center).max()) or 1.0
    rng = np.random.default_rng(seed)
    return center + spread * (rng.normal(size=count) + 1j * rng.normal(size=count))


def fuchsian_from_plane(spec: WronskianSpec, V: PolyPlane, tol: float = REMAINDER_TOL,
                        check_tol: float = EQUATION_TOL) -> FuchsianEquation:
    """Equation solved by ``V``: ``H = -(node f'' + G f') / f`` for the small member ``f``.

    Raises
    ------
    DivisionRemainderError
        If the division leaves a remainder, ``deg H > n - 2``, or a basis
        member fails the equation at the sample points.
    """
    exact = V.kind == "rational" and spec.W.exact
    node, G = spec.node_poly(), spec.first_order_coeff()
    f = V.small
    if not exact:
        node, G, f = node.to_complex(), G.to_complex(), f.to_complex()
    df = f.derivative()
    num = -(node * df.derivative() + G * df)
    H, rem = divmod(num, f)
    if exact:
        if not rem.is_zero:
            raise DivisionRemainderError("van Vleck division is not exact")
    else:
        scale = max((abs(c) for c in num.coeffs), default=0.0) or 1.0
        err = max((abs(c) for c in rem.coeffs), default=0.0) / scale
        if err > tol:
            raise DivisionRemainderError(f"van Vleck division remainder {err:.3e}")
        H = H.trim(1e-13)
    n = spec.m.n
    if H.degree > max(n - 2, 0):
        raise DivisionRemainderError(f"deg H = {H.degree} exceeds n - 2")
    eq = FuchsianEquation(node, G, H, spec.m)
    worst = max(eq.residual(u, x) for u in (V.small, V.big) for x in _sample_points(spec))
    if worst > check_tol:
        raise DivisionRemainderError(f"plane members miss the equation by {worst:.3e}")
    return eq


def van_vleck_at_nodes(cfg: ModelConfig, orbit) -> np.ndarray:
    """``H(z_j) = m_j (f'/f)(z_j) prod_{l != j} (z_j - z_l)`` with ``f'/f = sum 1/(x - t_i)``."""
    t = np.asarray(orbit.t if isinstance(orbit, CriticalOrbit) else orbit, dtype=complex)
    z, m = cfg.z_array, cfg.m_array
    out = np.zeros(cfg.n, dtype=complex)
    for j in range(cfg.n):
        out[j] = m[j] * np.sum(1.0 / (z[j] - t)) * np.prod(np.delete(z[j] - z, j))
    return out


def van_vleck_from_mu(cfg: ModelConfig, mu) -> np.ndarray:
    """Node values of ``H`` recovered from an eigenvalue tuple alone."""
    z, m = cfg.z_array, cfg.m_array
    mu = np.asarray(mu, dtype=complex)
    out = np.zeros(cfg.n, dtype=complex)
    for j in range(cfg.n):
        base = sum(m[l] * m[j] / (2.0 * (z[j] - z[l])) for l in range(cfg.n) if l != j)
        out[j] = (base - mu[j]) * np.prod(np.delete(z[j] - z, j))
    return out


def lagrange_interpolate(xs, ys) -> Polynomial:
    """The polynomial of degree < len(xs) through the points ``(xs[i], ys[i])``."""
    xs, ys = list(xs), list(ys)
    kind = "rational" if all(_exact_scalar(c) for c in xs + ys) else "complex"
    out = Polynomial.zero(kind)
    for j, (xj, yj) in enumerate(zip(xs, ys)):
        others = xs[:j] + xs[j + 1:]
        basis = Polynomial.from_roots(others, kind=kind)
        denom = 1
        for xl in others:
            denom *= xj - xl
        out = out + basis * (yj / denom)
    return out


@dataclass
class InjectivityReport:
    mu: list
    pair_mu_separation: list
    pair_orbit_distance: list
    pair_node_separation: list
    interpolation_error: list
    node_mu_error: list
    cluster_eps: float
    tol: float = MU_SEPARATION

    @property
    def min_mu_separation(self) -> float:
        seps = [s for s, d in zip(self.pair_mu_separation, self.pair_orbit_distance)
                if d > self.cluster_eps]
        return min(seps, default=math.inf)

    @property
    def passed(self) -> bool:
        consistent = all(e <= EQUATION_TOL for e in self.interpolation_error + self.node_mu_error)
        return self.min_mu_separation > self.tol and consistent

    def to_json(self) -> dict:
        return {"orbits": len(self.mu), "min_mu_separation": json_float(self.min_mu_separation),
                "max_interpolation_error": max(self.interpolation_error, default=0.0),
                "max_node_mu_error": max(self.node_mu_error, default=0.0),
                "passed": self.passed}


def eigenvalue_injectivity_check(cfg: ModelConfig, orbits, cluster_eps: float = 1e-7) -> InjectivityReport:
    """Distinct orbits must carry distinct eigenvalue tuples.

    For each orbit, the node values of ``H`` computed from ``mu`` are
    compared with those computed from ``t``, and the interpolant through
    all ``n`` nodes is compared with the van Vleck polynomial of the
    plane; its top coefficient must vanish since ``deg H <= n - 2``.
    """
    spec = WronskianSpec.from_config(cfg)
    mus, interp_err, node_err, nodes = [], [], [], []
    for o in orbits:
        mu = eigenvalues_mu(cfg, o)
        h_nodes = van_vleck_at_nodes(cfg, o)
        h_mu = van_vleck_from_mu(cfg, mu)
        scale = max(np.abs(h_nodes).max(), 1.0)
        node_err.append(float(np.abs(h_nodes - h_mu).max() / scale))
        eq = fuchsian_from_plane(spec, orbit_to_plane(spec, o))
        interp = lagrange_interpolate(list(cfg.points.z), list(h_mu))
        interp_err.append(interp.max_coeff_error(eq.van_vleck.to_complex()) if interp.degree >= 0
                          else float(np.abs(eq.van_vleck.to_numpy()).max(initial=0.0)) / scale)
        mus.append(mu)
        nodes.append(h_nodes)
    seps, dists, nseps = [], [], []
    for a in range(len(orbits)):
        for b in range(a + 1, len(orbits)):
            seps.append(float(np.abs(mus[a] - mus[b]).max()))
            dists.append(orbit_distance(orbits[a], orbits[b]))
            nseps.append(float(np.abs(nodes[a] - nodes[b]).max()))
    return InjectivityReport(mus, seps, dists, nseps, interp_err, node_err, cluster_eps)


# -- census ----------------------------------------------------------------------


@dataclass
class CensusReport:
    spec: WronskianSpec
    k: int
    orbits: list
    planes: list
    wronskian_error: float
    round_trip_error: float
    schubert_bound: int
    target: int
    under_count: bool
    flags_ok: bool
    options: SolverOptions = field(default_factory=SolverOptions)

    @property
    def count(self) -> int:
        return len(self.planes)

    @property
    def equality_flag(self) -> bool:
        return self.count == self.schubert_bound

    @property
    def degrees(self) -> list:
        return sorted({V.degree for V in self.planes})

    @property
    def smaller_degree_planes(self) -> int:
        d = self.spec.m.total + 1 - self.k
        return sum(1 for V in self.planes if V.degree < d)

    def to_json(self) -> dict:
        return {"orbits": [o.to_json() for o in self.orbits],
                "planes": [V.to_json() for V in self.planes],
                "wronskian_error": self.wronskian_error,
                "round_trip_error": self.round_trip_error,
                "schubert_bound": self.schubert_bound, "count": self.count,
                "equality_flag": self.equality_flag, "target": self.target,
                "under_count": self.under_count, "flag_membership": self.flags_ok,
                "degrees": self.degrees, "smaller_degree_planes": self.smaller_degree_planes,
                "order_zero": self.k == 0}


def preimage_census(spec: WronskianSpec, k: int, opts: SolverOptions | None = None) -> CensusReport:
    """Planes of order ``k`` with Wronskian ``W``, counted against the Schubert bound.

    ``k = 0`` is accepted and reported with ``order_zero`` set.
    """
    total = spec.m.total
    if not 0 <= k < total + 1 - k:
        raise PreconditionError(f"need 0 <= k < |M| + 1 - k, got k={k}, |M|={total}")
    cfg = ModelConfig(spec.m, spec.z, k)
    report = solve_bethe_report(cfg, opts)
    return census_from_orbits(spec, k, report.orbits, report.target, report.options)


def census_from_orbits(spec: WronskianSpec, k: int, orbits, target: int | None = None,
                       opts: SolverOptions | None = None) -> CensusReport:
    """Census built from orbits that were already solved for ``(spec, k)``."""
    if target is None:
        target = ModelConfig(spec.m, spec.z, k).expected_orbits()
    planes, werr, rerr, flags = [], 0.0, 0.0, True
    for o in orbits:
        V = orbit_to_plane(spec, o, k)
        planes.append(V)
        werr = max(werr, plane_wronskian(V).max_coeff_error(spec.W.to_complex()))
        rerr = max(rerr, orbit_distance(plane_to_orbit(V, spec), o))
        flags = flags and flag_membership(spec, V)
    return CensusReport(spec, k, list(orbits), planes, werr, rerr, wronski_bound(spec.m, k),
                        target, len(orbits) < target, flags, opts or SolverOptions())
