"""The acceptance suite, shared by ``selftest`` and the test-suite.

Each criterion is a function of an :class:`AcceptanceRun`, which caches
the seeded random instances and their solved orbits so that criteria 5-10
reuse one solve per instance.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bethe import (DEFAULT_SEED, ModelConfig, SolverOptions, bethe_gram, eigenvalues_mu,
                    master_gradient, master_log_value, master_value_phi, solve_bethe_report,
                    verify_eigenpair)
from .gaudin import commutator_defect, hamiltonians, invariance_residual, shapovalov_symmetry_defect
from .heine_stieltjes import (WronskianSpec, census_from_orbits, eigenvalue_injectivity_check,
                              orbit_to_plane)
from .polywron import Polynomial, PolyPlane, discriminant, plane_wronskian, resultant
from .sl2rep import (dim_sing_bruteforce, dim_sing_formula, schubert_formula,
                     schubert_special_intersection, singular_basis, wronski_bound)

ACCEPTANCE_SEED = DEFAULT_SEED
N_INSTANCES = 20
N_POINTS = 100
FD_STEP = 1e-6


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:>2}. {self.name} ({self.seconds:.1f} s)"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": bool(self.passed),
                "seconds": round(self.seconds, 3), "detail": self.detail}


def random_instances(count: int = N_INSTANCES, seed: int = ACCEPTANCE_SEED) -> list:
    """Generic instances: n in {3, 4}, m_i in 1..3, 1 <= k <= min(4, |M|/2), normal complex z."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.choice([3, 4]))
        m = tuple(int(x) for x in rng.integers(1, 4, size=n))
        k = int(rng.integers(1, min(4, sum(m) // 2) + 1))
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        out.append(ModelConfig.build(m, z, k))
    return out


def weight_sweep(n_range=range(2, 6), max_weight: int = 4):
    """Every ``(M, k)`` with ``n`` in ``n_range``, ``0 <= m_i <= max_weight``, ``0 <= k <= |M|/2``."""
    for n in n_range:
        for m in itertools.product(range(max_weight + 1), repeat=n):
            for k in range(sum(m) // 2 + 1):
                yield m, k


def schubert_tuples(max_classes: int = 6, max_d: int = 10):
    """Ordered ``(q, d)`` with ``3 <= len(q) <= max_classes``, ``0 <= q_i <= d - 1``, ``sum q = 2d - 2``."""

    def compositions(total, parts, cap):
        if parts == 1:
            if total <= cap:
                yield (total,)
            return
        for first in range(min(total, cap) + 1):
            for rest in compositions(total - first, parts - 1, cap):
                yield (first,) + rest

    for d in range(1, max_d + 1):
        for s in range(3, max_classes + 1):
            for q in compositions(2 * d - 2, s, d - 1):
                yield q, d


def _unwrapped_difference(a: complex, b: complex) -> complex:
    """``a - b`` with branch jumps of the logarithms (multiples of pi i) removed."""
    d = a - b
    return d - 1j * math.pi * round(d.imag / math.pi)


def fd_gradient_t(cfg: ModelConfig, t, h: float = FD_STEP) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    out = np.zeros(len(t), dtype=complex)
    for i in range(len(t)):
        e = np.zeros(len(t), dtype=complex)
        e[i] = h
        out[i] = _unwrapped_difference(master_log_value(cfg, t + e),
                                       master_log_value(cfg, t - e)) / (2 * h)
    return out


def fd_gradient_z(cfg: ModelConfig, t, h: float = FD_STEP) -> np.ndarray:
    z = cfg.z_array
    out = np.zeros(len(z), dtype=complex)
    for j in range(len(z)):
        e = np.zeros(len(z), dtype=complex)
        e[j] = h
        out[j] = _unwrapped_difference(master_log_value(cfg, t, z + e),
                                       master_log_value(cfg, t, z - e)) / (2 * h)
    return out


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(a).max(), 1e-300))


class AcceptanceRun:
    """Seeded instances plus lazily solved orbits, shared across criteria."""

    def __init__(self, seed: int = ACCEPTANCE_SEED, count: int = N_INSTANCES,
                 options: SolverOptions | None = None):
        self.seed = seed
        self.count = count
        self.options = options or SolverOptions()
        self._solved = None
        self.solve_seconds = 0.0

    @cached_property
    def instances(self) -> list:
        return random_instances(self.count, self.seed)

    @property
    def solved(self) -> list:
        if self._solved is None:
            t0 = time.perf_counter()
            self._solved = [solve_bethe_report(cfg, self.options) for cfg in self.instances]
            self.solve_seconds = time.perf_counter() - t0
        return self._solved


# -- criteria --------------------------------------------------------------------


def criterion_1(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    checked, bad = 0, []
    for m, k in weight_sweep():
        f = dim_sing_formula(m, k)
        b = dim_sing_bruteforce(m, k)
        r = len(singular_basis(m, k, exact=True))
        checked += 1
        if not f == b == r:
            bad.append([list(m), k, f, b, r])
    secs = time.perf_counter() - t0
    return CheckResult(1, "dimension triple agreement", not bad and secs < 30,
                       {"pairs": checked, "mismatches": bad[:10], "budget_s": 30}, secs)


def criterion_2(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    checked, bad = 0, []
    for q, d in schubert_tuples():
        a, b = schubert_formula(q, d), schubert_special_intersection(q, d)
        checked += 1
        if a != b:
            bad.append([list(q), d, a, b])
    four_lines = (schubert_formula((1, 1, 1, 1), 3), schubert_special_intersection((1, 1, 1, 1), 3))
    ok = not bad and four_lines == (2, 2)
    return CheckResult(2, "Schubert identity", ok,
                       {"tuples": checked, "mismatches": bad[:10], "four_lines": list(four_lines)},
                       time.perf_counter() - t0)


def criterion_3(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    checked, zero_class, bad = 0, 0, []
    for m, k in weight_sweep():
        if k < 1:
            continue
        f, s = dim_sing_formula(m, k), wronski_bound(m, k)
        checked += 1
        if max(m) > sum(m) - k:
            zero_class += 1
        if f != s:
            bad.append([list(m), k, f, s])
    return CheckResult(3, "bridge identity", not bad,
                       {"pairs": checked, "zero_class_pairs": zero_class, "mismatches": bad[:10]},
                       time.perf_counter() - t0)


def criterion_4(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    cfg = ModelConfig.build((1, 1), (0, 1), 1)
    report = solve_bethe_report(cfg, run.options)
    detail = {"orbits": len(report.orbits)}
    ok = len(report.orbits) == 1
    if ok:
        o = report.orbits[0]
        mu = eigenvalues_mu(cfg, o)
        pair = verify_eigenpair(cfg, o)
        spec = WronskianSpec.from_config(cfg)
        V = orbit_to_plane(spec, o)
        expected = PolyPlane(Polynomial([-0.5, 1.0]), Polynomial([0.0, 0.0, 1.0]))
        werr = plane_wronskian(V).max_coeff_error(spec.W.to_complex())
        detail.update(t_error=abs(o.t[0] - 0.5), mu_error=float(np.abs(mu - [1.5, -1.5]).max()),
                      eigenpair_residual=pair.max_residual, wronskian_error=werr,
                      plane_matches=V.isclose(expected, rtol=1e-12, atol=1e-12))
        ok = (detail["t_error"] <= 1e-10 and detail["mu_error"] <= 1e-10
              and pair.max_residual <= 1e-12 and werr <= 1e-12 and detail["plane_matches"])
    return CheckResult(4, "canonical instance", ok, detail, time.perf_counter() - t0)


def criterion_5(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    rows, ok = [], True
    for cfg, rep in zip(run.instances, run.solved):
        hams = hamiltonians(cfg.weights, cfg.points, level=cfg.k)
        resid = max((verify_eigenpair(cfg, o, hams).max_residual for o in rep.orbits), default=0.0)
        gram = bethe_gram(cfg, rep.orbits)
        good = len(rep.orbits) == rep.target and resid <= 1e-8 and gram.nonsingular
        ok = ok and good
        rows.append({"m": list(cfg.weights.m), "k": cfg.k, "target": rep.target,
                     "found": len(rep.orbits), "max_eigenpair_residual": resid,
                     "gram_min_singular": gram.min_singular, "gram_condition": gram.condition,
                     "passed": good})
    secs = time.perf_counter() - t0 + run.solve_seconds
    return CheckResult(5, "completeness and basis", ok and secs < 300,
                       {"instances": rows, "budget_s": 300}, secs)


def criterion_6(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    rows = []
    for cfg, rep in zip(run.instances, run.solved):
        rows.append(eigenvalue_injectivity_check(cfg, rep.orbits, run.options.cluster_eps).to_json())
    return CheckResult(6, "simple spectrum", all(r["passed"] for r in rows), {"instances": rows},
                       time.perf_counter() - t0)


def criterion_7(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    rows, ok = [], True
    for cfg, rep in zip(run.instances, run.solved):
        c = census_from_orbits(WronskianSpec.from_config(cfg), cfg.k, rep.orbits, rep.target)
        good = c.round_trip_error <= 1e-9 and c.wronskian_error <= 1e-9 and c.equality_flag
        ok = ok and good
        rows.append({"round_trip_error": c.round_trip_error, "wronskian_error": c.wronskian_error,
                     "count": c.count, "schubert_bound": c.schubert_bound, "passed": good})
    return CheckResult(7, "orbit-plane round trip", ok, {"instances": rows},
                       time.perf_counter() - t0)


def criterion_8(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(run.seed + 8)
    grad_err = phi_err = 0.0
    for i in range(N_POINTS):
        cfg = run.instances[i % len(run.instances)]
        t = rng.normal(size=cfg.k) + 1j * rng.normal(size=cfg.k)
        grad_err = max(grad_err, _rel(master_gradient(cfg, t), fd_gradient_t(cfg, t)))
        W = Polynomial.from_roots([zj for zj, mj in zip(cfg.points.z, cfg.weights.m)
                                   for _ in range(mj)])
        F = Polynomial.from_roots(t)
        phi = master_value_phi(cfg, t)
        phi_err = max(phi_err, abs(phi - discriminant(F) / resultant(W, F)) / abs(phi))
    mu_err, mu_points = 0.0, 0
    for cfg, rep in zip(run.instances, run.solved):
        for o in rep.orbits:
            mu_err = max(mu_err, _rel(eigenvalues_mu(cfg, o), fd_gradient_z(cfg, o.array())))
            mu_points += 1
    ok = grad_err <= 1e-6 and mu_err <= 1e-6 and phi_err <= 1e-10
    return CheckResult(8, "analytic consistency", ok,
                       {"gradient_rel_error": grad_err, "mu_rel_error": mu_err,
                        "mu_points": mu_points, "phi_rel_error": phi_err, "points": N_POINTS},
                       time.perf_counter() - t0)


def criterion_9(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    comm = sym = inv = 0.0
    for cfg in run.instances:
        full = hamiltonians(cfg.weights, cfg.points)
        for a, b in itertools.combinations(full, 2):
            comm = max(comm, commutator_defect(a, b))
        sym = max(sym, max(shapovalov_symmetry_defect(H) for H in full))
        sing = singular_basis(cfg.weights, cfg.k)
        for H in hamiltonians(cfg.weights, cfg.points, level=cfg.k):
            inv = max(inv, invariance_residual(H, sing))
    ok = comm <= 1e-10 and sym <= 1e-10 and inv <= 1e-10
    return CheckResult(9, "structural operator checks", ok,
                       {"commutator": comm, "shapovalov_symmetry": sym, "invariance": inv},
                       time.perf_counter() - t0)


def criterion_10(run: AcceptanceRun) -> CheckResult:
    t0 = time.perf_counter()
    smallest = math.inf
    count = 0
    for rep in run.solved:
        for o in rep.orbits:
            smallest = min(smallest, o.hessian_min_singular)
            count += 1
    return CheckResult(10, "Hessian nondegeneracy", count > 0 and smallest > 1e-8,
                       {"orbits": count, "min_hessian_singular": smallest},
                       time.perf_counter() - t0)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(run: AcceptanceRun | None = None, select=None) -> list:
    """Run the criteria (all, or the 1-based numbers in ``select``) in order."""
    run = run or AcceptanceRun()
    out = []
    for i, check in enumerate(CRITERIA, start=1):
        if select is None or i in select:
            out.append(check(run))
    return out
