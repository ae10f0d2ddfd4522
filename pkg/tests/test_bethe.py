import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaudin_wronski.bethe import (CriticalOrbit, ModelConfig, SolverOptions, bethe_coefficients,
                                  bethe_coefficients_symmetrized, bethe_gram, bethe_jacobian,
                                  bethe_residual, bethe_vector, check_domain, eigenvalues_mu,
                                  hessian_min_singular, master_gradient, master_hessian,
                                  master_log_value, master_value_phi, orbit_distance, solve_bethe,
                                  solve_bethe_report, verify_eigenpair)
from gaudin_wronski.errors import (DomainError, PreconditionError, UnderCountWarning)
from gaudin_wronski.sl2rep import act_e

CANON = ModelConfig.build((1, 1), (0, 1), 1)


def generic_point(cfg, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=cfg.k) + 1j * rng.normal(size=cfg.k)


def random_config(seed, k_max=3):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    m = tuple(int(x) for x in rng.integers(1, 4, size=n))
    z = tuple(rng.normal(size=n) + 1j * rng.normal(size=n))
    k = int(rng.integers(1, min(k_max, sum(m) // 2) + 1))
    return ModelConfig.build(m, z, k)


def log_difference(a, b):
    # difference of principal-branch logs modulo the 2*pi*i jumps of each term
    d = a - b
    return d - 2j * math.pi * round(d.imag / (2 * math.pi))


def test_model_config_validation():
    with pytest.raises(PreconditionError):
        ModelConfig.build((1, 1), (0, 1, 2), 1)
    with pytest.raises(PreconditionError):
        ModelConfig.build((1, 1), (0, 1), 2)
    with pytest.raises(DomainError):
        ModelConfig.build((1, 1), (0, 0), 1)
    assert CANON.expected_orbits() == 1


def test_canonical_residual_and_phi():
    assert bethe_residual(CANON, [0.25])[0] == pytest.approx(8 / 3)
    assert abs(bethe_residual(CANON, [0.5])[0]) < 1e-15
    assert master_value_phi(CANON, [0.5]) == pytest.approx(-4)
    assert eigenvalues_mu(CANON, [0.5]) == pytest.approx([1.5, -1.5])


def test_domain_checks():
    with pytest.raises(DomainError):
        bethe_residual(CANON, [0.0])
    cfg = ModelConfig.build((2, 2), (0, 1), 2)
    with pytest.raises(DomainError):
        check_domain(cfg, [0.3, 0.3])
    with pytest.raises(PreconditionError):
        check_domain(cfg, [0.3])


def test_single_factor_has_no_orbits():
    # dim Sing_1(L_2) = 0, and the one-point residual 2/t never vanishes
    cfg = ModelConfig.build((2,), (0,), 1)
    assert cfg.expected_orbits() == 0
    assert solve_bethe(cfg) == []


@given(st.integers(0, 10_000))
def test_gradient_matches_finite_differences(seed):
    cfg = random_config(seed)
    t = generic_point(cfg, seed + 1)
    h = 1e-6
    grad = master_gradient(cfg, t)
    s0 = master_log_value(cfg, t)
    for i in range(cfg.k):
        e = np.zeros(cfg.k, dtype=complex)
        e[i] = h
        fd = (log_difference(master_log_value(cfg, t + e), s0)
              - log_difference(master_log_value(cfg, t - e), s0)) / (2 * h)
        assert abs(fd - grad[i]) <= 1e-5 * max(1.0, abs(grad[i]))


@given(st.integers(0, 10_000))
def test_hessian_matches_finite_differences(seed):
    cfg = random_config(seed)
    t = generic_point(cfg, seed + 2)
    h = 1e-6
    hess = master_hessian(cfg, t)
    assert np.allclose(hess, hess.T)
    for j in range(cfg.k):
        e = np.zeros(cfg.k, dtype=complex)
        e[j] = h
        fd = (master_gradient(cfg, t + e) - master_gradient(cfg, t - e)) / (2 * h)
        assert np.allclose(fd, hess[:, j], rtol=1e-5, atol=1e-5)
    assert np.array_equal(master_hessian(cfg, t), -bethe_jacobian(cfg, t))


@given(st.integers(0, 10_000))
def test_mu_is_z_derivative_of_master_function(seed):
    cfg = random_config(seed)
    t = generic_point(cfg, seed + 3)
    z = cfg.z_array
    mu = eigenvalues_mu(cfg, t)
    s0 = master_log_value(cfg, t)
    h = 1e-6
    for j in range(cfg.n):
        e = np.zeros(cfg.n, dtype=complex)
        e[j] = h
        fd = (log_difference(master_log_value(cfg, t, z + e), s0)
              - log_difference(master_log_value(cfg, t, z - e), s0)) / (2 * h)
        assert abs(fd - mu[j]) <= 1e-5 * max(1.0, abs(mu[j]))


@given(st.integers(0, 10_000))
def test_phi_is_exp_of_master_function(seed):
    cfg = random_config(seed)
    t = generic_point(cfg, seed + 4)
    z, m = cfg.z_array, cfg.m_array
    pair = sum(0.5 * m[i] * m[j] * np.log(z[i] - z[j])
               for i in range(cfg.n) for j in range(i + 1, cfg.n))
    phi = master_value_phi(cfg, t)
    assert np.exp(master_log_value(cfg, t) - pair) == pytest.approx(phi, rel=1e-9)


def test_canonical_bethe_vector():
    v = bethe_vector(CANON, [0.5])
    assert v.coords[(1, 0)] == pytest.approx(2) and v.coords[(0, 1)] == pytest.approx(-2)
    assert act_e(v).max_abs() < 1e-14


@given(st.integers(0, 10_000))
@settings(max_examples=20)
def test_bethe_coefficients_two_routes(seed):
    cfg = random_config(seed, k_max=4)
    t = generic_point(cfg, seed + 5)
    assert np.allclose(bethe_coefficients(cfg, t), bethe_coefficients_symmetrized(cfg, t),
                       rtol=1e-10, atol=1e-12)


def test_bethe_vector_is_permutation_invariant():
    cfg = random_config(11, k_max=4)
    t = generic_point(cfg, 12)
    rng = np.random.default_rng(0)
    a = bethe_coefficients(cfg, t)
    for _ in range(3):
        assert np.allclose(a, bethe_coefficients(cfg, rng.permutation(t)), rtol=1e-12)


def test_symmetrize_rejects_large_k():
    cfg = ModelConfig.build((9, 9), (0, 1), 9)
    with pytest.raises(PreconditionError):
        bethe_coefficients_symmetrized(cfg, np.arange(9) + 2.0)
    with pytest.raises(PreconditionError):
        bethe_vector(CANON, [0.5], method="nope")


def test_k0_eigenpair():
    cfg = ModelConfig.build((2, 1, 1), (0, 1, 3j), 0)
    (orbit,) = solve_bethe(cfg)
    assert orbit.k == 0 and math.isinf(hessian_min_singular(cfg, ()))
    report = verify_eigenpair(cfg, orbit)
    assert report.passed and report.max_residual < 1e-14


def test_four_spins_two_orbits():
    cfg = ModelConfig.build((1, 1, 1, 1), (0, 1, 2, 4), 2)
    orbits = solve_bethe(cfg)
    assert len(orbits) == 2 and orbit_distance(*orbits) > 1e-3
    for o in orbits:
        assert np.max(np.abs(bethe_residual(cfg, o))) < 1e-9
        assert verify_eigenpair(cfg, o).passed
    gram = bethe_gram(cfg, orbits)
    assert gram.nonsingular
    # Bethe vectors of distinct orbits are Shapovalov-orthogonal
    assert abs(gram.matrix[0, 1]) < 1e-9 * abs(gram.matrix[0, 0])


@given(st.integers(0, 10_000))
@settings(max_examples=10)
def test_solver_finds_expected_count(seed):
    cfg = random_config(seed)
    orbits = solve_bethe(cfg)
    assert len(orbits) == cfg.expected_orbits()
    for o in orbits:
        report = verify_eigenpair(cfg, o)
        assert report.passed and report.singular_residual <= 1e-9


def test_solver_is_deterministic_across_threads():
    cfg = ModelConfig.build((2, 1, 2, 1), (0, 1, 1j, -2), 3)
    a = solve_bethe_report(cfg, SolverOptions(threads=1))
    b = solve_bethe_report(cfg, SolverOptions(threads=3))
    assert [o.t for o in a.orbits] == [o.t for o in b.orbits]
    assert a.starts_used == b.starts_used and a.status_counts == b.status_counts


def test_solver_orbit_set_independent_of_seed():
    cfg = ModelConfig.build((2, 1, 2, 1), (0, 1, 1j, -2), 3)
    a = solve_bethe(cfg, SolverOptions(seed=1))
    b = solve_bethe(cfg, SolverOptions(seed=2))
    assert len(a) == len(b) == cfg.expected_orbits()
    for o in a:
        assert min(orbit_distance(o, p) for p in b) < 1e-7


def test_under_count_warning():
    cfg = ModelConfig.build((1, 1, 1, 1, 1, 1), (0, 1, 2, 3, 5, 7), 3)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        orbits = solve_bethe(cfg, SolverOptions(max_starts=1))
    assert len(orbits) < cfg.expected_orbits()
    assert any(issubclass(w.category, UnderCountWarning) for w in caught)


def test_orbit_distance_ignores_order():
    a = CriticalOrbit((1 + 1j, 2), 0.0, 1.0)
    assert orbit_distance(a, (2, 1 + 1j)) == 0
    assert orbit_distance(a, (2,)) == math.inf
    assert a.t == ((1 + 1j), (2 + 0j))
