"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Thresholds live in :mod:`gaudin_wronski.acceptance`; the asserts below
restate the key numbers from each result so that a change to the suite's
thresholds cannot silently loosen a criterion.
"""
import json
import math

import pytest

from gaudin_wronski import acceptance

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def run():
    return acceptance.AcceptanceRun()


def check(number, run, capsys):
    result = acceptance.CRITERIA[number - 1](run)
    with capsys.disabled():
        print(f"\n{result.line()}  {json.dumps(summary(result.detail), default=str)}")
    return result


def summary(detail):
    """Scalars as they are; per-instance tables folded to their worst value."""
    out = {k: v for k, v in detail.items() if not isinstance(v, list) or len(v) <= 3}
    rows = detail.get("instances")
    if rows:
        out["instances"] = len(rows)
        for key in rows[0]:
            vals = [r[key] for r in rows if isinstance(r[key], (int, float))
                    and not isinstance(r[key], bool)]
            if not vals or key in ("k",):
                continue
            if key in ("found", "target", "count", "schubert_bound", "orbits"):
                out[key] = sum(vals)
            elif "min" in key:
                out[key] = min(vals)
            else:
                out[key] = max(vals)
    return out


def test_criterion_01_dimension_triple(run, capsys):
    r = check(1, run, capsys)
    assert r.detail["pairs"] > 0 and r.detail["mismatches"] == []
    assert r.seconds < 30
    assert r.passed


def test_criterion_02_schubert_identity(run, capsys):
    r = check(2, run, capsys)
    assert r.detail["four_lines"] == [2, 2] and r.detail["mismatches"] == []
    assert r.passed


def test_criterion_03_bridge_identity(run, capsys):
    r = check(3, run, capsys)
    assert r.detail["pairs"] > 0 and r.detail["mismatches"] == []
    assert r.passed


def test_criterion_04_canonical_instance(run, capsys):
    r = check(4, run, capsys)
    d = r.detail
    assert d["orbits"] == 1
    assert d["t_error"] <= 1e-10 and d["mu_error"] <= 1e-10
    assert d["eigenpair_residual"] <= 1e-12 and d["wronskian_error"] <= 1e-12
    assert d["plane_matches"]
    assert r.passed


def test_criterion_05_completeness_and_basis(run, capsys):
    r = check(5, run, capsys)
    rows = r.detail["instances"]
    assert len(rows) == 20
    for row in rows:
        assert row["found"] == row["target"]
        assert row["max_eigenpair_residual"] <= 1e-8
        assert row["gram_min_singular"] > 0
    assert r.seconds < 300
    assert r.passed


def test_criterion_06_simple_spectrum(run, capsys):
    r = check(6, run, capsys)
    for row in r.detail["instances"]:
        sep = row["min_mu_separation"]
        assert sep is None or sep > 1e-6
    assert r.passed


def test_criterion_07_round_trip(run, capsys):
    r = check(7, run, capsys)
    for row in r.detail["instances"]:
        assert row["round_trip_error"] <= 1e-9 and row["wronskian_error"] <= 1e-9
        assert row["count"] == row["schubert_bound"]
    assert r.passed


def test_criterion_08_analytic_consistency(run, capsys):
    r = check(8, run, capsys)
    d = r.detail
    assert d["points"] == 100 and d["mu_points"] > 0
    assert d["gradient_rel_error"] <= 1e-6
    assert d["mu_rel_error"] <= 1e-6
    assert d["phi_rel_error"] <= 1e-10
    assert r.passed


def test_criterion_09_structural_operator_checks(run, capsys):
    r = check(9, run, capsys)
    d = r.detail
    assert d["commutator"] <= 1e-10 and d["shapovalov_symmetry"] <= 1e-10
    assert d["invariance"] <= 1e-10
    assert r.passed


def test_criterion_10_hessian_nondegeneracy(run, capsys):
    r = check(10, run, capsys)
    assert r.detail["orbits"] > 0
    assert math.isfinite(r.detail["min_hessian_singular"])
    assert r.detail["min_hessian_singular"] > 1e-8
    assert r.passed
