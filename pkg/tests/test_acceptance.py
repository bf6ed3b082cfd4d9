"""Exit criteria for the package, one test per criterion, at the stated tolerances."""

import time
from fractions import Fraction

import numpy as np

from portcov.covariance import (
    asymptotic_diagonal_ratio,
    build_matrix,
    leading_minors,
    row_sum_partial,
    sigma_closed,
)
from portcov.exact import falling_factorial
from portcov.identities import SweepConfig, run_sweep
from portcov.simulation import SimConfig, compare_to_theory, exact_small_n, run_replicates


def _sweep(suite, bounds, **kw):
    start = time.perf_counter()
    report = run_sweep(SweepConfig(suite, bounds), **kw)
    return report, time.perf_counter() - start


def test_1_equivalence(criterion):
    report, elapsed = _sweep("equivalence", {"i": 40, "j": 40})
    ok = report.passed and report.cases_checked == 1681 and elapsed < 60
    criterion("1 equivalence 0<=i,j<=40", ok, f"{report.cases_checked} pairs, {report.failures} failures, {elapsed:.1f}s")
    assert report.cases_checked == 1681
    assert report.counterexamples == []
    assert elapsed < 60


def test_2_lemma1(criterion):
    report, elapsed = _sweep("lemma1", {"k": 20, "a": 12, "j_minus_k": 15})
    ok = report.passed and report.cases_checked == 21 * 13 * 16 and elapsed < 30
    criterion("2 lemma1 k<=20 a<=12 j<=k+15", ok, f"{report.cases_checked} cases, {elapsed:.1f}s")
    assert report.cases_checked == 21 * 13 * 16
    assert report.passed
    assert elapsed < 30


def test_3_lemma2(criterion):
    report, elapsed = _sweep("lemma2", {"j": 20, "i": 20, "a": 10})
    ok = report.passed and report.cases_checked == 21 * 21 * 10 and elapsed < 30
    criterion("3 lemma2 j,i<=20 1<=a<=10", ok, f"{report.cases_checked} cases, {elapsed:.1f}s")
    assert report.cases_checked == 21 * 21 * 10
    assert report.passed
    assert elapsed < 30


def test_4_proof_steps(criterion):
    first, _ = _sweep("proof_step_2", {"i": 25, "j": 25})
    partial, _ = _sweep("partial_fraction", {"k": 25, "j": 25})
    ok = first.passed and partial.passed and first.cases_checked == partial.cases_checked == 676
    criterion("4 proof steps params<=25", ok, f"{first.failures}+{partial.failures} failures")
    assert first.passed and first.cases_checked == 676
    assert partial.passed and partial.cases_checked == 676


def test_5_derived_structure(criterion):
    minors = leading_minors(8)
    psd_ok = len(minors) == 9 and all(d >= 0 for d in minors)
    rows_ok = all(abs(row_sum_partial(i, 500)) <= Fraction(1, 10**4) for i in range(6))
    asym_ok = all(abs(asymptotic_diagonal_ratio(j) - 4) <= Fraction(4, j) for j in range(3, 201))
    criterion("5 minors>=0, row sums<=1e-4, |ratio-4|<=4/j", psd_ok and rows_ok and asym_ok,
              f"psd={psd_ok} rows={rows_ok} asymptotic={asym_ok}")
    assert psd_ok and rows_ok and asym_ok


def test_6_simulator_oracle(criterion):
    n, R = 8, 200_000
    start = time.perf_counter()
    report = run_replicates(SimConfig(n, R, base_seed=1, max_tracked_outdegree=2))
    elapsed = time.perf_counter() - start
    exact = exact_small_n(n, 2)

    mean, mean_se = report.mean(), report.mean_se()
    cov, cov_se = report.empirical_cov() * n, report.cov_se() * n  # undo the 1/n scaling
    checks = {
        "E[X0]": (mean[0], mean_se[0], exact.mean[0]),
        "E[X1]": (mean[1], mean_se[1], exact.mean[1]),
        "Var(X0)": (cov[0, 0], cov_se[0, 0], exact.cov[0][0]),
        "Cov(X0,X1)": (cov[0, 1], cov_se[0, 1], exact.cov[0][1]),
    }
    zs = {k: abs(v - float(t)) / se for k, (v, se, t) in checks.items()}
    ok = all(z <= 3 for z in zs.values()) and elapsed < 120
    criterion("6 simulator vs exact n=8 R=200000", ok,
              " ".join(f"{k}:{z:.2f}se" for k, z in zs.items()) + f" {elapsed:.1f}s")
    assert all(z <= 3 for z in zs.values()), zs
    assert elapsed < 120


def test_7_limit_reproduction(criterion):
    sigma_02 = Fraction(16, 6 * 60) - Fraction(24, 6 * 5 * 4 * 3)
    assert sigma_closed(0, 0) == Fraction(1, 9)
    assert sigma_closed(0, 1) == Fraction(-4, 45)
    assert sigma_closed(1, 1) == Fraction(23, 180)
    assert sigma_closed(0, 2) == sigma_02

    start = time.perf_counter()
    report = run_replicates(SimConfig(20_000, 4_000, base_seed=42, max_tracked_outdegree=2))
    result = compare_to_theory(report, build_matrix(2), z=4.0, abs_floor=0.01)
    elapsed = time.perf_counter() - start
    worst = max(e.deviation / e.band for e in result.entries)
    ok = result.passed and elapsed < 300
    criterion("7 limit n=20000 R=4000 band max(0.01,4se)", ok, f"worst dev/band={worst:.2f} {elapsed:.1f}s")
    assert result.passed, [e for e in result.entries if not e.passed]
    assert elapsed < 300


def test_8_mutation_guard(criterion):
    def perturbed(i, j):
        f3 = lambda x: falling_factorial(x, 3)
        if i != j:
            return Fraction(16, f3(i + 3) * f3(j + 3)) - Fraction(23, falling_factorial(i + j + 4, 4))
        return Fraction(4, f3(j + 3)) + Fraction(16, f3(j + 3) ** 2) - Fraction(23, falling_factorial(2 * j + 4, 4))

    report = run_sweep(SweepConfig("equivalence", {"i": 40, "j": 40}), {"sigma_closed": perturbed})
    ok = not report.passed and len(report.counterexamples) > 0
    criterion("8 mutation 24->23 detected", ok, f"{report.failures} failures")
    assert ok
