import json
from fractions import Fraction

import pytest

from portcov.exact import falling_factorial
from portcov.identities import (
    SUITES,
    SweepConfig,
    VerificationReport,
    run_sweep,
    summarize,
)


def closed_form_24_to_23(i, j):
    f3 = lambda x: falling_factorial(x, 3)
    if i != j:
        return Fraction(16, f3(i + 3) * f3(j + 3)) - Fraction(23, falling_factorial(i + j + 4, 4))
    return Fraction(4, f3(j + 3)) + Fraction(16, f3(j + 3) ** 2) - Fraction(23, falling_factorial(2 * j + 4, 4))


def lemma2_off_by_one(j, i, a):
    return Fraction(1, falling_factorial(i + j + a, a))  # drops the (a-1)! factor


def test_equivalence_example():
    report = run_sweep(SweepConfig("equivalence", {"i": 10, "j": 10}))
    assert report.passed
    assert report.cases_checked == 121
    assert report.counterexamples == []


def test_lemma1_example():
    report = run_sweep(SweepConfig("lemma1", {"k": 3, "a": 2, "j_minus_k": 3}))
    assert report.passed
    assert report.cases_checked == 4 * 3 * 4


@pytest.mark.parametrize(
    "suite,bounds,expected",
    [
        ("equivalence", {"i": 4, "j": 2}, 15),
        ("lemma2", {"j": 3, "i": 2, "a": 4}, 4 * 3 * 4),
        ("proof_step_2", {"i": 5, "j": 5}, 36),
        ("partial_fraction", {"k": 2, "j": 7}, 24),
        ("row_sum", {"i": 3, "J": 200}, 4),
        ("psd", {"K": 5}, 6),
        ("asymptotic", {"j": 10}, 8),
    ],
)
def test_cases_checked_is_grid_cardinality(suite, bounds, expected):
    report = run_sweep(SweepConfig(suite, bounds))
    assert report.cases_checked == expected
    assert report.passed


def test_row_sum_fails_when_row_is_too_short():
    report = run_sweep(SweepConfig("row_sum", {"i": 2, "J": 5}))
    assert not report.passed
    assert report.counterexamples[0].rhs == Fraction(1, 10**4)


def test_deterministic_modulo_elapsed():
    a = run_sweep(SweepConfig("equivalence", {"i": 6, "j": 6})).to_dict()
    b = run_sweep(SweepConfig("equivalence", {"i": 6, "j": 6})).to_dict()
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert json.dumps(a) == json.dumps(b)


def test_parallel_matches_serial():
    config = SweepConfig("equivalence", {"i": 8, "j": 8}, max_counterexamples=5)
    mutated = {"sigma_closed": closed_form_24_to_23}
    serial = run_sweep(config, mutated).to_dict()
    parallel = run_sweep(config, mutated, workers=3).to_dict()
    serial.pop("elapsed_ms"), parallel.pop("elapsed_ms")
    assert serial == parallel
    assert serial["failures"] == 81


def test_mutation_makes_equivalence_fail():
    report = run_sweep(SweepConfig("equivalence", {"i": 5, "j": 5}), {"sigma_closed": closed_form_24_to_23})
    assert not report.passed
    assert report.failures == 36
    assert len(report.counterexamples) == 10  # default cap
    first = report.counterexamples[0]
    assert first.params == {"i": 0, "j": 0}
    assert first.lhs == Fraction(1, 9) and first.rhs != first.lhs


def test_mutation_makes_lemma2_fail():
    report = run_sweep(SweepConfig("lemma2", {"j": 2, "i": 2, "a": 3}), {"lemma2_closed": lemma2_off_by_one})
    # a = 1 and a = 2 have (a-1)! = 1, so only a = 3 fails
    assert report.failures == 9
    assert all(c.params["a"] == 3 for c in report.counterexamples)


def test_grid_order_is_row_major_over_sorted_names():
    config = SweepConfig("lemma1", {"k": 1, "a": 1, "j_minus_k": 1}, max_counterexamples=100)
    report = run_sweep(config, {"lemma1_claim": lambda j, k: 7})
    order = [tuple(c.params[n] for n in ("a", "j_minus_k", "k")) for c in report.counterexamples]
    assert order == sorted(order)
    assert len(order) == 8


@pytest.mark.parametrize(
    "suite,bounds,fragment",
    [
        ("equivalence", {"i": -1}, "i=-1"),
        ("lemma2", {"a": 0}, "a=0"),
        ("asymptotic", {"j": 2}, "j=2"),
        ("equivalence", {"q": 3}, "'q'"),
    ],
)
def test_invalid_bounds_name_the_parameter(suite, bounds, fragment):
    with pytest.raises(ValueError, match=fragment):
        SweepConfig(suite, bounds)


def test_unknown_suite_lists_valid_ones():
    with pytest.raises(ValueError, match="equivalence"):
        SweepConfig("nonsense")


def test_defaults_are_acceptance_grids():
    assert SweepConfig("equivalence").bounds == {"i": 40, "j": 40}
    assert SweepConfig("lemma1").bounds == {"k": 20, "a": 12, "j_minus_k": 15}
    assert SweepConfig("row_sum").bounds == {"i": 5, "J": 500}
    assert set(SUITES) == {
        "equivalence", "lemma1", "lemma2", "proof_step_2",
        "partial_fraction", "row_sum", "psd", "asymptotic",
    }


def test_json_schema():
    report = run_sweep(
        SweepConfig("equivalence", {"i": 1, "j": 1}, max_counterexamples=2), {"sigma_closed": closed_form_24_to_23}
    )
    d = json.loads(report.to_json())
    assert set(d) >= {"suite", "bounds", "cases_checked", "passed", "counterexamples", "elapsed_ms"}
    assert d["passed"] is False
    assert d["counterexamples"][0] == {"params": {"i": 0, "j": 0}, "lhs": "1/9", "rhs": "11/72"}  # 4/6 + 16/36 - 23/24
    assert d["max_counterexamples"] == 2


def _report(suite, cases, passed):
    from portcov.identities import Counterexample

    bad = [] if passed else [Counterexample({"i": 0}, Fraction(1), Fraction(0))]
    return VerificationReport(suite, {}, cases, 0 if passed else 1, bad, 10, 0.0)


def test_summarize():
    empty = summarize([])
    assert empty.passed and empty.total_cases == 0 and empty.per_suite == {}
    assert not summarize([_report("equivalence", 121, False)]).passed
    s = summarize([_report("equivalence", 121, True), _report("lemma2", 100, True)])
    assert s.passed and s.total_cases == 221
    assert s.per_suite["lemma2"]["cases_checked"] == 100
