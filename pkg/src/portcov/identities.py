"""Exhaustive grid sweeps over the covariance identities.

Each suite checks one identity (or bound) at every point of a rectangular
integer grid and reports the failing points. Grids are traversed row-major over
the sorted parameter names, so reports are reproducible.

>>> report = run_sweep(SweepConfig("equivalence", {"i": 3, "j": 3}))
>>> report.passed, report.cases_checked
(True, 16)
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping

from . import covariance as cov
from .exact import format_ratio

__all__ = [
    "SUITES",
    "Counterexample",
    "Summary",
    "SweepConfig",
    "VerificationReport",
    "run_sweep",
    "summarize",
]

ROW_SUM_TOLERANCE = Fraction(1, 10**4)

# Formulas a suite may call; tests swap entries out to check the sweeps have power.
DEFAULT_FORMULAS: dict[str, Callable[..., Any]] = {
    "sigma_double_sum": cov.sigma_double_sum,
    "sigma_closed": cov.sigma_closed,
    "lemma1_sum": cov.lemma1_sum,
    "lemma1_claim": cov.lemma1_claim,
    "lemma2_sum": cov.lemma2_sum,
    "lemma2_closed": cov.lemma2_closed,
    "first_part_sum": cov.first_part_sum,
    "first_part_claim": cov.first_part_claim,
    "inner_partial_fraction_sum": cov.inner_partial_fraction_sum,
    "row_sum_partial": cov.row_sum_partial,
    "leading_minors": cov.leading_minors,
    "asymptotic_diagonal_ratio": cov.asymptotic_diagonal_ratio,
}


# Each check returns (lhs, rhs, ok).
def _check_equivalence(p, f):
    lhs, rhs = f["sigma_double_sum"](p["i"], p["j"]), f["sigma_closed"](p["i"], p["j"])
    return lhs, rhs, lhs == rhs


def _check_lemma1(p, f):
    j = p["k"] + p["j_minus_k"]
    lhs, rhs = f["lemma1_sum"](j, p["k"], p["a"]), f["lemma1_claim"](j, p["k"])
    return Fraction(lhs), Fraction(rhs), lhs == rhs


def _check_lemma2(p, f):
    lhs, rhs = f["lemma2_sum"](p["j"], p["i"], p["a"]), f["lemma2_closed"](p["j"], p["i"], p["a"])
    return lhs, rhs, lhs == rhs


def _check_proof_step_2(p, f):
    lhs, rhs = f["first_part_sum"](p["i"], p["j"]), f["first_part_claim"](p["i"], p["j"])
    return lhs, rhs, lhs == rhs


def _check_partial_fraction(p, f):
    v = f["inner_partial_fraction_sum"](p["k"], p["j"])
    return v.lhs, v.rhs, v.lhs == v.rhs


def _check_row_sum(p, f):
    value = abs(f["row_sum_partial"](p["i"], p["J"]))
    return value, ROW_SUM_TOLERANCE, value <= ROW_SUM_TOLERANCE


def _check_psd(p, f):
    minor = f["leading_minors"](p["K"])[p["minor"]]
    return minor, Fraction(0), minor >= 0


def _check_asymptotic(p, f):
    gap = abs(f["asymptotic_diagonal_ratio"](p["j"]) - 4)
    bound = Fraction(4, p["j"])
    return gap, bound, gap <= bound


@dataclass(frozen=True)
class Suite:
    """Grid layout and check for one identity.

    ``grid`` names the iterated parameters with their inclusive lower bounds;
    ``fixed`` names parameters held at their configured value. ``sized_by``
    lets a grid parameter take its upper bound from another bound (the psd
    suite iterates minors ``0..K``).
    """

    name: str
    grid: Mapping[str, int]
    defaults: Mapping[str, int]
    check: Callable[[dict, Mapping], tuple]
    fixed: Mapping[str, int] = field(default_factory=dict)
    sized_by: Mapping[str, str] = field(default_factory=dict)

    @property
    def bound_names(self) -> tuple[str, ...]:
        return tuple(self.defaults)

    def minimum(self, name: str) -> int:
        if name in self.fixed:
            return self.fixed[name]
        return self.grid[name]

    def points(self, bounds: Mapping[str, int]) -> Iterable[dict[str, int]]:
        names = sorted(self.grid)
        ranges = []
        for name in names:
            upper = bounds[self.sized_by.get(name, name)]
            ranges.append(range(self.grid[name], upper + 1))
        fixed = {name: bounds[name] for name in self.fixed}
        for combo in itertools.product(*ranges):
            yield {**fixed, **dict(zip(names, combo))}

    def cardinality(self, bounds: Mapping[str, int]) -> int:
        out = 1
        for name, low in self.grid.items():
            out *= max(0, bounds[self.sized_by.get(name, name)] - low + 1)
        return out


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("equivalence", {"i": 0, "j": 0}, {"i": 40, "j": 40}, _check_equivalence),
        Suite(
            "lemma1",
            {"a": 0, "j_minus_k": 0, "k": 0},
            {"k": 20, "a": 12, "j_minus_k": 15},
            _check_lemma1,
        ),
        Suite("lemma2", {"a": 1, "i": 0, "j": 0}, {"j": 20, "i": 20, "a": 10}, _check_lemma2),
        Suite("proof_step_2", {"i": 0, "j": 0}, {"i": 25, "j": 25}, _check_proof_step_2),
        Suite("partial_fraction", {"j": 0, "k": 0}, {"k": 25, "j": 25}, _check_partial_fraction),
        Suite("row_sum", {"i": 0}, {"i": 5, "J": 500}, _check_row_sum, fixed={"J": 0}),
        Suite(
            "psd",
            {"minor": 0},
            {"K": 8},
            _check_psd,
            fixed={"K": 0},
            sized_by={"minor": "K"},
        ),
        Suite("asymptotic", {"j": 3}, {"j": 200}, _check_asymptotic),
    ]
}


@dataclass
class SweepConfig:
    """Which suite to run and the inclusive upper bound of each parameter.

    Missing bounds take the suite defaults. ``max_counterexamples`` caps how
    many failing points are kept in the report.
    """

    suite: str
    bounds: dict[str, int] = field(default_factory=dict)
    max_counterexamples: int = 10

    def __post_init__(self) -> None:
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; valid suites: {', '.join(SUITES)}")
        spec = SUITES[self.suite]
        unknown = set(self.bounds) - set(spec.bound_names)
        if unknown:
            raise ValueError(
                f"suite {self.suite!r} has no parameter(s) {sorted(unknown)}; "
                f"expected {list(spec.bound_names)}"
            )
        self.bounds = {**spec.defaults, **self.bounds}
        for name, value in self.bounds.items():
            if not isinstance(value, int) or value < spec.minimum(name):
                raise ValueError(
                    f"bound {name}={value!r} for suite {self.suite!r} "
                    f"must be an integer >= {spec.minimum(name)}"
                )
        if self.max_counterexamples < 1:
            raise ValueError("max_counterexamples must be >= 1")


@dataclass(frozen=True)
class Counterexample:
    params: dict[str, int]
    lhs: Fraction
    rhs: Fraction

    def to_dict(self) -> dict:
        return {"params": self.params, "lhs": format_ratio(self.lhs), "rhs": format_ratio(self.rhs)}


@dataclass
class VerificationReport:
    suite: str
    bounds: dict[str, int]
    cases_checked: int
    failures: int
    counterexamples: list[Counterexample]
    max_counterexamples: int
    elapsed: float

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "bounds": dict(sorted(self.bounds.items())),
            "cases_checked": self.cases_checked,
            "passed": self.passed,
            "failures": self.failures,
            "max_counterexamples": self.max_counterexamples,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "elapsed_ms": round(self.elapsed * 1000.0, 3),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _evaluate(suite: str, points: list[dict], formulas: Mapping, cap: int):
    check = SUITES[suite].check
    failures = 0
    found = []
    for p in points:
        lhs, rhs, ok = check(p, formulas)
        if not ok:
            failures += 1
            if len(found) < cap:
                found.append(Counterexample(p, lhs, rhs))
    return len(points), failures, found


def _chunks(seq: list, parts: int) -> list[list]:
    size = -(-len(seq) // parts)
    return [seq[s : s + size] for s in range(0, len(seq), size)]


def run_sweep(
    config: SweepConfig,
    formulas: Mapping[str, Callable[..., Any]] | None = None,
    workers: int = 1,
) -> VerificationReport:
    """Check every grid point of ``config`` and collect counterexamples.

    ``formulas`` overrides entries of :data:`DEFAULT_FORMULAS`. With
    ``workers > 1`` the grid is split into contiguous chunks evaluated in
    separate processes (overrides must then be picklable); chunk results are
    merged in grid order, so the report does not depend on scheduling.
    """
    spec = SUITES[config.suite]
    f = {**DEFAULT_FORMULAS, **(formulas or {})}
    cap = config.max_counterexamples
    start = time.perf_counter()
    points = list(spec.points(config.bounds))

    if workers > 1 and len(points) > 1:
        parts = _chunks(points, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    _evaluate,
                    [config.suite] * len(parts),
                    parts,
                    [f] * len(parts),
                    [cap] * len(parts),
                )
            )
    else:
        results = [_evaluate(config.suite, points, f, cap)]

    checked = sum(r[0] for r in results)
    failures = sum(r[1] for r in results)
    found = [c for r in results for c in r[2]][:cap]
    assert checked == spec.cardinality(config.bounds)
    return VerificationReport(
        suite=config.suite,
        bounds=dict(config.bounds),
        cases_checked=checked,
        failures=failures,
        counterexamples=found,
        max_counterexamples=cap,
        elapsed=time.perf_counter() - start,
    )


@dataclass
class Summary:
    passed: bool
    total_cases: int
    per_suite: dict[str, dict[str, Any]]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "total_cases": self.total_cases, "per_suite": self.per_suite}


def summarize(reports: Iterable[VerificationReport]) -> Summary:
    """Aggregate reports; an empty list passes vacuously."""
    per_suite: dict[str, dict[str, Any]] = {}
    total = 0
    ok = True
    for r in reports:
        total += r.cases_checked
        ok = ok and r.passed
        entry = per_suite.setdefault(r.suite, {"cases_checked": 0, "passed": True, "failures": 0})
        entry["cases_checked"] += r.cases_checked
        entry["failures"] += r.failures
        entry["passed"] = entry["passed"] and r.passed
    return Summary(ok, total, per_suite)
