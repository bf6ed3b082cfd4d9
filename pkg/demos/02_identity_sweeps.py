"""
Exhaustive identity sweeps
==========================

Every identity used to reach the closed form is checked on a grid in exact
arithmetic. A deliberately wrong constant shows the sweep can fail.
"""

# %%
from fractions import Fraction

from portcov.exact import falling_factorial
from portcov.identities import SUITES, SweepConfig, run_sweep, summarize

reports = [run_sweep(SweepConfig(name)) for name in SUITES]
for r in reports:
    print(f"{r.suite:17s} cases={r.cases_checked:5d} passed={r.passed} {r.elapsed:.2f}s")
print(summarize(reports).to_dict())


# %%
def wrong(i, j):
    f3 = lambda x: falling_factorial(x, 3)
    base = Fraction(16, f3(i + 3) * f3(j + 3)) - Fraction(23, falling_factorial(i + j + 4, 4))
    return base + (Fraction(4, f3(j + 3)) if i == j else 0)


bad = run_sweep(SweepConfig("equivalence", {"i": 6, "j": 6}), {"sigma_closed": wrong})
print(bad.passed, bad.failures)
print(bad.to_json(indent=1)[:600])
