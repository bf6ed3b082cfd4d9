"""
Structure of the truncated matrix
=================================

Rows sum to zero in the limit (the counts always add up to n), leading
principal minors are nonnegative, and the diagonal behaves like 4/(j+3)_3.
"""

# %%
from portcov import asymptotic_diagonal_ratio, leading_minors, row_sum_partial

for J in (5, 50, 500):
    print(J, [f"{float(row_sum_partial(i, J)):+.2e}" for i in range(4)])

# %%
for size, d in enumerate(leading_minors(8), start=1):
    print(size, f"{float(d):.3e}")

# %%
for j in (3, 10, 50, 200):
    r = asymptotic_diagonal_ratio(j)
    print(j, float(r), float(abs(r - 4) * j))
