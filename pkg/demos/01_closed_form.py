"""
Two routes to the limiting covariance matrix
============================================

The covariance of the outdegree counts can be written as an alternating
double sum or in closed form. This script evaluates both exactly and shows
the truncated matrix.
"""

# %%
from portcov import build_matrix, sigma_closed, sigma_double_sum

for i, j in [(0, 0), (0, 1), (1, 1), (0, 2), (5, 9)]:
    slow, fast = sigma_double_sum(i, j), sigma_closed(i, j)
    print(f"sigma({i},{j}) = {fast}  (double sum agrees: {slow == fast})")

# %%
# Exact 4x4 truncation, then floats for a quick look.
m = build_matrix(3)
for row in m.entries:
    print("  ".join(f"{str(q):>14}" for q in row))
print(m.to_array().round(5))

# %%
# Entries shrink fast: off the diagonal like 1/(i^3 j^3), on it like 4/j^3.
for j in (10, 100, 1000):
    print(j, float(sigma_closed(j, j) * j**3), float(sigma_closed(1, j) * j**3))
