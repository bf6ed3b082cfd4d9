"""Limiting covariances of outdegree counts in random plane recursive trees.

Let ``X_i`` be the number of nodes with outdegree ``i`` in a random plane
recursive tree on ``n`` nodes. The centered counts scaled by ``sqrt(n)`` are
jointly asymptotically normal; ``sigma(i, j)`` is the limiting covariance.

Two independent routes to ``sigma(i, j)`` live here:

* :func:`sigma_double_sum` evaluates the original alternating double sum term
  by term.
* :func:`sigma_closed` evaluates the simplified closed form in falling
  factorials.

The remaining functions evaluate both sides of the binomial identities used to
pass from one to the other, plus a few derived quantities of the truncated
matrix (row sums, leading principal minors, diagonal asymptotics).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import binomial, factorial, falling_factorial

__all__ = [
    "CovMatrix",
    "IdentityValue",
    "asymptotic_diagonal_ratio",
    "build_matrix",
    "determinant",
    "first_part_claim",
    "first_part_sum",
    "inner_partial_fraction_sum",
    "leading_minors",
    "lemma1_claim",
    "lemma1_sum",
    "lemma2_closed",
    "lemma2_sum",
    "row_sum_partial",
    "sigma_closed",
    "sigma_double_sum",
    "sigma_offdiagonal_formula",
]


def _check_nonnegative(**values: int) -> None:
    for name, v in values.items():
        if v < 0:
            raise ValueError(f"{name} must be >= 0, got {v}")


@dataclass(frozen=True)
class IdentityValue:
    """Both sides of an identity at one parameter point."""

    lhs: Fraction
    rhs: Fraction
    params: dict[str, int] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def sigma_double_sum(i: int, j: int) -> Fraction:
    """Limiting covariance from the alternating double sum.

    Each of the ``(i+1)(j+1)`` terms::

        2 (-1)^(k+l) / (k+l+4) C(i,k) C(j,l)
          * (2 (k+l+4)! / ((k+3)! (l+3)!) - 1 - (k+1)(l+1) / ((k+3)(l+3)))

    is formed as an exact rational and accumulated in order. No terms are
    paired or reordered, so this stays independent of :func:`sigma_closed`.

    >>> sigma_double_sum(0, 1)
    Fraction(-4, 45)
    """
    _check_nonnegative(i=i, j=j)
    total = Fraction(0)
    for k in range(i + 1):
        for l in range(j + 1):
            fk, fl = factorial(k + 3), factorial(l + 3)
            d = (k + 3) * (l + 3)
            # bracket = (2 (k+l+4)! d - fk fl d - fk fl (k+1)(l+1)) / (fk fl d)
            num = 2 * factorial(k + l + 4) * d - fk * fl * (d + (k + 1) * (l + 1))
            sign = -1 if (k + l) % 2 else 1
            coeff = sign * binomial(i, k) * binomial(j, l)
            total += Fraction(2 * coeff * num, (k + l + 4) * fk * fl * d)
    return total


def sigma_offdiagonal_formula(i: int, j: int) -> Fraction:
    """``16/((i+3)_3 (j+3)_3) - 24/(i+j+4)_4`` evaluated for any ``i, j`` (including ``i == j``)."""
    _check_nonnegative(i=i, j=j)
    return Fraction(16, falling_factorial(i + 3, 3) * falling_factorial(j + 3, 3)) - Fraction(
        24, falling_factorial(i + j + 4, 4)
    )


def sigma_closed(i: int, j: int) -> Fraction:
    """Limiting covariance from the closed form.

    Off the diagonal this is ``16/((i+3)_3 (j+3)_3) - 24/(i+j+4)_4``; on the
    diagonal ``4/(j+3)_3 + 16/(j+3)_3^2 - 24/(2j+4)_4``.

    >>> sigma_closed(0, 0), sigma_closed(1, 1)
    (Fraction(1, 9), Fraction(23, 180))
    """
    _check_nonnegative(i=i, j=j)
    if i != j:
        return sigma_offdiagonal_formula(i, j)
    f = falling_factorial(j + 3, 3)
    return Fraction(4, f) + Fraction(16, f * f) - Fraction(24, falling_factorial(2 * j + 4, 4))


def lemma1_sum(j: int, k: int, a: int) -> int:
    """``sum_{l=0}^{j} (-1)^l C(j,l) C(k+l+a, l+a)`` for ``j >= k >= 0``, ``a >= 0``.

    The identity says this is 0 for ``j > k`` and ``(-1)^j`` for ``j == k``;
    see :func:`lemma1_claim`. Values of ``j < k`` are rejected since the
    identity says nothing about them.
    """
    _check_nonnegative(j=j, k=k, a=a)
    if j < k:
        raise ValueError(f"lemma1_sum requires j >= k, got j={j}, k={k}")
    total = 0
    for l in range(j + 1):
        term = binomial(j, l) * binomial(k + l + a, l + a)
        total += -term if l % 2 else term
    return total


def lemma1_claim(j: int, k: int) -> int:
    if j < k:
        raise ValueError(f"lemma1_claim requires j >= k, got j={j}, k={k}")
    if j > k:
        return 0
    return -1 if j % 2 else 1


def lemma2_sum(j: int, i: int, a: int) -> Fraction:
    """``sum_{l=0}^{j} (-1)^l C(j,l) / ((l+a) C(l+a+i, i))`` for ``a >= 1``."""
    _check_nonnegative(j=j, i=i)
    if a < 1:
        raise ValueError(f"lemma2_sum requires a >= 1, got a={a}")
    total = Fraction(0)
    for l in range(j + 1):
        sign = -1 if l % 2 else 1
        total += Fraction(sign * binomial(j, l), (l + a) * binomial(l + a + i, i))
    return total


def lemma2_closed(j: int, i: int, a: int) -> Fraction:
    """``(a-1)! / (i+j+a)_a``, the claimed value of :func:`lemma2_sum`."""
    _check_nonnegative(j=j, i=i)
    if a < 1:
        raise ValueError(f"lemma2_closed requires a >= 1, got a={a}")
    return Fraction(factorial(a - 1), falling_factorial(i + j + a, a))


def first_part_sum(i: int, j: int) -> Fraction:
    """The factorial part of the double sum, multiplied by 4::

        4 sum_k sum_l (-1)^(k+l) / (k+l+4) C(i,k) C(j,l) (k+l+4)! / ((k+3)! (l+3)!)

    >>> first_part_sum(2, 2)
    Fraction(1, 15)
    """
    _check_nonnegative(i=i, j=j)
    total = Fraction(0)
    for k in range(i + 1):
        for l in range(j + 1):
            sign = -1 if (k + l) % 2 else 1
            total += Fraction(
                sign * binomial(i, k) * binomial(j, l) * factorial(k + l + 4),
                (k + l + 4) * factorial(k + 3) * factorial(l + 3),
            )
    return 4 * total


def first_part_claim(i: int, j: int) -> Fraction:
    """Claimed value of :func:`first_part_sum`: zero off the diagonal, ``4/(j+3)_3`` on it."""
    _check_nonnegative(i=i, j=j)
    if i != j:
        return Fraction(0)
    return Fraction(4, falling_factorial(j + 3, 3))


def inner_partial_fraction_sum(k: int, j: int) -> IdentityValue:
    """Both sides of the inner-sum identity obtained by partial fractions.

    ``lhs = sum_l (-1)^l C(j,l) (l+1) / ((l+3)(k+l+4))`` summed directly;
    ``rhs = (k+3) / ((k+1)(k+4) C(k+j+4, j)) - 2 / (3 (k+1) C(j+3, j))``.
    """
    _check_nonnegative(k=k, j=j)
    lhs = Fraction(0)
    for l in range(j + 1):
        sign = -1 if l % 2 else 1
        lhs += Fraction(sign * binomial(j, l) * (l + 1), (l + 3) * (k + l + 4))
    rhs = Fraction(k + 3, (k + 1) * (k + 4) * binomial(k + j + 4, j)) - Fraction(
        2, 3 * (k + 1) * binomial(j + 3, j)
    )
    return IdentityValue(lhs, rhs, {"k": k, "j": j})


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric truncation ``[sigma(i, j)]`` for ``0 <= i, j <= max_index``."""

    max_index: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        size = self.max_index + 1
        if len(self.entries) != size or any(len(row) != size for row in self.entries):
            raise ValueError(f"entries must be {size}x{size}")

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i][j]

    @property
    def size(self) -> int:
        return self.max_index + 1

    def leading(self, size: int) -> list[list[Fraction]]:
        """Top-left ``size x size`` block as nested lists."""
        return [list(row[:size]) for row in self.entries[:size]]

    def to_array(self) -> np.ndarray:
        """Float64 copy; lossy."""
        return np.array([[float(q) for q in row] for row in self.entries], dtype=float)


def build_matrix(K: int) -> CovMatrix:
    """Closed-form covariance matrix for indices ``0..K``."""
    _check_nonnegative(K=K)
    rows = [[Fraction(0)] * (K + 1) for _ in range(K + 1)]
    for i in range(K + 1):
        for j in range(i, K + 1):
            rows[i][j] = rows[j][i] = sigma_closed(i, j)
    return CovMatrix(K, tuple(tuple(r) for r in rows))


def row_sum_partial(i: int, J: int) -> Fraction:
    """``sum_{j=0}^{J} sigma(i, j)``.

    Since the counts always sum to ``n``, full rows of the limiting matrix sum
    to zero and these partial sums tend to 0 as ``J`` grows.
    """
    _check_nonnegative(i=i, J=J)
    return sum((sigma_closed(i, j) for j in range(J + 1)), Fraction(0))


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals.

    A zero pivot is replaced by the first nonzero entry below it (row swap,
    sign flipped); a column with no nonzero entry gives determinant 0.
    """
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        pivot = a[c][c]
        det *= pivot
        for r in range(c + 1, n):
            f = a[r][c] / pivot
            if f:
                row_r, row_c = a[r], a[c]
                for t in range(c + 1, n):
                    row_r[t] -= f * row_c[t]
    return det


def leading_minors(K: int) -> list[Fraction]:
    """Determinants of the leading ``1x1 .. (K+1)x(K+1)`` blocks of :func:`build_matrix`."""
    m = build_matrix(K)
    return [determinant(m.leading(s)) for s in range(1, K + 2)]


def asymptotic_diagonal_ratio(j: int) -> Fraction:
    """``sigma(j, j) * (j+3)_3``; tends to 4, with ``|ratio - 4| <= 4/j`` for ``j >= 3``."""
    if j < 1:
        raise ValueError(f"asymptotic_diagonal_ratio requires j >= 1, got {j}")
    return sigma_closed(j, j) * falling_factorial(j + 3, 3)
