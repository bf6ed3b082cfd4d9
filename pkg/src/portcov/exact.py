"""Exact integer and rational primitives.

Every formula in :mod:`portcov.covariance` is evaluated in exact arithmetic.
Rationals are :class:`fractions.Fraction` instances, which are always kept in
lowest terms with a positive denominator (``0`` is ``0/1``).
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "Rational",
    "binomial",
    "compare",
    "factorial",
    "falling_factorial",
    "format_ratio",
    "parse_ratio",
]

Rational = Fraction

_FACTORIALS: list[int] = [1]


def factorial(n: int) -> int:
    """Return ``n!`` from a table that grows on demand."""
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    table = _FACTORIALS
    while len(table) <= n:
        table.append(table[-1] * len(table))
    return table[n]


def binomial(n: int, k: int) -> int:
    """Binomial coefficient ``C(n, k)``, zero when ``k`` is outside ``[0, n]``.

    >>> binomial(5, 2)
    10
    >>> binomial(4, 6)
    0
    """
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def falling_factorial(x: int, m: int) -> int:
    """Falling factorial ``x (x-1) ... (x-m+1)``; the empty product for ``m = 0`` is 1.

    ``x`` may be any integer.

    >>> falling_factorial(3, 3), falling_factorial(4, 4), falling_factorial(10, 0)
    (6, 24, 1)
    """
    if m < 0:
        raise ValueError(f"falling factorial requires m >= 0, got m={m}")
    if x >= 0:
        return math.perm(x, m)
    out = 1
    for t in range(m):
        out *= x - t
    return out


def compare(a: Fraction, b: Fraction) -> int:
    """Three-way comparison: -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    return (a > b) - (a < b)


def format_ratio(q: Fraction | int) -> str:
    """Render an exact value as ``"p/q"``; integers keep the ``/1``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_ratio(text: str) -> Fraction:
    """Inverse of :func:`format_ratio` (also accepts bare integers)."""
    return Fraction(text.strip())
