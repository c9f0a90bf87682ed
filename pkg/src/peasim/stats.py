"""Rank statistics: Mann-Whitney U with exact small-sample p-values,
Holm-Bonferroni correction, and the quantile convention used in result
tables."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "mann_whitney_u",
    "holm_bonferroni",
    "quantiles",
]

# Exact enumeration is used up to this smaller-sample size when the data
# are tie-free; beyond it the normal approximation takes over.
EXACT_LIMIT = 8


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


@lru_cache(maxsize=None)
def _u_counts(n: int, m: int) -> tuple[int, ...]:
    """Number of arrangements of n 'x' among n+m ranks yielding each U
    value, U in [0, n*m]."""
    if n == 0 or m == 0:
        return (1,)
    a = _u_counts(n - 1, m)  # last rank is an x: U gains m
    b = _u_counts(n, m - 1)  # last rank is a y: U unchanged for x
    counts = [0] * (n * m + 1)
    for u, c in enumerate(a):
        counts[u + m] += c
    for u, c in enumerate(b):
        counts[u] += c
    return tuple(counts)


def _exact_cdf(n: int, m: int, u: float) -> float:
    counts = _u_counts(n, m)
    total = math.comb(n + m, n)
    return sum(c for i, c in enumerate(counts) if i <= u) / total


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def mann_whitney_u(
    sample_a: list[float], sample_b: list[float], alternative: str = "two-sided"
) -> tuple[float, float]:
    """Mann-Whitney U statistic of sample_a and its p-value.

    Ties get midranks. For tie-free data with min sample size at most
    eight the p-value is exact by enumeration of the U distribution;
    otherwise a normal approximation with tie and continuity correction
    is used. ``alternative`` is 'two-sided', 'less' (a tends smaller) or
    'greater' (a tends larger).
    """
    if not sample_a or not sample_b:
        raise ValueError("both samples must be nonempty")
    if alternative not in ("two-sided", "less", "greater"):
        raise ValueError(f"unknown alternative {alternative!r}")
    n, m = len(sample_a), len(sample_b)
    combined = list(sample_a) + list(sample_b)
    ranks = _midranks(combined)
    r_a = sum(ranks[:n])
    u_a = r_a - n * (n + 1) / 2
    u_b = n * m - u_a

    has_ties = len(set(combined)) < len(combined)
    if not has_ties and min(n, m) <= EXACT_LIMIT:
        # u_a is integral without ties
        if alternative == "less":
            p = _exact_cdf(n, m, u_a)
        elif alternative == "greater":
            p = _exact_cdf(n, m, u_b)
        else:
            p = min(1.0, 2.0 * _exact_cdf(n, m, min(u_a, u_b)))
        return u_a, p

    mean = n * m / 2.0
    sizes = sorted(ranks)
    tie_term = 0.0
    i = 0
    while i < len(sizes):
        j = i
        while j + 1 < len(sizes) and sizes[j + 1] == sizes[i]:
            j += 1
        t = j - i + 1
        tie_term += t**3 - t
        i = j + 1
    total = n + m
    var = n * m / 12.0 * (total + 1 - tie_term / (total * (total - 1)))
    if var <= 0:
        return u_a, 1.0
    sd = math.sqrt(var)
    if alternative == "less":
        z = (mean - u_a - 0.5) / sd
        p = _norm_sf(z)
    elif alternative == "greater":
        z = (u_a - mean - 0.5) / sd
        p = _norm_sf(z)
    else:
        z = (abs(u_a - mean) - 0.5) / sd
        p = 2.0 * _norm_sf(max(z, 0.0))
    return u_a, min(1.0, p)


def holm_bonferroni(pvalues: list[float], alpha: float) -> list[bool]:
    """Step-down multiple-test correction: sort ascending and reject
    p_(i) while p_(i) <= alpha / (m - i + 1), stopping at the first
    non-rejection. Decisions are returned in the input order."""
    if any(p < 0 or p > 1 for p in pvalues):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(pvalues)
    decisions = [False] * m
    order = sorted(range(m), key=pvalues.__getitem__)
    for rank, idx in enumerate(order):
        if pvalues[idx] <= alpha / (m - rank):
            decisions[idx] = True
        else:
            break
    return decisions


def quantiles(values: list[float]) -> tuple[float, float, float]:
    """25th, 50th and 75th percentiles with midpoint interpolation, so an
    even count's median is the average of the two middle values."""
    if not values:
        raise ValueError("quantiles of an empty sample")
    q = np.percentile(np.asarray(values, dtype=float), [25, 50, 75], method="midpoint")
    return float(q[0]), float(q[1]), float(q[2])
