"""Two-sided Wilcoxon signed-rank test.

Exact p-values come from the signed-rank sum distribution (dynamic program
over rank subsets, midranks handled by doubling) up to a sample-size
threshold; larger samples use the normal approximation with tie correction
and continuity correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm

EXACT_THRESHOLD = 25


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # min of the positive/negative rank sums
    pvalue: float
    n: int  # pairs remaining after dropping zero differences
    exact: bool
    degenerate: bool = False


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_two_sided(ranks: np.ndarray, w_plus: float) -> float:
    # Doubling turns midranks (multiples of 0.5) into integers for the DP.
    doubled = np.rint(2 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    counts /= counts.sum()
    w2 = int(round(2 * w_plus))
    lo, hi = min(w2, total - w2), max(w2, total - w2)
    p = counts[: lo + 1].sum() + counts[hi:].sum()
    return float(min(1.0, p))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> WilcoxonResult:
    """Paired two-sided test of a - b.

    Zero differences are dropped first.  All-zero differences make the test
    degenerate with p = 1.  Below ``EXACT_THRESHOLD`` remaining pairs the
    p-value is exact; beyond, normal approximation with tie correction.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if a_arr.shape != b_arr.shape:
        raise ValueError("paired samples must have equal length")
    diffs = a_arr - b_arr
    diffs = diffs[diffs != 0]
    n = len(diffs)
    if n == 0:
        return WilcoxonResult(statistic=0.0, pvalue=1.0, n=0, exact=True, degenerate=True)
    ranks = _midranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    statistic = min(w_plus, w_minus)
    if n <= EXACT_THRESHOLD:
        return WilcoxonResult(statistic, _exact_two_sided(ranks, w_plus), n, exact=True)
    mu = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
    variance -= (tie_counts**3 - tie_counts).sum() / 48.0
    if variance <= 0:
        return WilcoxonResult(statistic, 1.0, n, exact=False, degenerate=True)
    z = (abs(w_plus - mu) - 0.5) / np.sqrt(variance)
    p = float(min(1.0, 2.0 * norm.sf(max(z, 0.0))))
    return WilcoxonResult(statistic, p, n, exact=False)
