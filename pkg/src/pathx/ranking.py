"""Accuracy and beyond-accuracy ranking metrics for top-k lists: NDCG, MAP,
aggregate diversity, exposure entropy/Gini and catalog coverage."""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .kg import EntityId
from .recommenders import RankedList


def ndcg_at_k(ranked: Sequence[EntityId], relevant: set[EntityId], k: int) -> float:
    """Binary-relevance NDCG@k; the ideal DCG places min(k, |relevant|)
    hits at the top."""
    if not relevant:
        raise ValueError("ndcg undefined for an empty relevant set")
    dcg = sum(1.0 / math.log2(rank + 2) for rank, item in enumerate(ranked[:k]) if item in relevant)
    ideal = sum(1.0 / math.log2(rank + 2) for rank in range(min(k, len(relevant))))
    return dcg / ideal


def average_precision_at_k(ranked: Sequence[EntityId], relevant: set[EntityId], k: int) -> float:
    if not relevant:
        raise ValueError("average precision undefined for an empty relevant set")
    hits = 0
    precision_sum = 0.0
    for rank, item in enumerate(ranked[:k], start=1):
        if item in relevant:
            hits += 1
            precision_sum += hits / rank
    return precision_sum / min(k, len(relevant))


def exposure_counts(recs: Sequence[RankedList], k: int, catalog: Sequence[EntityId]) -> np.ndarray:
    """How often each catalog item appears in the users' top-k lists."""
    index = {item: idx for idx, item in enumerate(catalog)}
    counts = np.zeros(len(catalog))
    for rl in recs:
        for item, _ in rl.items[:k]:
            if item in index:
                counts[index[item]] += 1
    return counts


def exposure_entropy(counts: np.ndarray) -> float:
    """Shannon entropy (nats) of the exposure distribution."""
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def exposure_gini(counts: np.ndarray) -> float:
    """Gini coefficient of exposure over the whole catalog (zeros count).

    0 means perfectly even exposure of every catalog item; 1 is the
    single-item extreme.
    """
    n = len(counts)
    total = counts.sum()
    if n == 0 or total == 0:
        return 0.0
    ordered = np.sort(counts)
    ranks = np.arange(1, n + 1)
    return float(((2 * ranks - n - 1) * ordered).sum() / (n * total))


def ranking_metrics(
    recs: Sequence[RankedList],
    test: Mapping[str, set[EntityId]],
    ks: Iterable[int],
    catalog: Sequence[EntityId],
) -> dict[str, dict[int, float]]:
    """Metric bundle over one fold.

    ``test`` maps each user to their held-out items; users with an empty
    test set are excluded from the NDCG/MAP means.  Exposure metrics are
    computed over recommendation counts across all users at each k.
    """
    if not any(test.values()):
        raise ValueError("test fold holds no interactions")
    bundle: dict[str, dict[int, float]] = {
        name: {} for name in ("ndcg", "map", "agg_div", "entropy", "gini", "coverage")
    }
    by_user = {rl.user: [item for item, _ in rl.items] for rl in recs}
    for k in sorted(set(ks)):
        ndcgs, aps = [], []
        for user in sorted(by_user):
            relevant = test.get(user, set())
            if not relevant:
                continue
            ndcgs.append(ndcg_at_k(by_user[user], relevant, k))
            aps.append(average_precision_at_k(by_user[user], relevant, k))
        counts = exposure_counts(recs, k, catalog)
        distinct = float((counts > 0).sum())
        bundle["ndcg"][k] = sum(ndcgs) / len(ndcgs) if ndcgs else 0.0
        bundle["map"][k] = sum(aps) / len(aps) if aps else 0.0
        bundle["agg_div"][k] = distinct
        bundle["entropy"][k] = exposure_entropy(counts)
        bundle["gini"][k] = exposure_gini(counts)
        bundle["coverage"][k] = distinct / len(catalog) if catalog else 0.0
    return bundle
