"""The six offline explanation path metrics.

Popularity (SEP) and recency (LIR) are ewma values over min-max normalized
profiles; diversity comes as per-user unique attribute share (ETD), distinct
linked items (MID) and the catalog-level union counts (TID, TPD).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .data import Dataset
from .explain import Explanation
from .kg import EntityId, KnowledgeGraph

DEFAULT_BETA = 0.3


@dataclass(frozen=True)
class EwmaEntry:
    entity: EntityId
    raw: float
    normalized: float
    ewma: float


@dataclass(frozen=True)
class EwmaProfile:
    entries: tuple[EwmaEntry, ...]
    beta: float

    def value(self, entity: EntityId) -> float:
        for entry in self.entries:
            if entry.entity == entity:
                return entry.ewma
        raise KeyError(entity)

    @property
    def max_ewma(self) -> float:
        return self.entries[-1].ewma


def build_ewma_profile(values: Sequence[tuple[EntityId, float]], beta: float = DEFAULT_BETA) -> EwmaProfile:
    """Sort ascending by raw value, min-max normalize, then apply the
    smoothing recursion ewma_i = (1-beta)*ewma_{i-1} + beta*norm_i with
    ewma_1 = norm_1.

    A constant series (max == min) normalizes to 0.5 everywhere, which is
    also the recursion's fixed point.
    """
    if not values:
        raise ValueError("cannot build a profile from no values")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie strictly between 0 and 1")
    ordered = sorted(values, key=lambda pair: (pair[1], pair[0]))
    raws = [raw for _, raw in ordered]
    lo, hi = raws[0], raws[-1]
    if hi > lo:
        normalized = [(raw - lo) / (hi - lo) for raw in raws]
    else:
        normalized = [0.5] * len(raws)
    entries: list[EwmaEntry] = []
    current = normalized[0]
    for (entity, raw), norm in zip(ordered, normalized):
        if entries:
            current = (1.0 - beta) * current + beta * norm
        entries.append(EwmaEntry(entity, float(raw), norm, current))
    return EwmaProfile(tuple(entries), beta)


def attribute_popularity_profile(
    g: KnowledgeGraph, universe: Iterable[EntityId], beta: float = DEFAULT_BETA
) -> EwmaProfile:
    """Ewma profile of graph popularity over a user's candidate attributes."""
    values = [(attr, float(g.attribute_popularity(attr))) for attr in sorted(set(universe))]
    return build_ewma_profile(values, beta)


def recency_profile(d: Dataset, user: str, beta: float = DEFAULT_BETA) -> EwmaProfile:
    """Ewma profile of a user's interacted items ordered by recency
    (timestamps, or listen weights in weight mode).  Repeat interactions
    keep the most recent value."""
    latest: dict[EntityId, float] = {}
    for inter in d.user_interactions(user):
        value = inter.recency_value(d.recency_mode)
        if inter.item not in latest or value > latest[inter.item]:
            latest[inter.item] = value
    if not latest:
        raise ValueError(f"user {user!r} has no interactions")
    return build_ewma_profile(sorted(latest.items()), beta)


def sep(
    g: KnowledgeGraph,
    explanations: Sequence[Explanation],
    beta: float = DEFAULT_BETA,
    universe: Iterable[EntityId] | None = None,
) -> float:
    """Mean ewma popularity of the attributes shown in the explanations.

    The normalization universe should be the user's full candidate
    attribute set; it defaults to the union of shown attributes.
    Explanations without attributes are skipped.
    """
    if universe is None:
        universe = set().union(*(e.shown_attributes for e in explanations)) if explanations else set()
    profile = attribute_popularity_profile(g, universe, beta)
    per_explanation = []
    for e in explanations:
        shown = sorted(e.shown_attributes)
        if not shown:
            continue
        per_explanation.append(sum(profile.value(a) for a in shown) / len(shown))
    if not per_explanation:
        raise ValueError("no explanation shows any attribute")
    return sum(per_explanation) / len(per_explanation)


def lir(
    d: Dataset,
    user: str,
    explanations: Sequence[Explanation],
    beta: float = DEFAULT_BETA,
) -> float:
    """Mean ewma recency of the profile items linked in the explanations.

    An explanation linking an item outside the user's profile is an
    integrity violation and raises.
    """
    profile = recency_profile(d, user, beta)
    known = {entry.entity for entry in profile.entries}
    per_explanation = []
    for e in explanations:
        if not e.linked_items:
            continue
        foreign = [i for i in e.linked_items if i not in known]
        if foreign:
            raise ValueError(f"explanation links items outside the profile of {user!r}: {foreign}")
        per_explanation.append(sum(profile.value(i) for i in e.linked_items) / len(e.linked_items))
    if not per_explanation:
        raise ValueError("no explanation links any profile item")
    return sum(per_explanation) / len(per_explanation)


def etd(explanations: Sequence[Explanation], k: int, candidate_attrs: Iterable[EntityId]) -> float:
    """Unique shown attributes over min(k, candidate count), capped at 1.

    The cap keeps score-tied multi-attribute explanations from pushing the
    ratio past 1 (a single top-1 explanation always scores exactly 1).
    """
    if k < 1:
        raise ValueError("k must be positive")
    universe = set(candidate_attrs)
    if not universe:
        raise ValueError("candidate attribute set is empty")
    shown: set[EntityId] = set()
    for e in explanations:
        shown |= e.shown_attributes
    return min(1.0, len(shown) / min(k, len(universe)))


def mid_per_user(explanations: Sequence[Explanation]) -> int:
    """Distinct profile items linked across one user's explanations."""
    items: set[EntityId] = set()
    for e in explanations:
        items |= set(e.linked_items)
    return len(items)


def mid(explanations_per_user: Mapping[str, Sequence[Explanation]]) -> float:
    """Mean over users of the per-user distinct linked item count."""
    if not explanations_per_user:
        raise ValueError("no users to aggregate")
    counts = [mid_per_user(expls) for _, expls in sorted(explanations_per_user.items())]
    return sum(counts) / len(counts)


def tid_tpd(all_explanations: Iterable[Explanation]) -> tuple[int, int]:
    """Catalog-level distinct linked items (TID) and shown attributes (TPD)
    across every user's explanations."""
    items: set[EntityId] = set()
    attrs: set[EntityId] = set()
    for e in all_explanations:
        items |= set(e.linked_items)
        attrs |= e.shown_attributes
    return len(items), len(attrs)


@dataclass(frozen=True)
class UserMetricRow:
    user: str
    sep: float
    lir: float
    etd: float
    mid: float
    shown_items: frozenset[EntityId]
    shown_attrs: frozenset[EntityId]
