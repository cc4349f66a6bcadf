"""Post-hoc attribute scoring over the knowledge graph and construction of
rendered path explanations.

Three scorers rank the attributes shared between a user's profile and a
recommended item:

* ``explod`` - link-frequency ratio on both sides, damped by attribute IDF
  (Musto et al., ExpLOD).
* ``explod_v2`` - extends ``explod`` to broader attributes one hierarchy
  hop up, scoring a broader attribute by the sum of its children's scores
  times its own IDF; leaf attributes keep the base score.
* ``pem`` - profile-vs-catalog item-coverage ratio with a log rarity
  penalty, counting items connected directly or through one hierarchy hop
  (Du et al., PEM).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .kg import EdgeType, EntityId, KnowledgeGraph

SCORERS = ("explod", "explod_v2", "pem")

SENTENCE_TEMPLATE = (
    "Like the movies {items} that has the {type} {attribute} "
    "watch {recommendation}, that has the same property"
)


@dataclass(frozen=True)
class ScoreContext:
    """Inputs shared by all scorers for one explanation decision.

    ``alpha`` weighs profile-side link frequency and ``beta_w`` the
    recommendation side; they must sum to one.
    """

    profile_items: frozenset[EntityId]
    recommended_items: frozenset[EntityId]
    catalog: frozenset[EntityId]
    alpha: float = 0.5
    beta_w: float = 0.5

    def __post_init__(self):
        if self.profile_items & self.recommended_items:
            raise ValueError("profile and recommended item sets must be disjoint")
        if not self.profile_items <= self.catalog or not self.recommended_items <= self.catalog:
            raise ValueError("profile and recommended items must be part of the catalog")
        if abs(self.alpha + self.beta_w - 1.0) > 1e-9:
            raise ValueError("alpha and beta_w must sum to 1")


@dataclass(frozen=True)
class Explanation:
    recommended: EntityId
    attributes: tuple[tuple[EntityId, EdgeType, float], ...]
    linked_items: tuple[EntityId, ...]
    sentence: str

    @property
    def shown_attributes(self) -> frozenset[EntityId]:
        return frozenset(a for a, _, _ in self.attributes)


def _item_connected(g: KnowledgeGraph, item: EntityId, attr: EntityId, transitive: bool) -> bool:
    if g.relations_between(item, attr):
        return True
    if not transitive:
        return False
    return any(g.relations_between(item, child) for child in g.children_of(attr))


def score_explod(g: KnowledgeGraph, ctx: ScoreContext, p: EntityId) -> float:
    """(alpha * n_links(p, profile)/|profile| + beta * n_links(p, recs)/|recs|) * IDF(p).

    Links are counted per triple, not per distinct item.  Undefined when no
    item links to ``p``.
    """
    n_u = g.item_link_count(p, ctx.profile_items)
    n_r = g.item_link_count(p, ctx.recommended_items)
    frequency = ctx.alpha * n_u / len(ctx.profile_items) + ctx.beta_w * n_r / len(ctx.recommended_items)
    return frequency * g.idf(p)


def score_explod_v2(g: KnowledgeGraph, ctx: ScoreContext, b: EntityId) -> float:
    """Broader attributes score as the sum of their children's base scores
    times IDF(b); attributes without children fall back to the base score."""
    children = g.children_of(b)
    if not children:
        return score_explod(g, ctx, b)
    total = 0.0
    for child in sorted(children):
        if g.df(child) < 1:
            continue  # child linked to no item contributes nothing
        total += score_explod(g, ctx, child)
    return total * g.idf(b)


def score_pem(g: KnowledgeGraph, ctx: ScoreContext, p: EntityId) -> float:
    """Coverage ratio of ``p`` in the profile versus the catalog, penalized
    by log of the direct item count.

    Item coverage counts items connected directly or through one hierarchy
    hop; the rarity penalty intentionally uses the direct count only.
    Attributes directly linked to at most one item floor at zero.
    """
    reachable = g.items_with_attribute(p, transitive=True)
    covered_catalog = len(reachable & ctx.catalog)
    if covered_catalog < 1:
        raise ValueError(f"attribute {p!r} reaches no catalog item")
    direct_catalog = len(g.items_with_attribute(p, transitive=False) & ctx.catalog)
    if direct_catalog <= 1:
        return 0.0
    covered_profile = len(reachable & ctx.profile_items)
    ratio = (covered_profile / len(ctx.profile_items)) / (covered_catalog / len(ctx.catalog))
    penalty = math.log(direct_catalog)
    if g.log_base is not None:
        penalty /= math.log(g.log_base)
    return ratio * penalty


def attribute_reach(g: KnowledgeGraph, items: Iterable[EntityId], scorer: str) -> frozenset[EntityId]:
    """Attributes connected to ``items`` under the scorer's connectivity:
    direct triples only for ``explod``, plus broader attributes one
    hierarchy hop up for ``explod_v2`` and ``pem``."""
    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}; expected one of {SCORERS}")
    direct: set[EntityId] = set()
    for item in items:
        direct |= g.item_attributes(item)
    if scorer == "explod":
        return frozenset(direct)
    broader: set[EntityId] = set()
    for attr in direct:
        broader |= g.broader_of(attr)
    return frozenset(direct | broader)


def candidate_attributes(
    g: KnowledgeGraph,
    ctx: ScoreContext,
    scorer: str,
    profile_reach: frozenset[EntityId] | None = None,
) -> tuple[EntityId, ...]:
    """Attributes shared between the profile and the recommended items
    under the scorer's connectivity notion, sorted by id.

    ``profile_reach`` lets callers scoring many recommendation lists for
    one profile reuse the profile side of the intersection.
    """
    if profile_reach is None:
        profile_reach = attribute_reach(g, ctx.profile_items, scorer)
    shared = set(profile_reach) & set(attribute_reach(g, ctx.recommended_items, scorer))
    if scorer in ("explod", "explod_v2"):
        # the IDF factor is undefined for attributes no item links to
        shared = {p for p in shared if g.df(p) >= 1}
    return tuple(sorted(shared))


def rank_attributes(
    g: KnowledgeGraph,
    ctx: ScoreContext,
    scorer: str,
    profile_reach: frozenset[EntityId] | None = None,
) -> list[tuple[EntityId, float]]:
    """Score all shared candidate attributes, ordered by score descending
    and attribute id ascending.  Empty when no attribute is shared, which
    the caller counts as an unexplainable recommendation."""
    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}; expected one of {SCORERS}")
    score_fn = {"explod": score_explod, "explod_v2": score_explod_v2, "pem": score_pem}[scorer]
    scored = [(p, score_fn(g, ctx, p)) for p in candidate_attributes(g, ctx, scorer, profile_reach)]
    return sorted(scored, key=lambda pair: (-pair[1], pair[0]))


def _edge_for(g: KnowledgeGraph, recommended: EntityId, attr: EntityId) -> EdgeType:
    rels = g.relations_between(recommended, attr)
    if rels:
        return rels[0]
    # reached through a child attribute: show the edge into the child
    child_rels = sorted(
        rel
        for child in g.children_of(attr)
        for rel in g.relations_between(recommended, child)
    )
    return child_rels[0] if child_rels else ""


def build_explanation(
    g: KnowledgeGraph,
    ctx: ScoreContext,
    ranked: Sequence[tuple[EntityId, float]],
    scorer: str = "explod",
    max_attrs: int = 3,
    max_items: int = 3,
    recency: Mapping[EntityId, float] | None = None,
    names: Mapping[EntityId, str] | None = None,
) -> Explanation:
    """Assemble the rendered explanation from a non-empty attribute ranking.

    The top attribute is always shown; further attributes only on exact
    score ties, capped at ``max_attrs`` and restricted to attributes shared
    by every linked profile item.  Up to ``max_items`` profile items
    connected to the top attribute appear, most recent first when recency
    values are given.
    """
    if not ranked:
        raise ValueError("cannot build an explanation from an empty ranking")
    if len(ctx.recommended_items) != 1:
        raise ValueError("an explanation sentence covers exactly one recommended item")
    transitive = scorer in ("explod_v2", "pem")
    top_attr, top_score = ranked[0]
    (recommended,) = ctx.recommended_items

    connected = [
        item for item in sorted(ctx.profile_items) if _item_connected(g, item, top_attr, transitive)
    ]
    if recency is not None:
        connected.sort(key=lambda item: (-recency.get(item, float("-inf")), item))
    linked = tuple(connected[:max_items])

    attrs: list[tuple[EntityId, EdgeType, float]] = [(top_attr, _edge_for(g, recommended, top_attr), top_score)]
    for attr, score in ranked[1:]:
        if len(attrs) >= max_attrs:
            break
        if score != top_score:
            break
        if all(_item_connected(g, item, attr, transitive) for item in linked):
            attrs.append((attr, _edge_for(g, recommended, attr), score))

    def display(entity: EntityId) -> str:
        return names.get(entity, entity) if names else entity

    sentence = SENTENCE_TEMPLATE.format(
        items=", ".join(display(i) for i in linked),
        type=", ".join(dict.fromkeys(edge for _, edge, _ in attrs if edge)),
        attribute=", ".join(display(a) for a, _, _ in attrs),
        recommendation=display(recommended),
    )
    return Explanation(
        recommended=recommended,
        attributes=tuple(attrs),
        linked_items=linked,
        sentence=sentence,
    )
