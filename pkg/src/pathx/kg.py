"""In-memory knowledge graph over (head, relation, tail) triples.

Entities are opaque string ids (catalog item ids, Wikidata Q-ids, plain
labels).  A subset of entities is flagged as catalog items; every other
entity is an attribute.  The graph is immutable after construction and safe
to share across threads and worker processes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

EntityId = str
EdgeType = str

#: Edge types that express attribute hierarchy (child --edge--> broader).
DEFAULT_HIERARCHY_EDGES = ("instance of", "subclass of")


class TripleFileError(ValueError):
    """Raised when a triple file contains a malformed row."""

    def __init__(self, path: str | Path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class UnknownEntityError(KeyError):
    """Raised when an operation references an entity absent from the graph."""


@dataclass(frozen=True)
class Triple:
    head: EntityId
    relation: EdgeType
    tail: EntityId

    def __post_init__(self):
        if not self.head or not self.relation or not self.tail:
            raise ValueError("triple fields must be non-empty")
        if self.head == self.tail:
            raise ValueError(f"self-loop triple not allowed: {self.head}")


class KnowledgeGraph:
    """Triple store with degree indexes, an IDF cache and hierarchy queries.

    Duplicate triples are dropped at build time (the count of duplicates is
    kept for reporting).  Attribute popularity counts distinct stored
    triples whose tail is the attribute, regardless of the head's kind.
    """

    def __init__(
        self,
        triples: Iterable[Triple],
        items: Iterable[EntityId] = (),
        hierarchy_edges: Sequence[EdgeType] = DEFAULT_HIERARCHY_EDGES,
        log_base: float | None = None,
    ):
        seen: set[tuple[str, str, str]] = set()
        stored: list[Triple] = []
        duplicates = 0
        for t in triples:
            key = (t.head, t.relation, t.tail)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            stored.append(t)
        stored.sort(key=lambda t: (t.head, t.relation, t.tail))
        self._triples: tuple[Triple, ...] = tuple(stored)
        self.duplicates_dropped = duplicates
        self.hierarchy_edges: frozenset[EdgeType] = frozenset(hierarchy_edges)
        self.log_base = log_base  # None -> natural log

        entities: set[EntityId] = set()
        tail_counts: dict[EntityId, int] = {}
        out_edges: dict[EntityId, list[tuple[EdgeType, EntityId]]] = {}
        in_edges: dict[EntityId, list[tuple[EdgeType, EntityId]]] = {}
        edge_counts: dict[EdgeType, int] = {}
        children: dict[EntityId, list[EntityId]] = {}
        for t in self._triples:
            entities.add(t.head)
            entities.add(t.tail)
            tail_counts[t.tail] = tail_counts.get(t.tail, 0) + 1
            out_edges.setdefault(t.head, []).append((t.relation, t.tail))
            in_edges.setdefault(t.tail, []).append((t.relation, t.head))
            edge_counts[t.relation] = edge_counts.get(t.relation, 0) + 1
            if t.relation in self.hierarchy_edges:
                children.setdefault(t.tail, []).append(t.head)

        self._entities: frozenset[EntityId] = frozenset(entities)
        self._tail_counts = tail_counts
        self._out = out_edges
        self._in = in_edges
        self._edge_counts = edge_counts
        self._children = {b: tuple(sorted(set(cs))) for b, cs in children.items()}

        item_set = frozenset(items) & self._entities
        self.items: frozenset[EntityId] = item_set

        # Per-attribute direct item links: attr -> {item -> sorted relations}.
        # Backbone for df_p, link counts and sentence edge types.
        attr_links: dict[EntityId, dict[EntityId, tuple[EdgeType, ...]]] = {}
        for t in self._triples:
            if t.head in item_set and t.tail not in item_set:
                per_item = attr_links.setdefault(t.tail, {})
                per_item[t.head] = per_item.get(t.head, ()) + (t.relation,)
        self._attr_links = {
            attr: {item: tuple(sorted(rels)) for item, rels in per_item.items()}
            for attr, per_item in attr_links.items()
        }
        self._idf_cache: dict[EntityId, float] = {}

    # -- basic accessors ---------------------------------------------------

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    @property
    def entities(self) -> frozenset[EntityId]:
        return self._entities

    @property
    def n_entities(self) -> int:
        return len(self._entities)

    @property
    def n_triples(self) -> int:
        return len(self._triples)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def edge_types(self) -> tuple[EdgeType, ...]:
        return tuple(sorted(self._edge_counts))

    def __contains__(self, entity: EntityId) -> bool:
        return entity in self._entities

    def out_edges(self, e: EntityId) -> tuple[tuple[EdgeType, EntityId], ...]:
        return tuple(self._out.get(e, ()))

    def in_edges(self, e: EntityId) -> tuple[tuple[EdgeType, EntityId], ...]:
        return tuple(self._in.get(e, ()))

    # -- statistics ----------------------------------------------------------

    def attribute_popularity(self, e: EntityId) -> int:
        """Number of stored triples referencing ``e`` as tail."""
        if e not in self._entities:
            raise UnknownEntityError(e)
        return self._tail_counts.get(e, 0)

    def df(self, p: EntityId) -> int:
        """Number of catalog items directly linked to attribute ``p``."""
        if p not in self._entities:
            raise UnknownEntityError(p)
        return len(self._attr_links.get(p, {}))

    def idf(self, p: EntityId) -> float:
        """Inverse document frequency of attribute ``p``: log(N / df_p).

        N is the number of catalog items, df_p the number of items directly
        linked to ``p``.  Natural log unless the graph was built with an
        explicit ``log_base``.  Undefined (error) when no item links to
        ``p``.
        """
        cached = self._idf_cache.get(p)
        if cached is not None:
            return cached
        df_p = self.df(p)
        if df_p < 1:
            raise ValueError(f"idf undefined: attribute {p!r} linked to no item")
        value = math.log(self.n_items / df_p)
        if self.log_base is not None:
            value /= math.log(self.log_base)
        self._idf_cache[p] = value
        return value

    def children_of(self, b: EntityId) -> frozenset[EntityId]:
        """Direct child attributes of ``b`` (entities with a hierarchy edge
        into ``b``).  One level only; no transitive closure."""
        return frozenset(self._children.get(b, ()))

    def broader_of(self, p: EntityId) -> frozenset[EntityId]:
        """Broader attributes one hierarchy hop above ``p``."""
        return frozenset(
            tail for rel, tail in self._out.get(p, ()) if rel in self.hierarchy_edges
        )

    def items_with_attribute(self, p: EntityId, transitive: bool = False) -> frozenset[EntityId]:
        """Items connected to attribute ``p``.

        Direct connection means a triple item -> p.  With ``transitive`` the
        items directly linked to a child attribute of ``p`` (one hierarchy
        hop) are included as well.
        """
        if p not in self._entities:
            raise UnknownEntityError(p)
        direct = set(self._attr_links.get(p, {}))
        if not transitive:
            return frozenset(direct)
        for child in self._children.get(p, ()):
            direct.update(self._attr_links.get(child, {}))
        return frozenset(direct)

    def item_link_count(self, p: EntityId, items: Iterable[EntityId]) -> int:
        """Number of triples linking attribute ``p`` to any item in ``items``."""
        per_item = self._attr_links.get(p, {})
        return sum(len(per_item.get(i, ())) for i in items)

    def item_attributes(self, item: EntityId) -> frozenset[EntityId]:
        """Attributes directly linked from ``item``."""
        return frozenset(
            tail for _, tail in self._out.get(item, ()) if tail not in self.items
        )

    def relations_between(self, item: EntityId, attr: EntityId) -> tuple[EdgeType, ...]:
        """Sorted edge types of direct triples item -> attr (may be empty)."""
        return self._attr_links.get(attr, {}).get(item, ())

    def edge_type_distribution(self) -> list[tuple[EdgeType, int]]:
        """Triple counts per edge type, most frequent first (ties by label)."""
        return sorted(self._edge_counts.items(), key=lambda kv: (-kv[1], kv[0]))

    # -- persistence ---------------------------------------------------------

    def save_triples(self, path: str | Path, delimiter: str = "\t") -> None:
        """Write the graph as a canonical triple file (sorted rows, item flag
        in the fourth column).  Reloading the file reproduces the graph."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter=delimiter)
            for t in self._triples:
                writer.writerow(
                    [t.head, t.relation, t.tail, "1" if t.head in self.items else "0"]
                )

    def stats(self) -> dict[str, int]:
        return {
            "entities": self.n_entities,
            "triples": self.n_triples,
            "edge_types": len(self._edge_counts),
            "items": self.n_items,
            "duplicates_dropped": self.duplicates_dropped,
        }


def _looks_like_header(row: Sequence[str]) -> bool:
    lowered = [c.strip().lower() for c in row[:3]]
    return lowered[:1] in (["head"], ["subject"], ["s"]) or lowered == ["head", "relation", "tail"]


def load_triples(
    path: str | Path,
    delimiter: str = "\t",
    has_header: bool | None = None,
    items: Iterable[EntityId] | None = None,
    item_flag_column: bool = False,
    hierarchy_edges: Sequence[EdgeType] = DEFAULT_HIERARCHY_EDGES,
    log_base: float | None = None,
) -> KnowledgeGraph:
    """Build a graph from a delimited triple file.

    Rows are ``head, relation, tail`` with an optional fourth column
    flagging item heads (truthy values: 1/true/item).  Item nodes may
    instead be passed via ``items``; when neither is given, heads of
    non-hierarchy triples are treated as items.

    A malformed row (fewer than three non-empty columns) raises
    :class:`TripleFileError` with the line number; exact duplicate rows are
    dropped and counted.
    """
    triples: list[Triple] = []
    flagged: set[EntityId] = set()
    hier = frozenset(hierarchy_edges)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for line_no, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if line_no == 1 and (has_header or (has_header is None and _looks_like_header(row))):
                continue
            if len(row) < 3:
                raise TripleFileError(path, line_no, f"expected 3 columns, got {len(row)}")
            head, relation, tail = (c.strip() for c in row[:3])
            if not head or not relation or not tail:
                raise TripleFileError(path, line_no, "empty field in triple")
            if head == tail:
                raise TripleFileError(path, line_no, f"self-loop on {head!r}")
            triples.append(Triple(head, relation, tail))
            if item_flag_column and len(row) >= 4 and row[3].strip().lower() in ("1", "true", "item"):
                flagged.add(head)

    if item_flag_column:
        item_nodes: Iterable[EntityId] = flagged
    elif items is not None:
        item_nodes = items
    else:
        tails = {t.tail for t in triples}
        item_nodes = {t.head for t in triples if t.relation not in hier} - tails
    return KnowledgeGraph(triples, item_nodes, hierarchy_edges=hierarchy_edges, log_base=log_base)


@dataclass
class DegreeReport:
    """Edge-type distribution summary used for long-tail sanity checks."""

    distribution: list[tuple[EdgeType, int]]
    top_edge: EdgeType = field(init=False)
    top_count: int = field(init=False)
    median_count: float = field(init=False)

    def __post_init__(self):
        if not self.distribution:
            raise ValueError("empty graph has no edge-type distribution")
        self.top_edge, self.top_count = self.distribution[0]
        counts = sorted(c for _, c in self.distribution)
        mid = len(counts) // 2
        if len(counts) % 2:
            self.median_count = float(counts[mid])
        else:
            self.median_count = (counts[mid - 1] + counts[mid]) / 2.0

    @property
    def long_tailed(self) -> bool:
        return self.top_count > 5 * self.median_count


def degree_report(g: KnowledgeGraph) -> DegreeReport:
    return DegreeReport(g.edge_type_distribution())
