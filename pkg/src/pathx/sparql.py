"""SPARQL extraction of item attributes into a knowledge graph.

Queries an endpoint in batches of external ids, keeps only whitelisted edge
types, strips identifier/descriptive properties, and caches the result as a
canonical triple file so offline runs never touch the network.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import httpx

from .kg import DEFAULT_HIERARCHY_EDGES, EdgeType, EntityId, KnowledgeGraph, Triple

logger = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "pathx-kg-extractor/0.1 (offline recommender explanation toolkit)"

#: Properties that identify rather than describe an entity; dropped at
#: extraction time.  Configurable per call.
DEFAULT_PROPERTY_BLOCKLIST = (
    "IMDb ID",
    "Freebase ID",
    "TMDB movie ID",
    "Rotten Tomatoes ID",
    "MusicBrainz artist ID",
    "Discogs artist ID",
    "box office",
    "image",
    "official website",
)

# One VALUES block per batch; the endpoint answers with one row per
# (subject, property label, object label) binding.
DEFAULT_QUERY_TEMPLATE = """\
SELECT ?s ?pLabel ?oLabel WHERE {{
  VALUES ?s {{ {ids} }}
  ?s ?p ?o .
  SERVICE wikibase:label {{ bd:serviceParam wikibase:language "en". }}
}}"""


class ExtractionError(RuntimeError):
    """Endpoint failure after bounded retries; carries the partial graph."""

    def __init__(self, failed_ids: Sequence[str], partial: KnowledgeGraph):
        super().__init__(
            f"extraction failed for {len(failed_ids)} external ids: "
            + ", ".join(list(failed_ids)[:10])
            + ("..." if len(failed_ids) > 10 else "")
        )
        self.failed_ids = list(failed_ids)
        self.partial = partial


@dataclass
class SparqlClient:
    """Minimal SPARQL-over-HTTP client with bounded retries."""

    endpoint: str
    user_agent: str = DEFAULT_USER_AGENT
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 0.5
    transport: httpx.BaseTransport | None = field(default=None, repr=False)

    def query(self, query: str) -> list[dict]:
        """POST a query, returning the result bindings.

        Retries transient failures with exponential backoff and raises the
        last error once ``max_retries`` attempts are exhausted.
        """
        headers = {"User-Agent": self.user_agent, "Accept": "application/sparql-results+json"}
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                with httpx.Client(transport=self.transport, timeout=self.timeout) as client:
                    response = client.post(self.endpoint, data={"query": query}, headers=headers)
                    response.raise_for_status()
                    payload = response.json()
                return payload["results"]["bindings"]
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
                if attempt + 1 < self.max_retries:
                    time.sleep(self.backoff * (2**attempt))
        raise last_error  # type: ignore[misc]


def _binding_value(binding: dict, name: str) -> str | None:
    entry = binding.get(name)
    if not entry:
        return None
    return entry.get("value")


def extract_from_endpoint(
    endpoint: str | SparqlClient,
    id_map: Mapping[EntityId, str],
    edge_whitelist: Sequence[EdgeType],
    batch: int = 50,
    cache_path: str | Path | None = None,
    property_blocklist: Sequence[str] = DEFAULT_PROPERTY_BLOCKLIST,
    hierarchy_edges: Sequence[EdgeType] = DEFAULT_HIERARCHY_EDGES,
    query_template: str = DEFAULT_QUERY_TEMPLATE,
) -> KnowledgeGraph:
    """Build a graph of whitelisted attributes for the items in ``id_map``.

    ``id_map`` maps catalog item ids to the endpoint's external ids (for
    Wikidata, ``wd:Q...`` terms).  Batches of ``batch`` ids are queried at a
    time.  External ids the endpoint does not know are skipped and logged;
    ids whose batches keep failing after retries abort the extraction with
    :class:`ExtractionError` carrying the partial graph.  The resulting
    graph is written to ``cache_path`` (canonical triple file) when given.
    """
    if not edge_whitelist:
        raise ValueError("edge whitelist must be non-empty")
    if batch < 1:
        raise ValueError("batch size must be positive")
    client = endpoint if isinstance(endpoint, SparqlClient) else SparqlClient(endpoint)
    whitelist = set(edge_whitelist) | set(hierarchy_edges)
    blocklist = set(property_blocklist)
    # Endpoints answer with full URIs while VALUES uses prefixed terms; key
    # the reverse map on both forms plus the bare local name.
    reverse: dict[str, EntityId] = {}
    for item_id in sorted(id_map):
        external = str(id_map[item_id])
        local = external.rsplit("/", 1)[-1].rsplit(":", 1)[-1]
        for key in (external, local):
            reverse.setdefault(key, item_id)

    ordered_external = sorted(str(id_map[i]) for i in sorted(set(id_map)))
    triples: list[Triple] = []
    resolved: set[str] = set()
    failed: list[str] = []
    for start in range(0, len(ordered_external), batch):
        chunk = ordered_external[start : start + batch]
        query = query_template.format(ids=" ".join(chunk))
        try:
            bindings = client.query(query)
        except Exception as exc:
            logger.warning("batch starting at %s failed: %s", chunk[0], exc)
            failed.extend(chunk)
            continue
        for row in bindings:
            subject = _binding_value(row, "s")
            prop = _binding_value(row, "pLabel")
            obj = _binding_value(row, "oLabel")
            if subject is None or prop is None or obj is None:
                continue
            item = reverse.get(subject) or reverse.get(subject.rsplit("/", 1)[-1].rsplit(":", 1)[-1])
            if item is None:
                continue
            resolved.add(item)
            if prop in blocklist or prop not in whitelist:
                continue
            if item == obj:
                continue
            triples.append(Triple(item, prop, obj))

    failed_set = set(failed)
    for external in ordered_external:
        item = reverse.get(external)
        if external not in failed_set and item is not None and item not in resolved:
            logger.info("external id %s unknown to endpoint; skipped", external)

    graph = KnowledgeGraph(triples, items=sorted(resolved), hierarchy_edges=hierarchy_edges)
    if failed:
        raise ExtractionError(failed, graph)
    if cache_path is not None:
        graph.save_triples(cache_path)
    return graph
