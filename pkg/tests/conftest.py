from __future__ import annotations

import pytest

from pathx.data import Dataset, Interaction
from pathx.kg import KnowledgeGraph, Triple


def graph_from(triples, items, **kwargs) -> KnowledgeGraph:
    return KnowledgeGraph([Triple(*t) for t in triples], items=items, **kwargs)


@pytest.fixture
def movie_kg() -> KnowledgeGraph:
    """Two war movies sharing a genre, a lead actor and a costume designer,
    plus comedies for IDF variety."""
    triples = [
        ("spr", "genre", "drama"),
        ("fg", "genre", "drama"),
        ("m3", "genre", "drama"),
        ("fg", "genre", "comedy"),
        ("m4", "genre", "comedy"),
        ("spr", "cast member", "tom hanks"),
        ("fg", "cast member", "tom hanks"),
        ("spr", "costume designer", "joanna johnston"),
        ("fg", "costume designer", "joanna johnston"),
        ("m3", "cast member", "other actor"),
        ("m4", "cast member", "other actor"),
    ]
    return graph_from(triples, items=["spr", "fg", "m3", "m4"])


@pytest.fixture
def hierarchy_kg() -> KnowledgeGraph:
    """Genre hierarchy: a hybrid genre that is an instance of two broader
    genres, and items attached at both levels."""
    triples = [
        ("i1", "genre", "sci-fi comedy"),
        ("i2", "genre", "science fiction"),
        ("i3", "genre", "comedy"),
        ("i4", "genre", "drama"),
        ("i2", "genre", "drama"),
        ("sci-fi comedy", "instance of", "science fiction"),
        ("sci-fi comedy", "instance of", "comedy"),
    ]
    return graph_from(triples, items=["i1", "i2", "i3", "i4"])


@pytest.fixture
def tiny_dataset() -> Dataset:
    interactions = [
        Interaction("u1", "spr", rating=5.0, timestamp=100.0),
        Interaction("u1", "m3", rating=3.0, timestamp=200.0),
        Interaction("u1", "m4", rating=4.0, timestamp=300.0),
        Interaction("u2", "fg", rating=4.5, timestamp=150.0),
        Interaction("u2", "spr", rating=2.0, timestamp=250.0),
        Interaction("u3", "m4", rating=1.0, timestamp=50.0),
    ]
    return Dataset(interactions, "timestamp")
