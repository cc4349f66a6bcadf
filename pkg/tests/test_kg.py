from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathx.kg import (
    KnowledgeGraph,
    Triple,
    TripleFileError,
    UnknownEntityError,
    degree_report,
    load_triples,
)

from conftest import graph_from


def write_lines(path, rows, delimiter="\t"):
    path.write_text("\n".join(delimiter.join(row) for row in rows) + "\n", encoding="utf-8")


class TestLoadTriples:
    def test_three_row_fixture_with_duplicate(self, tmp_path):
        path = tmp_path / "kg.tsv"
        write_lines(path, [("a", "genre", "x"), ("b", "genre", "x"), ("a", "genre", "x")])
        g = load_triples(path, items=["a", "b"])
        assert g.n_triples == 2
        assert g.duplicates_dropped == 1

    def test_empty_file(self, tmp_path):
        path = tmp_path / "kg.tsv"
        path.write_text("", encoding="utf-8")
        g = load_triples(path)
        assert g.stats() == {
            "entities": 0,
            "triples": 0,
            "edge_types": 0,
            "items": 0,
            "duplicates_dropped": 0,
        }

    def test_malformed_row_reports_line_number(self, tmp_path):
        path = tmp_path / "kg.tsv"
        write_lines(path, [("a", "genre", "x"), ("broken",)])
        with pytest.raises(TripleFileError) as excinfo:
            load_triples(path)
        assert excinfo.value.line_no == 2

    def test_item_flag_column(self, tmp_path):
        path = tmp_path / "kg.tsv"
        write_lines(path, [("a", "genre", "x", "1"), ("x", "subclass of", "y", "0")])
        g = load_triples(path, item_flag_column=True)
        assert g.items == frozenset({"a"})

    def test_default_items_are_non_hierarchy_heads(self, tmp_path):
        path = tmp_path / "kg.tsv"
        write_lines(path, [("a", "genre", "x"), ("x", "subclass of", "y")])
        g = load_triples(path)
        assert g.items == frozenset({"a"})

    def test_counts_reported(self, movie_kg):
        stats = movie_kg.stats()
        assert stats["entities"] == 9
        assert stats["triples"] == 11
        assert stats["edge_types"] == 3

    def test_round_trip_identity(self, movie_kg, tmp_path):
        path = tmp_path / "export.tsv"
        movie_kg.save_triples(path)
        reloaded = load_triples(path, item_flag_column=True)
        assert reloaded.triples == movie_kg.triples
        assert reloaded.items == movie_kg.items


class TestPopularityAndIdf:
    def test_hand_counted_popularity(self, movie_kg):
        assert movie_kg.attribute_popularity("drama") == 3
        assert movie_kg.attribute_popularity("tom hanks") == 2

    def test_never_a_tail_is_zero(self, movie_kg):
        assert movie_kg.attribute_popularity("spr") == 0

    def test_unknown_entity_errors(self, movie_kg):
        with pytest.raises(UnknownEntityError):
            movie_kg.attribute_popularity("nope")

    def test_drama_is_most_popular_genre(self, movie_kg):
        genres = ["drama", "comedy"]
        top = max(genres, key=movie_kg.attribute_popularity)
        assert top == "drama"

    def test_popularity_sums_to_non_item_tail_count(self, movie_kg):
        attrs = movie_kg.entities - movie_kg.items
        total = sum(movie_kg.attribute_popularity(a) for a in attrs)
        expected = sum(1 for t in movie_kg.triples if t.tail not in movie_kg.items)
        assert total == expected

    def test_idf_hand_values(self):
        g = graph_from(
            [("i1", "r", "p"), ("i2", "r", "p"), ("i3", "r", "q"), ("i4", "r", "q2")],
            items=["i1", "i2", "i3", "i4"],
        )
        assert g.idf("p") == pytest.approx(math.log(2), abs=1e-12)

    def test_idf_uniform_attribute_is_zero(self):
        g = graph_from([(f"i{n}", "r", "p") for n in range(4)], items=[f"i{n}" for n in range(4)])
        assert g.idf("p") == 0.0

    def test_idf_singleton(self):
        triples = [(f"i{n}", "r", f"a{n}") for n in range(10)]
        g = graph_from(triples, items=[f"i{n}" for n in range(10)])
        assert g.idf("a0") == pytest.approx(math.log(10), abs=1e-12)

    def test_idf_error_when_unattached(self):
        g = graph_from([("i1", "r", "p"), ("p", "subclass of", "b")], items=["i1"])
        with pytest.raises(ValueError):
            g.idf("b")

    def test_log_base_override(self):
        g = graph_from(
            [("i1", "r", "p"), ("i2", "r", "q")],
            items=["i1", "i2"],
            log_base=10.0,
        )
        assert g.idf("p") == pytest.approx(math.log10(2), abs=1e-12)

    @given(st.integers(min_value=1, max_value=20), st.integers(min_value=1, max_value=20))
    def test_idf_monotone_decreasing_in_df(self, df_a, df_b):
        n = 25
        triples = []
        for i in range(df_a):
            triples.append((f"i{i}", "r", "a"))
        for i in range(df_b):
            triples.append((f"i{i}", "r", "b"))
        triples.extend((f"i{i}", "r", "filler") for i in range(n))
        g = graph_from(triples, items=[f"i{i}" for i in range(n)])
        if df_a < df_b:
            assert g.idf("a") > g.idf("b")
        elif df_a > df_b:
            assert g.idf("a") < g.idf("b")
        else:
            assert g.idf("a") == g.idf("b")


class TestHierarchy:
    def test_broader_and_children(self, hierarchy_kg):
        assert hierarchy_kg.broader_of("sci-fi comedy") == {"science fiction", "comedy"}
        assert hierarchy_kg.children_of("science fiction") == {"sci-fi comedy"}
        assert hierarchy_kg.children_of("comedy") == {"sci-fi comedy"}

    def test_leaf_has_no_children(self, hierarchy_kg):
        assert hierarchy_kg.children_of("drama") == frozenset()

    def test_chain_children_are_direct_only(self):
        g = graph_from(
            [("i1", "genre", "a"), ("a", "instance of", "b"), ("b", "instance of", "c")],
            items=["i1"],
        )
        assert g.children_of("c") == {"b"}
        assert g.children_of("b") == {"a"}


class TestItemsWithAttribute:
    def test_direct(self, hierarchy_kg):
        assert hierarchy_kg.items_with_attribute("drama") == {"i2", "i4"}

    def test_transitive_includes_child_linked_items(self, hierarchy_kg):
        assert hierarchy_kg.items_with_attribute("comedy", transitive=True) == {"i1", "i3"}

    def test_non_transitive_excludes_child_linked_items(self, hierarchy_kg):
        assert hierarchy_kg.items_with_attribute("comedy", transitive=False) == {"i3"}

    def test_unknown_attribute_errors(self, hierarchy_kg):
        with pytest.raises(UnknownEntityError):
            hierarchy_kg.items_with_attribute("nope")

    @given(st.data())
    def test_direct_subset_of_transitive(self, data):
        n_items = data.draw(st.integers(min_value=1, max_value=5))
        items = [f"i{n}" for n in range(n_items)]
        attrs = ["a", "b", "c"]
        triples = []
        for i in items:
            for a in data.draw(st.sets(st.sampled_from(attrs), min_size=1)):
                triples.append((i, "r", a))
        if data.draw(st.booleans()):
            triples.append(("a", "instance of", "b"))
        g = KnowledgeGraph([Triple(*t) for t in triples], items=items)
        for attr in attrs:
            if attr in g:
                assert g.items_with_attribute(attr, False) <= g.items_with_attribute(attr, True)


class TestDegreeReport:
    def test_long_tail_fixture(self):
        triples = [(f"i{n}", "cast member", f"actor{n}") for n in range(30)]
        triples += [("i0", "genre", "g1"), ("i1", "genre", "g2")]
        triples += [("i0", "award received", "a1")]
        g = graph_from(triples, items=[f"i{n}" for n in range(30)])
        report = degree_report(g)
        assert report.top_edge == "cast member"
        assert report.top_count == 30
        assert report.median_count == 2.0
        assert report.long_tailed

    def test_empty_graph_has_no_report(self):
        with pytest.raises(ValueError):
            degree_report(KnowledgeGraph([], items=[]))
