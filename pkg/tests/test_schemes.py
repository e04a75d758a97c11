"""Scheme enumeration, sub-graph views, and the closed-form counts."""

from itertools import chain, combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphfeat.errors import DataError, SchemaError
from graphfeat.schemes import (
    SchemeMask,
    expected_feature_count,
    expected_scheme_count,
    generate_edge_combinations,
    remove_edges,
    scheme_identifier,
)

from conftest import V, make_graph


def powerset(items):
    items = sorted(items)
    return [
        frozenset(c)
        for c in chain.from_iterable(
            combinations(items, r) for r in range(len(items) + 1)
        )
    ]


class TestGenerateEdgeCombinations:
    def test_three_types_four_masks(self):
        masks = generate_edge_combinations({"r1", "r2", "r3"}, "r1")
        removed = [m.removed_edge_types for m in masks]
        assert removed == [
            frozenset(),
            frozenset({"r2"}),
            frozenset({"r3"}),
            frozenset({"r2", "r3"}),
        ]

    def test_single_type_single_empty_mask(self):
        masks = generate_edge_combinations({"pred"}, "pred")
        assert len(masks) == 1
        assert masks[0].removed_edge_types == frozenset()
        assert masks[0].scheme_id == "BL"

    def test_four_types_eight_masks(self):
        masks = generate_edge_combinations(
            {"listens", "uses", "used", "friendship"}, "listens"
        )
        assert len(masks) == 8

    def test_pred_missing_rejected(self):
        with pytest.raises(SchemaError):
            generate_edge_combinations({"r2", "r3"}, "r1")

    def test_pred_never_removed(self):
        for m_count in range(7):
            types = {f"r{i}" for i in range(m_count)} | {"pred"}
            for mask in generate_edge_combinations(types, "pred"):
                assert "pred" not in mask.removed_edge_types

    @given(m=st.integers(min_value=0, max_value=7))
    @settings(deadline=None)
    def test_bijection_onto_powerset(self, m):
        types = {f"r{i}" for i in range(m)} | {"pred"}
        masks = generate_edge_combinations(types, "pred")
        assert len(masks) == expected_scheme_count(m)
        assert set(m.removed_edge_types for m in masks) == set(
            powerset(types - {"pred"})
        )

    def test_order_is_deterministic(self):
        types = {"listens", "uses", "used", "friendship"}
        first = generate_edge_combinations(types, "listens")
        second = generate_edge_combinations(set(sorted(types)), "listens")
        assert first == second
        ids = [m.scheme_id for m in first]
        assert ids[0] == "BL+friendship+used+uses"
        assert ids[-1] == "BL"

    def test_scheme_id_names_kept_types(self):
        assert scheme_identifier(frozenset()) == "BL"
        assert scheme_identifier(frozenset({"uses", "friendship"})) == (
            "BL+friendship+uses"
        )


class TestRemoveEdges:
    def graph(self):
        u1, u2 = V("user", "u1"), V("user", "u2")
        i1 = V("item", "i1")
        t1 = V("tag", "t1")
        return make_graph(
            {
                "ratings": [(u1, i1), (u2, i1)],
                "uses": [(u1, t1)],
                "friendship": [(u1, u2)],
            },
            predicted="ratings",
            type_endpoints={
                "ratings": ("user", "item"),
                "uses": ("user", "tag"),
                "friendship": ("user", "user"),
            },
        ), (u1, u2, i1, t1)

    def test_removing_friendship_restores_bipartite(self):
        graph, _ = self.graph()
        assert not graph.view().is_bipartite
        view = remove_edges(
            graph,
            SchemeMask(frozenset({"friendship"}), "BL+uses"),
        )
        assert view.is_bipartite

    def test_empty_mask_unchanged(self):
        graph, (u1, _, _, _) = self.graph()
        view = remove_edges(graph, SchemeMask(frozenset(), "BL+friendship+uses"))
        assert view.neighbors(u1) == graph.view().neighbors(u1)

    def test_full_mask_is_pure_baseline(self):
        graph, (u1, u2, i1, t1) = self.graph()
        view = remove_edges(
            graph, SchemeMask(frozenset({"uses", "friendship"}), "BL")
        )
        assert view.neighbors(u1) == frozenset({i1})
        assert view.neighbors(t1) == frozenset()
        assert view.is_bipartite

    def test_predicted_edges_always_preserved(self):
        graph, _ = self.graph()
        for mask in generate_edge_combinations(set(graph.edge_types), "ratings"):
            view = remove_edges(graph, mask)
            assert view.predicted_edge_count() == len(graph.predicted_edges())

    def test_unknown_type_rejected(self):
        graph, _ = self.graph()
        with pytest.raises(DataError, match="unknown"):
            remove_edges(graph, SchemeMask(frozenset({"follows"}), "BL"))

    def test_removing_predicted_rejected(self):
        graph, _ = self.graph()
        with pytest.raises(DataError, match="predicted"):
            remove_edges(graph, SchemeMask(frozenset({"ratings"}), "BL"))


class TestCounts:
    @pytest.mark.parametrize("m,expected", [(0, 1), (3, 8), (10, 1024)])
    def test_scheme_count(self, m, expected):
        assert expected_scheme_count(m) == expected

    @pytest.mark.parametrize(
        "m,f1,f2,expected", [(0, 5, 1, 11), (2, 5, 1, 52), (3, 5, 2, 120)]
    )
    def test_feature_count_closed_form(self, m, f1, f2, expected):
        assert expected_feature_count(m, f1, f2) == expected

    def test_feature_count_monotone(self):
        for m in range(5):
            for f1 in range(5):
                for f2 in range(5):
                    base = expected_feature_count(m, f1, f2)
                    assert expected_feature_count(m + 1, f1, f2) >= base
                    assert expected_feature_count(m, f1 + 1, f2) >= base
                    assert expected_feature_count(m, f1, f2 + 1) >= base

    def test_negative_arguments_rejected(self):
        with pytest.raises(SchemaError):
            expected_scheme_count(-1)
        with pytest.raises(SchemaError):
            expected_feature_count(-1, 5, 1)
