"""Acceptance suite: one test per release criterion.

Run with `pytest tests/test_acceptance.py -v` to get one pass/fail line per
criterion.  Each test enforces both the correctness property and the stated
runtime budget.
"""

import csv
import itertools
import json
import os
import random
import time

import pytest

from graphfeat.extract import default_registry, extract_all_features
from graphfeat.graph import (
    HeteroGraph,
    VertexId,
    export_edge_list,
    mask_predicted_edges,
)
from graphfeat.metrics import (
    MISSING,
    avg_neighbor_degree,
    clustering_coefficient,
    degree_centrality,
    is_missing,
    node_redundancy,
    pagerank,
    shared_neighbors_of_type,
    shared_neighbors_ratio,
    shortest_path_excluding,
)
from graphfeat.pipeline import RunConfig, build_state, run_pipeline
from graphfeat.schemes import (
    expected_feature_count,
    expected_scheme_count,
    generate_edge_combinations,
    remove_edges,
)

import oracles as o
from conftest import V, make_graph, random_hetero_graph, write_toy_config, write_toy_dataset

TOL = 1e-9


def close(actual, expected, tol=TOL):
    if expected is None:
        return is_missing(actual)
    if is_missing(actual):
        return False
    return abs(actual - expected) <= tol


def test_metric_oracle_equivalence_200_graphs():
    started = time.monotonic()
    for seed in range(200):
        graph, adj = random_hetero_graph(seed, nonbipartite=seed % 2 == 1)
        bipartite = o.o_is_bipartite(adj)
        view = graph.view()
        assert view.is_bipartite == bipartite

        scores = pagerank(view).scores
        oracle_scores = o.o_pagerank_dense(adj)
        for v in adj:
            assert degree_centrality(view, v) == o.o_degree(adj, v)
            assert close(
                avg_neighbor_degree(view, v), o.o_avg_neighbor_degree(adj, v)
            )
            assert abs(scores[v] - oracle_scores[v]) < TOL
            if bipartite:
                assert close(
                    clustering_coefficient(view, v),
                    o.o_clustering_bipartite(adj, v),
                )
                assert close(node_redundancy(view, v), o.o_node_redundancy(adj, v))
            else:
                assert close(
                    clustering_coefficient(view, v),
                    o.o_clustering_triangles(adj, v),
                )

        users = sorted(v for v in adj if v.entity_type == "user")
        artists = sorted(v for v in adj if v.entity_type == "artist")
        for s in users:
            for t in artists:
                got = shortest_path_excluding(view, s, t)
                want = o.o_shortest_path_excluding(adj, s, t)
                if want is None:
                    assert is_missing(got)
                else:
                    assert got == want
                assert close(
                    shared_neighbors_ratio(view, s, t),
                    o.o_shared_neighbors_ratio(adj, s, t),
                )
                for etype in ("user", "artist"):
                    assert close(
                        shared_neighbors_of_type(view, s, t, etype),
                        o.o_shared_neighbors_of_type(adj, s, t, etype),
                    )
    assert time.monotonic() - started < 30


def test_scheme_enumeration_matches_powerset():
    started = time.monotonic()
    for m in range(7):
        extra = [f"e{i}" for i in range(m)]
        masks = generate_edge_combinations(set(extra) | {"pred"}, "pred")
        assert len(masks) == expected_scheme_count(m) == 2**m

        oracle = {
            frozenset(combo)
            for r in range(m + 1)
            for combo in itertools.combinations(extra, r)
        }
        assert {mask.removed_edge_types for mask in masks} == oracle
        assert len({mask.scheme_id for mask in masks}) == 2**m

        users = [V("user", f"u{i}") for i in range(4)]
        items = [V("item", f"i{i}") for i in range(4)]
        predicted = [(u, i) for u, i in zip(users, items)] + [
            (users[0], items[1])
        ]
        edges_by_type = {"pred": predicted}
        type_endpoints = {"pred": ("user", "item")}
        for k, etype in enumerate(extra):
            edges_by_type[etype] = [(users[k % 4], items[(k + 2) % 4])]
            type_endpoints[etype] = ("user", "item")
        graph = make_graph(edges_by_type, "pred", type_endpoints)
        for mask in masks:
            sub = remove_edges(graph.view(), mask)
            assert sub.predicted_edge_count() == len(predicted)
    assert time.monotonic() - started < 5


def test_feature_count_formula_and_column_counts():
    for f1 in range(7):
        for f2 in range(7):
            for m in range(7):
                assert expected_feature_count(m, f1, f2) == (
                    (2 * f1 + f2 + m) * 2**m
                )

    def column_count(graph, pairs):
        masks = generate_edge_combinations(
            set(graph.edge_types), graph.predicted_edge_type
        )
        table = extract_all_features(graph, masks, pairs, default_registry())
        expected = 0
        src_type = graph.type_endpoints[graph.predicted_edge_type][0]
        tgt_type = graph.type_endpoints[graph.predicted_edge_type][1]
        for mask in masks:
            sub = remove_edges(graph.view(), mask)
            extra_types = sub.entity_types_present() - {src_type, tgt_type}
            expected += 12 + len(extra_types)
        return len(table.columns), expected

    u = [V("user", f"u{i}") for i in range(3)]
    a = [V("artist", f"a{i}") for i in range(3)]
    t = [V("tag", f"t{i}") for i in range(2)]
    g = [V("genre", f"g{i}") for i in range(2)]

    plain = make_graph(
        {"rates": [(u[0], a[0]), (u[1], a[1]), (u[0], a[1])]},
        predicted="rates",
        type_endpoints={"rates": ("user", "artist")},
    )
    got, want = column_count(plain, [(u[0], a[0])])
    assert got == want == 12

    social = make_graph(
        {
            "rates": [(u[0], a[0]), (u[1], a[1])],
            "uses": [(u[0], t[0])],
            "used": [(t[0], a[1]), (t[1], a[0])],
            "friendship": [(u[0], u[1])],
        },
        predicted="rates",
        type_endpoints={
            "rates": ("user", "artist"),
            "uses": ("user", "tag"),
            "used": ("tag", "artist"),
            "friendship": ("user", "user"),
        },
    )
    got, want = column_count(social, [(u[0], a[0])])
    assert got == want == 8 * 12 + 6

    two_attrs = make_graph(
        {
            "rates": [(u[0], a[0]), (u[1], a[1])],
            "likes_genre": [(u[0], g[0]), (u[1], g[1])],
            "has_genre": [(a[0], g[1])],
        },
        predicted="rates",
        type_endpoints={
            "rates": ("user", "artist"),
            "likes_genre": ("user", "genre"),
            "has_genre": ("artist", "genre"),
        },
    )
    got, want = column_count(two_attrs, [(u[0], a[0])])
    assert got == want == 4 * 12 + 3


def test_leakage_suite(tmp_path):
    write_toy_dataset(tmp_path)
    config = RunConfig.from_json(str(write_toy_config(tmp_path)))
    state = build_state(config)
    run_pipeline(config)

    sp_value_columns = None
    for fold in range(config.n_folds):
        held_out = {
            (s, t) for s, t, _label in state.plan.test_instances(fold)
        }
        masked = mask_predicted_edges(state.graph, held_out)
        export = export_edge_list(masked)
        for s, t in held_out:
            a, b = (s, t) if s <= t else (t, s)
            assert f"{state.graph.predicted_edge_type}\t{a}\t{b}\t" not in export

        with open(os.path.join(config.out_dir, f"fold{fold}_test.csv")) as fh:
            rows = list(csv.reader(fh))
        header = rows[0]
        if sp_value_columns is None:
            sp_value_columns = [
                i
                for i, name in enumerate(header)
                if name.endswith("__pair__shortest_path_excluding")
            ]
            assert sp_value_columns
        for row in rows[1:]:
            for i in sp_value_columns:
                assert row[i] == "" or float(row[i]) >= 2

    for fold in range(config.n_folds):
        s, t, _label = state.plan.test_instances(fold)[0]
        listens = tmp_path / "listens.csv"
        with open(listens) as fh:
            raw = list(csv.reader(fh))
        changed = False
        for row in raw[1:]:
            if row[0] == s.value and row[1] == t.value:
                row[2] = str(int(row[2]) + 5000)
                changed = True
        assert changed
        with open(listens, "w", newline="") as fh:
            csv.writer(fh).writerows(raw)
        mutated = RunConfig(
            **{**config.__dict__, "out_dir": str(tmp_path / f"out_mut{fold}")}
        )
        run_pipeline(mutated)
        name = f"fold{fold}_train.csv"
        with open(os.path.join(config.out_dir, name), "rb") as fh:
            original = fh.read()
        with open(os.path.join(mutated.out_dir, name), "rb") as fh:
            rebuilt = fh.read()
        assert rebuilt == original
        write_toy_dataset(tmp_path)  # restore pristine data for the next fold


def test_determinism_across_parallelism(tmp_path):
    started = time.monotonic()
    write_toy_dataset(tmp_path)
    config = RunConfig.from_json(str(write_toy_config(tmp_path)))
    serial = RunConfig(**{**config.__dict__, "jobs": 1})
    parallel = RunConfig(
        **{
            **config.__dict__,
            "jobs": 8,
            "out_dir": str(tmp_path / "out_parallel"),
        }
    )
    manifest_serial = run_pipeline(serial)
    manifest_parallel = run_pipeline(parallel)
    assert manifest_serial == manifest_parallel
    for entry in manifest_serial["files"]:
        assert entry["sha256"]
    with open(os.path.join(serial.out_dir, "manifest.json")) as fh:
        a = json.load(fh)
    with open(os.path.join(parallel.out_dir, "manifest.json")) as fh:
        b = json.load(fh)
    assert a == b
    assert time.monotonic() - started < 120


def test_pagerank_scale_100k_edges():
    rng = random.Random(2024)
    n_users, n_items, n_edges = 2000, 1000, 100_000
    chosen = rng.sample(range(n_users * n_items), n_edges)
    users = [VertexId("user", f"u{i}") for i in range(n_users)]
    items = [VertexId("item", f"i{i}") for i in range(n_items)]
    edges = {}
    vertices = set(users) | set(items)
    for code in chosen:
        u = users[code // n_items]
        i = items[code % n_items]
        key = (u, i) if u <= i else (i, u)
        edges[(key[0], key[1], "rates")] = None
    graph = HeteroGraph(
        vertices=vertices,
        edges=edges,
        predicted_edge_type="rates",
        type_endpoints={"rates": ("user", "item")},
    )
    started = time.monotonic()
    result = pagerank(graph)
    elapsed = time.monotonic() - started
    assert result.converged
    assert result.iterations <= 200
    assert elapsed < 5
    assert abs(sum(result.scores.values()) - 1.0) < 1e-6
