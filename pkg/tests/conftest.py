"""Shared fixtures: direct graph builders and a toy on-disk dataset."""

from __future__ import annotations

import csv
import json
import random

import pytest

from graphfeat.graph import HeteroGraph, VertexId

from oracles import adjacency


def V(entity_type: str, value) -> VertexId:
    return VertexId(entity_type, str(value))


def make_graph(
    edges_by_type: dict,
    predicted: str,
    type_endpoints: dict,
    extra_vertices=(),
) -> HeteroGraph:
    """Build a HeteroGraph straight from {edge_type: [(a, b, label?)]}."""
    vertices = set(extra_vertices)
    edges = {}
    for etype, pairs in edges_by_type.items():
        for item in pairs:
            if len(item) == 3:
                a, b, label = item
            else:
                a, b = item
                label = None
            vertices.update((a, b))
            key = (a, b, etype) if a <= b else (b, a, etype)
            edges[key] = label
    return HeteroGraph(
        vertices=vertices,
        edges=edges,
        predicted_edge_type=predicted,
        type_endpoints=type_endpoints,
    )


def random_hetero_graph(seed: int, nonbipartite: bool = False):
    """Random small graph (<= 12 vertices) plus an oracle adjacency map.

    Predicted edges run user-artist; the non-bipartite variant adds user-user
    friendships, which create odd cycles whenever a friendship closes a path.
    """
    rng = random.Random(seed)
    n_users = rng.randint(1, 6)
    n_artists = rng.randint(1, 6)
    users = [V("user", f"u{i}") for i in range(n_users)]
    artists = [V("artist", f"a{i}") for i in range(n_artists)]
    p = rng.uniform(0.2, 0.7)
    rates = [
        (u, a)
        for u in users
        for a in artists
        if rng.random() < p
    ]
    edges_by_type = {"rates": rates}
    type_endpoints = {"rates": ("user", "artist")}
    edge_list = list(rates)
    if nonbipartite and n_users >= 2:
        friends = set()
        for _ in range(rng.randint(1, 4)):
            a, b = rng.sample(users, 2)
            friends.add((a, b) if a <= b else (b, a))
        edges_by_type["friendship"] = sorted(friends)
        type_endpoints["friendship"] = ("user", "user")
        edge_list.extend(friends)
    graph = make_graph(
        edges_by_type, "rates", type_endpoints, extra_vertices=users + artists
    )
    adj = adjacency(users + artists, edge_list)
    return graph, adj


TOY_SCHEMA = {
    "tables": [
        {
            "name": "listens",
            "file": "listens.csv",
            "columns": [
                {"name": "user", "role": "source_id", "entity": "user"},
                {"name": "artist", "role": "target_id", "entity": "artist"},
                {"name": "weight", "role": "feedback", "value_kind": "numeric"},
            ],
        },
        {
            "name": "tags",
            "file": "tags.csv",
            "columns": [
                {"name": "user", "role": "source_id", "entity": "user"},
                {"name": "artist", "role": "target_id", "entity": "artist"},
                {"name": "tag", "role": "feature", "entity": "tag"},
            ],
        },
        {
            "name": "friends",
            "file": "friends.csv",
            "columns": [
                {"name": "user", "role": "source_id", "entity": "user"},
                {"name": "friend", "role": "target_id", "entity": "user"},
            ],
        },
    ],
    "relationships": [
        {
            "name": "listens",
            "table": "listens",
            "source_entity": "user",
            "target_entity": "artist",
        },
        {
            "name": "uses",
            "table": "tags",
            "source_entity": "user",
            "target_entity": "tag",
        },
        {
            "name": "used",
            "table": "tags",
            "source_entity": "tag",
            "target_entity": "artist",
        },
        {
            "name": "friendship",
            "table": "friends",
            "source_entity": "user",
            "target_entity": "user",
            "source_column": "user",
            "target_column": "friend",
        },
    ],
    "predicted": "listens",
}


def write_toy_dataset(
    directory,
    seed: int = 7,
    n_users: int = 12,
    n_artists: int = 15,
    n_tags: int = 6,
    min_listens: int = 6,
    max_listens: int = 9,
):
    """Write the Last.fm-shaped toy CSVs plus schema.json; returns the rows
    of the predicted table for test-side bookkeeping."""
    rng = random.Random(seed)
    users = [f"u{i}" for i in range(n_users)]
    artists = [f"a{i}" for i in range(n_artists)]
    tags = [f"t{i}" for i in range(n_tags)]

    listens = []
    for u in users:
        for a in rng.sample(artists, rng.randint(min_listens, max_listens)):
            listens.append((u, a, rng.randint(1, 400)))
    with open(directory / "listens.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "artist", "weight"])
        writer.writerows(listens)

    tag_rows = [
        (rng.choice(users), rng.choice(artists), rng.choice(tags))
        for _ in range(4 * n_users)
    ]
    with open(directory / "tags.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "artist", "tag"])
        writer.writerows(tag_rows)

    friends = set()
    while len(friends) < n_users - 2:
        a, b = rng.sample(users, 2)
        friends.add((a, b))
    with open(directory / "friends.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "friend"])
        writer.writerows(sorted(friends))

    with open(directory / "schema.json", "w") as fh:
        json.dump(TOY_SCHEMA, fh, indent=2)
    return listens


def write_toy_config(directory, **overrides):
    config = {
        "schema": "schema.json",
        "data_dir": ".",
        "out_dir": "out",
        "n_folds": 5,
        "seed": 42,
        "prune_threshold": 5,
        "task": "regression",
    }
    config.update(overrides)
    path = directory / "config.json"
    with open(path, "w") as fh:
        json.dump(config, fh, indent=2)
    return path


@pytest.fixture
def toy_dataset(tmp_path):
    listens = write_toy_dataset(tmp_path)
    config_path = write_toy_config(tmp_path)
    return tmp_path, config_path, listens
