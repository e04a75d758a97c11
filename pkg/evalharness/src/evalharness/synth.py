"""Synthetic rating data with planted community structure.

Users and items each belong to one of a few communities; same-community
ratings are high, cross-community ratings low, plus Gaussian noise.  Users
mostly rate items from their own community, so the bipartite rating graph
carries the community signal, and explicit user->genre / item->genre
relationships expose it to type-filtered graph features.

The generator writes a dataset directory ready for the feature pipeline
(tables + schema + run config) plus externally computed "manual" feature
CSVs (per-user / per-item means and counts) for baseline combinations.
"""

from __future__ import annotations

import csv
import json
import os
import random
import statistics


def generate_synthetic_ratings(
    out_dir: str,
    n_users: int = 2000,
    n_items: int = 1000,
    n_communities: int = 8,
    ratings_per_user: int = 9,
    same_community_share: float = 0.8,
    mean_same: float = 4.2,
    mean_cross: float = 2.4,
    noise_std: float = 0.45,
    seed: int = 0,
) -> dict:
    """Write the dataset; returns a summary with file paths and parameters."""
    rng = random.Random(seed)
    os.makedirs(out_dir, exist_ok=True)
    user_community = {f"u{i}": i % n_communities for i in range(n_users)}
    item_community = {f"i{j}": j % n_communities for j in range(n_items)}
    items_by_community: dict[int, list[str]] = {}
    for item, community in item_community.items():
        items_by_community.setdefault(community, []).append(item)
    all_items = sorted(item_community)

    ratings = []
    for user in sorted(user_community):
        community = user_community[user]
        own = items_by_community[community]
        n_same = round(ratings_per_user * same_community_share)
        chosen = set(rng.sample(own, min(n_same, len(own))))
        while len(chosen) < ratings_per_user:
            chosen.add(rng.choice(all_items))
        for item in sorted(chosen):
            base = (
                mean_same
                if item_community[item] == community
                else mean_cross
            )
            value = min(5.0, max(1.0, rng.gauss(base, noise_std)))
            ratings.append((user, item, round(value, 3)))

    def write_csv(name: str, header: list[str], rows) -> str:
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        return path

    write_csv("ratings.csv", ["user", "item", "rating"], ratings)
    write_csv(
        "user_genres.csv",
        ["user", "genre"],
        [(u, f"g{c}") for u, c in sorted(user_community.items())],
    )
    write_csv(
        "item_genres.csv",
        ["item", "genre"],
        [(i, f"g{c}") for i, c in sorted(item_community.items())],
    )

    schema = {
        "tables": [
            {
                "name": "ratings",
                "file": "ratings.csv",
                "columns": [
                    {"name": "user", "role": "source_id", "entity": "user"},
                    {"name": "item", "role": "target_id", "entity": "item"},
                    {"name": "rating", "role": "feedback", "value_kind": "numeric"},
                ],
            },
            {
                "name": "user_genres",
                "file": "user_genres.csv",
                "columns": [
                    {"name": "user", "role": "source_id", "entity": "user"},
                    {"name": "genre", "role": "target_id", "entity": "genre"},
                ],
            },
            {
                "name": "item_genres",
                "file": "item_genres.csv",
                "columns": [
                    {"name": "item", "role": "source_id", "entity": "item"},
                    {"name": "genre", "role": "target_id", "entity": "genre"},
                ],
            },
        ],
        "relationships": [
            {
                "name": "rates",
                "table": "ratings",
                "source_entity": "user",
                "target_entity": "item",
            },
            {
                "name": "likes_genre",
                "table": "user_genres",
                "source_entity": "user",
                "target_entity": "genre",
            },
            {
                "name": "has_genre",
                "table": "item_genres",
                "source_entity": "item",
                "target_entity": "genre",
            },
        ],
        "predicted": "rates",
    }
    with open(os.path.join(out_dir, "schema.json"), "w") as fh:
        json.dump(schema, fh, indent=2)

    config = {
        "schema": "schema.json",
        "data_dir": ".",
        "out_dir": "features",
        "n_folds": 5,
        "seed": seed,
        "prune_threshold": 5,
        "task": "regression",
    }
    config_path = os.path.join(out_dir, "config.json")
    with open(config_path, "w") as fh:
        json.dump(config, fh, indent=2)

    write_manual_features(out_dir, ratings)
    return {
        "config": config_path,
        "ratings": len(ratings),
        "n_users": n_users,
        "n_items": n_items,
        "n_communities": n_communities,
    }


def write_manual_features(out_dir: str, ratings) -> tuple[str, str]:
    """Per-user and per-item mean/count columns, the baseline ("manual")
    feature set for ablations."""
    by_user: dict[str, list[float]] = {}
    by_item: dict[str, list[float]] = {}
    for user, item, value in ratings:
        by_user.setdefault(user, []).append(float(value))
        by_item.setdefault(item, []).append(float(value))

    user_path = os.path.join(out_dir, "manual_user.csv")
    with open(user_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "Manual__user_mean", "Manual__user_count"])
        for user in sorted(by_user):
            values = by_user[user]
            writer.writerow([user, round(statistics.fmean(values), 6), len(values)])

    item_path = os.path.join(out_dir, "manual_item.csv")
    with open(item_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target", "Manual__item_mean", "Manual__item_count"])
        for item in sorted(by_item):
            values = by_item[item]
            writer.writerow([item, round(statistics.fmean(values), 6), len(values)])
    return user_path, item_path
