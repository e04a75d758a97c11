"""Desk-scale Last.fm experiment preparation.

Turns the raw hetrec2011-lastfm-2k dump (fetched separately by
scripts/fetch_hetrec_lastfm.py) into a small dataset directory the feature
pipeline can consume: a user subsample capped at 50 artists each, the tag
assignments and friendships induced by that subsample, a schema with the four
relationship types, and a ranking run config (candidate size 100, 10 held-out
positives per set).
"""

from __future__ import annotations

import csv
import json
import os
import random
from collections import Counter

from evalharness.errors import EvalDataError

RAW_FILES = ("user_artists.dat", "user_taggedartists.dat", "user_friends.dat")


def _read_dat(path: str) -> list[list[str]]:
    with open(path, encoding="utf-8", errors="replace") as fh:
        reader = csv.reader(fh, delimiter="\t")
        next(reader)  # header
        return [row for row in reader if row]


def prepare_lastfm_subset(
    raw_dir: str,
    out_dir: str,
    n_users: int = 300,
    artists_per_user: int = 50,
    max_tags: int = 200,
    seed: int = 0,
) -> dict:
    """Write the subsampled dataset; returns a summary with the config path."""
    for name in RAW_FILES:
        if not os.path.exists(os.path.join(raw_dir, name)):
            raise EvalDataError(f"raw Last.fm file missing: {name} in {raw_dir}")
    rng = random.Random(seed)
    os.makedirs(out_dir, exist_ok=True)

    listens_raw = _read_dat(os.path.join(raw_dir, "user_artists.dat"))
    by_user: dict[str, list[tuple[str, int]]] = {}
    for user, artist, weight in listens_raw:
        by_user.setdefault(user, []).append((artist, int(weight)))

    eligible = sorted(u for u, rows in by_user.items() if len(rows) >= artists_per_user)
    if len(eligible) < n_users:
        raise EvalDataError(
            f"only {len(eligible)} users have >= {artists_per_user} artists"
        )
    users = set(rng.sample(eligible, n_users))

    listens = []
    artists: set[str] = set()
    for user in sorted(users):
        top = sorted(by_user[user], key=lambda r: (-r[1], r[0]))[:artists_per_user]
        for artist, weight in top:
            listens.append((user, artist, weight))
            artists.add(artist)

    tag_rows = []
    tag_counts: Counter = Counter()
    for row in _read_dat(os.path.join(raw_dir, "user_taggedartists.dat")):
        user, artist, tag = row[0], row[1], row[2]
        if user in users and artist in artists:
            tag_rows.append((user, artist, tag))
            tag_counts[tag] += 1
    kept_tags = {tag for tag, _count in tag_counts.most_common(max_tags)}
    tag_rows = [r for r in tag_rows if r[2] in kept_tags]

    friend_rows = []
    for user, friend in _read_dat(os.path.join(raw_dir, "user_friends.dat")):
        if user in users and friend in users and user < friend:
            friend_rows.append((user, friend))

    def write(name: str, header: list[str], rows) -> None:
        with open(os.path.join(out_dir, name), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(sorted(rows))

    write("listens.csv", ["user", "artist", "weight"], listens)
    write("tags.csv", ["user", "artist", "tag"], tag_rows)
    write("friends.csv", ["user", "friend"], friend_rows)

    schema = {
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
    with open(os.path.join(out_dir, "schema.json"), "w") as fh:
        json.dump(schema, fh, indent=2)

    config = {
        "schema": "schema.json",
        "data_dir": ".",
        "out_dir": "features",
        "n_folds": 5,
        "seed": seed,
        "prune_threshold": artists_per_user,
        "task": "ranking",
        "candidate_sizes": [100],
        "positives_per_set": 10,
    }
    config_path = os.path.join(out_dir, "config.json")
    with open(config_path, "w") as fh:
        json.dump(config, fh, indent=2)
    return {
        "config": config_path,
        "users": len(users),
        "artists": len(artists),
        "listens": len(listens),
        "tag_rows": len(tag_rows),
        "friendships": len(friend_rows),
    }


RANKING_PLAN = {
    "task": "ranking",
    "k": 10,
    "candidate_size": 100,
    "baseline": "BL",
    "learners": ["random_forest"],
    "combinations": [
        {"name": "BL", "columns": ["BL__*"]},
        {"name": "All_Graph", "columns": ["BL*"]},
    ],
}
