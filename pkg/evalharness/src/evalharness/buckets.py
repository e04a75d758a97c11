"""Per-entity bucket analysis: equal-sized buckets over a grouping statistic,
RMSE per bucket per prediction column."""

from __future__ import annotations

import numpy as np
import pandas as pd

from evalharness.errors import EvalDataError

STATISTICS = ("rating_std", "rating_count")


def entity_statistic(frame: pd.DataFrame, entity: str, statistic: str) -> pd.Series:
    grouped = frame.groupby(entity)["truth"]
    if statistic == "rating_std":
        return grouped.std(ddof=0)
    if statistic == "rating_count":
        return grouped.size().astype(float)
    raise EvalDataError(f"unknown grouping statistic {statistic!r}")


def bucket_analysis(
    frame: pd.DataFrame,
    statistic: str = "rating_std",
    n_buckets: int = 5,
    entity: str = "target",
) -> pd.DataFrame:
    """Bucket RMSE table.

    `frame` needs an entity key column, a `truth` column, and one prediction
    column per combination (every other column is treated as predictions).
    Entities are sorted by the statistic and split into n_buckets buckets
    whose sizes differ by at most 1; each bucket row reports its entity
    count, statistic range, and per-combination RMSE over the member rows.
    """
    if entity not in frame.columns or "truth" not in frame.columns:
        raise EvalDataError(f"frame needs {entity!r} and 'truth' columns")
    prediction_columns = [
        c for c in frame.columns if c not in (entity, "truth", "source", "target")
    ]
    if not prediction_columns:
        raise EvalDataError("frame has no prediction columns")

    stat = entity_statistic(frame, entity, statistic).dropna()
    entities = sorted(stat.index, key=lambda e: (stat[e], e))
    if n_buckets < 1:
        raise EvalDataError("n_buckets must be positive")
    if n_buckets > len(entities):
        raise EvalDataError(
            f"n_buckets={n_buckets} exceeds the {len(entities)} entities "
            "with a defined statistic"
        )

    base, remainder = divmod(len(entities), n_buckets)
    rows = []
    start = 0
    for b in range(n_buckets):
        size = base + (1 if b < remainder else 0)
        members = entities[start : start + size]
        start += size
        member_rows = frame[frame[entity].isin(members)]
        row = {
            "bucket": b,
            "entities": size,
            "stat_min": float(stat[members[0]]),
            "stat_max": float(stat[members[-1]]),
        }
        for column in prediction_columns:
            diff = member_rows[column].to_numpy(dtype=float) - member_rows[
                "truth"
            ].to_numpy(dtype=float)
            row[f"rmse_{column}"] = float(np.sqrt(np.mean(diff**2)))
        rows.append(row)
    return pd.DataFrame(rows)
