"""Joining externally computed (\"manual\") feature columns onto a feature
table by source or target identifier."""

from __future__ import annotations

import pandas as pd

from evalharness.errors import EvalDataError


def join_external_features(
    table: pd.DataFrame, external, key: str = "source"
) -> pd.DataFrame:
    """Left-join extra feature columns keyed by the source or target id.

    Unmatched rows get missing values; duplicate keys in the external file
    and column-name collisions are errors.
    """
    if key not in ("source", "target"):
        raise EvalDataError(f"join key must be 'source' or 'target', got {key!r}")
    if isinstance(external, str):
        external = pd.read_csv(external, dtype={key: str})
    if key not in external.columns:
        raise EvalDataError(f"external table lacks the join key column {key!r}")
    if external[key].duplicated().any():
        dupes = sorted(external[key][external[key].duplicated()].unique())
        raise EvalDataError(f"duplicate keys in external table: {dupes[:5]}")
    clash = (set(external.columns) - {key}) & set(table.columns)
    if clash:
        raise EvalDataError(f"external columns already present: {sorted(clash)}")
    joined = table.merge(external, on=key, how="left")
    joined.index = table.index
    return joined
