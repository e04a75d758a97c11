"""Reading the feature-pipeline outputs: manifest plus per-fold CSVs.

The harness touches the pipeline only through these two file formats; it
never imports the pipeline package.
"""

from __future__ import annotations

import json
import os
import re

import pandas as pd

from evalharness.errors import EvalDataError

_FOLD_FILE = re.compile(
    r"fold(?P<fold>\d+)_(?:(?P<part>train|test)|candidates_(?P<size>\d+))\.csv$"
)


def load_manifest(path: str) -> dict:
    """Parse and validate a pipeline manifest; entries must exist on disk."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise EvalDataError(f"manifest not found: {path}")
    except json.JSONDecodeError as exc:
        raise EvalDataError(f"manifest {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict) or not isinstance(doc.get("files"), list):
        raise EvalDataError(f"manifest {path} lacks a 'files' list")
    base = os.path.dirname(os.path.abspath(path))
    for entry in doc["files"]:
        for key in ("path", "rows", "columns", "sha256"):
            if key not in entry:
                raise EvalDataError(f"manifest entry missing {key!r}: {entry}")
        if not os.path.exists(os.path.join(base, entry["path"])):
            raise EvalDataError(f"manifest references missing file {entry['path']}")
    doc["_base"] = base
    return doc


def fold_files(manifest: dict) -> dict[int, dict]:
    """Group manifest entries by fold: train/test paths plus candidate files
    keyed by candidate-set size."""
    folds: dict[int, dict] = {}
    for entry in manifest["files"]:
        match = _FOLD_FILE.match(entry["path"])
        if not match:
            continue
        fold = int(match.group("fold"))
        slot = folds.setdefault(fold, {"candidates": {}})
        full = os.path.join(manifest["_base"], entry["path"])
        if match.group("part"):
            slot[match.group("part")] = full
        else:
            slot["candidates"][int(match.group("size"))] = full
    for fold, slot in folds.items():
        for part in ("train", "test"):
            if part not in slot:
                raise EvalDataError(f"fold {fold} is missing its {part} file")
    if not folds:
        raise EvalDataError("manifest lists no fold files")
    return folds


def read_feature_table(path: str) -> pd.DataFrame:
    """Load one feature CSV; identifiers stay strings, empty feature cells
    become NaN."""
    try:
        frame = pd.read_csv(path, dtype={"source": str, "target": str})
    except FileNotFoundError:
        raise EvalDataError(f"feature file not found: {path}")
    for column in ("source", "target", "label"):
        if column not in frame.columns:
            raise EvalDataError(f"{path} lacks required column {column!r}")
    return frame


def feature_columns(frame: pd.DataFrame) -> list[str]:
    return [c for c in frame.columns if c not in ("source", "target", "label")]
