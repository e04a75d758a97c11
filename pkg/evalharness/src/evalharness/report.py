"""Ablation runner: combinations x learners over all folds, serialized as
report.csv plus a human-readable report.md."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import pandas as pd

from evalharness.combos import FeatureCombination, parse_combinations
from evalharness.errors import EvalDataError, PlanError
from evalharness.external import join_external_features
from evalharness.io import fold_files, load_manifest, read_feature_table
from evalharness.learners import HYPERPARAMETERS, LEARNERS, train_predict
from evalharness.metrics import compute_rmse_mae, precision_at_k, significance_test

ERROR_METRICS = ("rmse", "mae")


@dataclass(frozen=True)
class ReportRow:
    combination: str
    learner: str
    metric: str
    value: float
    per_fold: tuple[float, ...]
    p_vs_baseline: float | None = None
    improvement_pct: float | None = None


@dataclass
class EvalReport:
    rows: list[ReportRow]
    metadata: dict
    predictions: dict = field(default_factory=dict)

    def value(self, combination: str, learner: str, metric: str) -> float:
        for row in self.rows:
            if (row.combination, row.learner, row.metric) == (
                combination,
                learner,
                metric,
            ):
                return row.value
        raise KeyError((combination, learner, metric))


def load_plan(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            plan = json.load(fh)
    except FileNotFoundError:
        raise PlanError(f"plan file not found: {path}")
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan file {path} is not valid JSON: {exc}")
    if not isinstance(plan, dict):
        raise PlanError("plan document must be a JSON object")
    base = os.path.dirname(os.path.abspath(path))
    for entry in plan.get("external", []):
        if "file" in entry and not os.path.isabs(entry["file"]):
            entry["file"] = os.path.join(base, entry["file"])
    return plan


def _apply_externals(frame: pd.DataFrame, externals: list[dict]) -> pd.DataFrame:
    for entry in externals:
        if "file" not in entry or "key" not in entry:
            raise PlanError(f"external entries need 'file' and 'key': {entry}")
        frame = join_external_features(frame, entry["file"], key=entry["key"])
    return frame


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def ablation_run(manifest_path: str, plan: dict | str, seed: int = 0) -> EvalReport:
    """Evaluate every combination x learner over all folds.

    Plan keys: task ("regression" | "binary" | "ranking"), combinations,
    learners (default random_forest), baseline (optional combination name),
    external (optional joined CSVs), k and candidate_size for ranking.
    """
    if isinstance(plan, str):
        plan = load_plan(plan)
    manifest = load_manifest(manifest_path)
    folds = fold_files(manifest)
    combos = parse_combinations(plan.get("combinations"))
    learners = tuple(plan.get("learners", ["random_forest"]))
    for learner in learners:
        if learner not in LEARNERS:
            raise PlanError(f"unknown learner {learner!r}")
    task = plan.get("task", "regression")
    externals = plan.get("external", [])
    baseline = plan.get("baseline")
    if baseline is not None and baseline not in {c.name for c in combos}:
        raise PlanError(f"baseline {baseline!r} is not a listed combination")

    if task == "ranking":
        per_fold_metrics, predictions = _run_ranking(
            folds, combos, learners, externals, plan, seed
        )
        primary_metric = f"p_at_{plan.get('k', 10)}"
    else:
        per_fold_metrics, predictions = _run_pointwise(
            folds, combos, learners, externals, task, seed
        )
        primary_metric = "rmse"

    rows = []
    for combo in combos:
        for learner in learners:
            for metric, values in per_fold_metrics[(combo.name, learner)].items():
                p_value = None
                improvement = None
                if baseline is not None and combo.name != baseline:
                    base_values = per_fold_metrics[(baseline, learner)][metric]
                    if metric == primary_metric:
                        p_value = significance_test(values, base_values).p_value
                    base_mean = _mean(base_values)
                    if base_mean != 0:
                        if metric in ERROR_METRICS:
                            improvement = 100 * (base_mean - _mean(values)) / base_mean
                        else:
                            improvement = 100 * (_mean(values) - base_mean) / base_mean
                rows.append(
                    ReportRow(
                        combination=combo.name,
                        learner=learner,
                        metric=metric,
                        value=_mean(values),
                        per_fold=tuple(values),
                        p_vs_baseline=p_value,
                        improvement_pct=improvement,
                    )
                )
    metadata = {
        "seed": seed,
        "task": task,
        "n_folds": len(folds),
        "baseline": baseline,
        "primary_metric": primary_metric,
        "imputation": "train-split column median (all-missing columns -> 0)",
        "hyperparameters": {l: HYPERPARAMETERS[l] for l in learners},
        "aggregation": "unweighted mean over folds",
    }
    return EvalReport(rows=rows, metadata=metadata, predictions=predictions)


def _run_pointwise(folds, combos, learners, externals, task, seed):
    per_fold: dict[tuple[str, str], dict[str, list[float]]] = {
        (c.name, l): {"rmse": [], "mae": []} for c in combos for l in learners
    }
    predictions: dict[tuple[str, str], list[pd.DataFrame]] = {
        (c.name, l): [] for c in combos for l in learners
    }
    for fold in sorted(folds):
        train = _apply_externals(read_feature_table(folds[fold]["train"]), externals)
        test = _apply_externals(read_feature_table(folds[fold]["test"]), externals)
        for combo in combos:
            for learner in learners:
                preds = train_predict(train, test, combo, task, learner, seed)
                truth = test["label"].to_numpy(dtype=float)
                rmse, mae = compute_rmse_mae(preds, truth)
                per_fold[(combo.name, learner)]["rmse"].append(rmse)
                per_fold[(combo.name, learner)]["mae"].append(mae)
                predictions[(combo.name, learner)].append(
                    pd.DataFrame(
                        {
                            "fold": fold,
                            "source": test["source"],
                            "target": test["target"],
                            "truth": truth,
                            "prediction": preds,
                        }
                    )
                )
    merged = {
        key: pd.concat(frames, ignore_index=True)
        for key, frames in predictions.items()
    }
    return per_fold, merged


def _run_ranking(folds, combos, learners, externals, plan, seed):
    k = int(plan.get("k", 10))
    per_fold: dict[tuple[str, str], dict[str, list[float]]] = {
        (c.name, l): {f"p_at_{k}": []} for c in combos for l in learners
    }
    skipped_total = 0
    for fold in sorted(folds):
        candidates_by_size = folds[fold]["candidates"]
        if not candidates_by_size:
            raise EvalDataError(f"fold {fold} has no candidate files")
        size = int(plan.get("candidate_size", sorted(candidates_by_size)[-1]))
        if size not in candidates_by_size:
            raise PlanError(
                f"candidate size {size} not in manifest "
                f"(available: {sorted(candidates_by_size)})"
            )
        train = _apply_externals(read_feature_table(folds[fold]["train"]), externals)
        cand = _apply_externals(
            read_feature_table(candidates_by_size[size]), externals
        )
        for combo in combos:
            for learner in learners:
                scores = train_predict(
                    train, cand, combo, "regression", learner, seed
                )
                frame = cand.assign(score=scores)
                user_precisions = []
                for _source, group in frame.groupby("source", sort=True):
                    positives = set(
                        group.loc[group["label"] == 1, "target"]
                    )
                    if not positives:
                        skipped_total += 1
                        continue
                    user_precisions.append(
                        precision_at_k(
                            list(group["target"]),
                            list(group["score"]),
                            positives,
                            k,
                        )
                    )
                if not user_precisions:
                    raise EvalDataError(
                        f"fold {fold}: no rankable users in candidate file"
                    )
                per_fold[(combo.name, learner)][f"p_at_{k}"].append(
                    _mean(user_precisions)
                )
    return per_fold, {"skipped_users": skipped_total}


def write_report(report: EvalReport, out_dir: str) -> tuple[str, str]:
    """Serialize report.csv and report.md; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    frame = pd.DataFrame(
        {
            "combination": [r.combination for r in report.rows],
            "learner": [r.learner for r in report.rows],
            "metric": [r.metric for r in report.rows],
            "value": [r.value for r in report.rows],
            "p_vs_baseline": [r.p_vs_baseline for r in report.rows],
        }
    )
    frame.to_csv(csv_path, index=False)

    md_path = os.path.join(out_dir, "report.md")
    lines = ["# Evaluation report", ""]
    meta = report.metadata
    for key in sorted(meta):
        lines.append(f"- **{key}**: {meta[key]}")
    lines += [
        "",
        "| combination | learner | metric | value | per fold | improvement vs "
        f"{meta.get('baseline')} | p |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in report.rows:
        folds = ", ".join(f"{v:.4f}" for v in r.per_fold)
        improvement = (
            f"{r.improvement_pct:+.2f}%" if r.improvement_pct is not None else ""
        )
        p_text = f"{r.p_vs_baseline:.4g}" if r.p_vs_baseline is not None else ""
        lines.append(
            f"| {r.combination} | {r.learner} | {r.metric} | {r.value:.4f} "
            f"| {folds} | {improvement} | {p_text} |"
        )
    with open(md_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return csv_path, md_path
