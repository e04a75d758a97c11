"""Evaluation harness over feature-pipeline CSV outputs."""

from evalharness.buckets import bucket_analysis, entity_statistic
from evalharness.combos import FeatureCombination, parse_combinations
from evalharness.errors import EvalDataError, EvalError, PlanError
from evalharness.external import join_external_features
from evalharness.io import (
    feature_columns,
    fold_files,
    load_manifest,
    read_feature_table,
)
from evalharness.learners import (
    HYPERPARAMETERS,
    LEARNERS,
    TASKS,
    impute_with_train_median,
    train_predict,
)
from evalharness.metrics import (
    SignificanceResult,
    compute_rmse_mae,
    precision_at_k,
    significance_test,
)
from evalharness.synth import generate_synthetic_ratings, write_manual_features
from evalharness.report import (
    EvalReport,
    ReportRow,
    ablation_run,
    load_plan,
    write_report,
)

__all__ = [
    "EvalDataError",
    "EvalError",
    "EvalReport",
    "FeatureCombination",
    "HYPERPARAMETERS",
    "LEARNERS",
    "PlanError",
    "ReportRow",
    "SignificanceResult",
    "TASKS",
    "ablation_run",
    "bucket_analysis",
    "compute_rmse_mae",
    "entity_statistic",
    "feature_columns",
    "fold_files",
    "generate_synthetic_ratings",
    "write_manual_features",
    "impute_with_train_median",
    "join_external_features",
    "load_manifest",
    "load_plan",
    "parse_combinations",
    "precision_at_k",
    "read_feature_table",
    "significance_test",
    "train_predict",
    "write_report",
]
