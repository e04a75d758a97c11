"""Ensemble learners over selected feature columns with train-median
imputation."""

from __future__ import annotations

import numpy as np
import pandas as pd
from sklearn.ensemble import (
    GradientBoostingClassifier,
    GradientBoostingRegressor,
    RandomForestClassifier,
    RandomForestRegressor,
)
from sklearn.svm import SVC, SVR

from evalharness.combos import FeatureCombination
from evalharness.errors import EvalDataError, PlanError

TASKS = ("regression", "binary")
LEARNERS = ("random_forest", "gradient_boosting", "svm")

# Hyperparameters are deliberately plain library defaults (100 estimators for
# the ensembles); they are recorded into every report.
HYPERPARAMETERS = {
    "random_forest": {"n_estimators": 100},
    "gradient_boosting": {"n_estimators": 100},
    "svm": {},
}


def _make_model(learner: str, task: str, seed: int):
    if task not in TASKS:
        raise PlanError(f"unknown task {task!r}")
    if learner == "random_forest":
        cls = RandomForestRegressor if task == "regression" else RandomForestClassifier
        return cls(n_estimators=100, random_state=seed, n_jobs=-1)
    if learner == "gradient_boosting":
        cls = (
            GradientBoostingRegressor
            if task == "regression"
            else GradientBoostingClassifier
        )
        return cls(n_estimators=100, random_state=seed)
    if learner == "svm":
        return SVR() if task == "regression" else SVC(probability=True, random_state=seed)
    raise PlanError(f"unknown learner {learner!r}")


def impute_with_train_median(
    train: pd.DataFrame, test: pd.DataFrame, columns: list[str]
) -> tuple[np.ndarray, np.ndarray, dict[str, float]]:
    """Column medians from the train split fill missing cells in both splits;
    an all-missing train column falls back to 0.  Returns the fill values so
    the report can record them."""
    x_train = train[columns].to_numpy(dtype=float, copy=True)
    x_test = test[columns].to_numpy(dtype=float, copy=True)
    medians = {}
    for k, column in enumerate(columns):
        finite = x_train[:, k][np.isfinite(x_train[:, k])]
        fill = float(np.median(finite)) if finite.size else 0.0
        medians[column] = fill
        x_train[~np.isfinite(x_train[:, k]), k] = fill
        x_test[~np.isfinite(x_test[:, k]), k] = fill
    return x_train, x_test, medians


def train_predict(
    train: pd.DataFrame,
    test: pd.DataFrame,
    combination: FeatureCombination,
    task: str = "regression",
    learner: str = "random_forest",
    seed: int = 0,
) -> np.ndarray:
    """Fit one learner on the combination's columns and score the test rows.

    Regression returns predicted values; binary returns the positive-class
    probability (usable directly as a ranking score).
    """
    columns = combination.select(
        [c for c in train.columns if c not in ("source", "target", "label")]
    )
    missing = [c for c in columns if c not in test.columns]
    if missing:
        raise EvalDataError(f"test table lacks selected columns {missing}")
    if train["label"].isna().any():
        raise EvalDataError("train split has missing labels")
    if len(train) == 0 or len(test) == 0:
        raise EvalDataError("train and test splits must be non-empty")

    y = train["label"].to_numpy()
    if task == "binary" and len(np.unique(y)) < 2:
        raise EvalDataError("binary task needs both classes in the train split")

    x_train, x_test, _medians = impute_with_train_median(train, test, columns)
    model = _make_model(learner, task, seed)
    model.fit(x_train, y)
    if task == "binary":
        positive = list(model.classes_).index(max(model.classes_))
        return model.predict_proba(x_test)[:, positive]
    return model.predict(x_test)
