"""Evaluation metrics: RMSE/MAE, precision@K, and paired significance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from evalharness.errors import EvalDataError


def compute_rmse_mae(predictions, truths) -> tuple[float, float]:
    preds = np.asarray(predictions, dtype=float)
    truth = np.asarray(truths, dtype=float)
    if preds.shape != truth.shape:
        raise EvalDataError(
            f"length mismatch: {preds.shape} predictions vs {truth.shape} truths"
        )
    if preds.size == 0:
        raise EvalDataError("cannot score an empty prediction set")
    diff = preds - truth
    rmse = float(np.sqrt(np.mean(diff**2)))
    mae = float(np.mean(np.abs(diff)))
    return rmse, mae


def precision_at_k(candidates, scores, positives, k: int) -> float:
    """Fraction of the top-k scored candidates that are positives.

    Ties are broken by the stable input order of the candidates, so the
    result is invariant under any strictly monotone transform of the scores.
    """
    if k <= 0:
        raise EvalDataError("K must be positive")
    if len(candidates) != len(scores):
        raise EvalDataError("candidates and scores must align")
    if k > len(candidates):
        raise EvalDataError(
            f"K={k} exceeds the candidate-set size {len(candidates)}"
        )
    order = np.argsort(-np.asarray(scores, dtype=float), kind="stable")
    top = [candidates[i] for i in order[:k]]
    positive_set = set(positives)
    return sum(1 for c in top if c in positive_set) / k


@dataclass(frozen=True)
class SignificanceResult:
    p_value: float
    zero_variance: bool


def significance_test(errors_a, errors_b) -> SignificanceResult:
    """Two-sided paired t-test over per-instance (or per-fold) errors.

    Zero variance of the differences makes the t statistic undefined; the
    result is flagged, with p = 1 for identical inputs and p = 0 for a
    constant non-zero shift.
    """
    a = np.asarray(errors_a, dtype=float)
    b = np.asarray(errors_b, dtype=float)
    if a.shape != b.shape:
        raise EvalDataError("paired samples must have equal lengths")
    if a.size < 2:
        raise EvalDataError("need at least two pairs for a paired t-test")
    diff = a - b
    if np.allclose(diff, diff[0]):
        return SignificanceResult(
            p_value=1.0 if np.allclose(diff, 0.0) else 0.0,
            zero_variance=True,
        )
    result = stats.ttest_rel(a, b)
    return SignificanceResult(p_value=float(result.pvalue), zero_variance=False)
