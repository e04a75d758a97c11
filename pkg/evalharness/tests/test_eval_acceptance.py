"""Acceptance suite for the evaluation harness.

Run with `pytest evalharness/tests/test_eval_acceptance.py -v` for one
pass/fail line per criterion.  The synthetic criteria generate their data,
run the feature pipeline through its command-line interface (the harness
never imports the pipeline package), and evaluate the resulting CSVs.  The
Last.fm criterion needs the public hetrec2011-lastfm-2k dump; fetch it with
`python3 scripts/fetch_hetrec_lastfm.py`, otherwise the test is skipped.
"""

import os
import subprocess
import time

import pytest

from evalharness.buckets import bucket_analysis
from evalharness.report import ablation_run
from evalharness.synth import generate_synthetic_ratings

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
LASTFM_RAW = os.path.join(REPO_ROOT, "data", "hetrec2011-lastfm-2k")

SYNTH_PLAN = {
    "task": "regression",
    "baseline": "Basic",
    "learners": ["random_forest"],
    "combinations": [
        {"name": "Basic", "columns": ["Manual__*"]},
        {"name": "All_Graph", "columns": ["BL*"]},
    ],
}


def run_feature_pipeline(config_path: str, jobs: int = 5) -> None:
    result = subprocess.run(
        ["graphfeat", "run", "--config", config_path, "--jobs", str(jobs)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr


@pytest.fixture(scope="module")
def synthetic_experiment(tmp_path_factory):
    """Generate the planted-community data, run the pipeline once, and
    evaluate the baseline and graph combinations; shared by both synthetic
    criteria."""
    base = tmp_path_factory.mktemp("synth")
    started = time.monotonic()
    info = generate_synthetic_ratings(str(base), ratings_per_user=6, seed=1)
    assert info["n_users"] == 2000 and info["n_items"] == 1000
    run_feature_pipeline(info["config"])
    plan = {
        **SYNTH_PLAN,
        "external": [
            {"file": str(base / "manual_user.csv"), "key": "source"},
            {"file": str(base / "manual_item.csv"), "key": "target"},
        ],
    }
    report = ablation_run(str(base / "features" / "manifest.json"), plan, seed=0)
    elapsed = time.monotonic() - started
    return report, elapsed


def test_rating_prediction_direction_of_effect(synthetic_experiment):
    report, elapsed = synthetic_experiment
    basic = report.value("Basic", "random_forest", "rmse")
    graph = report.value("All_Graph", "random_forest", "rmse")
    assert graph < basic
    graph_row = next(
        r
        for r in report.rows
        if r.combination == "All_Graph" and r.metric == "rmse"
    )
    assert len(graph_row.per_fold) == 5
    assert graph_row.p_vs_baseline < 0.05
    assert elapsed < 600


def test_bucket_analysis_shape(synthetic_experiment):
    report, _elapsed = synthetic_experiment
    basic = report.predictions[("Basic", "random_forest")]
    graph = report.predictions[("All_Graph", "random_forest")]
    frame = basic[["target", "truth"]].assign(
        Basic=basic["prediction"], All_Graph=graph["prediction"]
    )
    table = bucket_analysis(frame, statistic="rating_std", n_buckets=5)
    sizes = table["entities"].tolist()
    assert max(sizes) - min(sizes) <= 1
    basic_ratio = table["rmse_Basic"].iloc[-1] / table["rmse_Basic"].iloc[0]
    graph_ratio = table["rmse_All_Graph"].iloc[-1] / table["rmse_All_Graph"].iloc[0]
    assert graph_ratio < basic_ratio


@pytest.mark.skipif(
    not os.path.exists(os.path.join(LASTFM_RAW, "user_artists.dat")),
    reason="hetrec2011-lastfm-2k not fetched; run scripts/fetch_hetrec_lastfm.py",
)
def test_lastfm_direction_of_effect(tmp_path):
    from evalharness.lastfm import RANKING_PLAN, prepare_lastfm_subset

    started = time.monotonic()
    info = prepare_lastfm_subset(LASTFM_RAW, str(tmp_path), n_users=300, seed=0)
    assert info["users"] == 300
    run_feature_pipeline(info["config"])
    report = ablation_run(
        str(tmp_path / "features" / "manifest.json"), RANKING_PLAN, seed=0
    )
    baseline = report.value("BL", "random_forest", "p_at_10")
    all_graph = report.value("All_Graph", "random_forest", "p_at_10")
    assert all_graph >= 1.15 * baseline
    assert time.monotonic() - started < 900
