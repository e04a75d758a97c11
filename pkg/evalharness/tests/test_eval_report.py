"""Ablation runs and report serialization, including the CLI wrapper."""

import csv
import json
import os

import pytest

from evalharness.cli import main as eval_main
from evalharness.errors import PlanError
from evalharness.report import ablation_run, write_report

from eval_helpers import synthetic_fold_tables, write_pipeline_outputs

PLAN = {
    "task": "regression",
    "baseline": "Noise",
    "learners": ["random_forest"],
    "combinations": [
        {"name": "Noise", "columns": ["Noise__*"]},
        {"name": "Signal", "columns": ["BL__pair__good_signal"]},
        {"name": "All", "columns": ["BL*", "Noise__*"]},
    ],
}


@pytest.fixture
def manifest_path(tmp_path):
    return write_pipeline_outputs(tmp_path, synthetic_fold_tables(3))


class TestAblationRun:
    def test_cross_product_rows(self, manifest_path):
        plan = {**PLAN, "learners": ["random_forest", "gradient_boosting"]}
        report = ablation_run(manifest_path, plan, seed=0)
        # 3 combinations x 2 learners x 2 metrics
        assert len(report.rows) == 12
        assert all(len(row.per_fold) == 3 for row in report.rows)

    def test_signal_beats_noise_with_significance(self, manifest_path):
        report = ablation_run(manifest_path, PLAN, seed=0)
        noise = report.value("Noise", "random_forest", "rmse")
        signal = report.value("Signal", "random_forest", "rmse")
        assert signal < noise
        signal_row = next(
            r
            for r in report.rows
            if r.combination == "Signal" and r.metric == "rmse"
        )
        assert signal_row.p_vs_baseline is not None
        assert signal_row.p_vs_baseline < 0.05
        assert signal_row.improvement_pct > 0

    def test_baseline_rows_have_no_comparison(self, manifest_path):
        report = ablation_run(manifest_path, PLAN, seed=0)
        for row in report.rows:
            if row.combination == "Noise":
                assert row.p_vs_baseline is None
                assert row.improvement_pct is None

    def test_reproducible(self, manifest_path):
        a = ablation_run(manifest_path, PLAN, seed=4)
        b = ablation_run(manifest_path, PLAN, seed=4)
        assert a.rows == b.rows

    def test_predictions_collected(self, manifest_path):
        report = ablation_run(manifest_path, PLAN, seed=0)
        frame = report.predictions[("Signal", "random_forest")]
        assert set(frame.columns) == {"fold", "source", "target", "truth", "prediction"}
        assert sorted(frame["fold"].unique()) == [0, 1, 2]

    def test_unknown_baseline_rejected(self, manifest_path):
        with pytest.raises(PlanError, match="baseline"):
            ablation_run(manifest_path, {**PLAN, "baseline": "Ghost"}, seed=0)

    def test_single_combination_no_improvement_column(self, manifest_path):
        plan = {
            "task": "regression",
            "combinations": [{"name": "Signal", "columns": ["BL*"]}],
        }
        report = ablation_run(manifest_path, plan, seed=0)
        assert all(r.improvement_pct is None for r in report.rows)


class TestRankingRun:
    def test_precision_at_k_from_candidates(self, tmp_path):
        tables = synthetic_fold_tables(2)
        header = [
            "source",
            "target",
            "label",
            "BL__pair__good_signal",
            "Noise__pair__random",
        ]
        for fold in range(2):
            rows = [header]
            for u in range(4):
                for c in range(10):
                    positive = 1 if c < 2 else 0
                    # positives carry the feature value the train split
                    # associates with high labels
                    rows.append(
                        [f"u{u}", f"i{c}", positive, 1 + positive * 4, c / 10]
                    )
            tables[f"fold{fold}_candidates_10.csv"] = rows
        manifest_path = write_pipeline_outputs(tmp_path, tables)
        plan = {
            "task": "ranking",
            "k": 2,
            "candidate_size": 10,
            "baseline": "Bad",
            "combinations": [
                {"name": "Bad", "columns": ["Noise__*"]},
                {"name": "Good", "columns": ["BL__pair__good_signal"]},
            ],
        }
        report = ablation_run(manifest_path, plan, seed=0)
        good = report.value("Good", "random_forest", "p_at_2")
        bad = report.value("Bad", "random_forest", "p_at_2")
        assert good > bad


class TestWriteReport:
    def test_csv_and_md_written(self, manifest_path, tmp_path):
        report = ablation_run(manifest_path, PLAN, seed=0)
        out = tmp_path / "reports"
        csv_path, md_path = write_report(report, str(out))
        with open(csv_path) as fh:
            rows = list(csv.DictReader(fh))
        assert {row["combination"] for row in rows} == {"Noise", "Signal", "All"}
        assert set(rows[0]) == {
            "combination",
            "learner",
            "metric",
            "value",
            "p_vs_baseline",
        }
        text = open(md_path).read()
        assert "train-split column median" in text
        assert "| Signal |" in text


class TestCli:
    def test_end_to_end(self, manifest_path, tmp_path, capsys):
        plan_path = tmp_path / "plan.json"
        plan_path.write_text(json.dumps(PLAN))
        out = tmp_path / "reportdir"
        code = eval_main(
            [
                "--manifest",
                manifest_path,
                "--plan",
                str(plan_path),
                "--seed",
                "3",
                "--out",
                str(out),
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        assert os.path.exists(out / "report.csv")
        assert "Signal / random_forest / rmse" in captured.out

    def test_bad_plan_exit_2(self, manifest_path, tmp_path, capsys):
        plan_path = tmp_path / "plan.json"
        plan_path.write_text(json.dumps({"combinations": []}))
        code = eval_main(["--manifest", manifest_path, "--plan", str(plan_path)])
        assert code == 2
        assert "plan error" in capsys.readouterr().err

    def test_missing_manifest_exit_3(self, tmp_path, capsys):
        plan_path = tmp_path / "plan.json"
        plan_path.write_text(json.dumps(PLAN))
        code = eval_main(
            ["--manifest", str(tmp_path / "nope.json"), "--plan", str(plan_path)]
        )
        assert code == 3
        assert "data error" in capsys.readouterr().err
