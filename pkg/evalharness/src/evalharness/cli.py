"""Command-line entry point: run an ablation plan against a pipeline manifest.

Exit codes match the feature pipeline: 0 success, 2 plan/config error,
3 data error.
"""

from __future__ import annotations

import argparse
import os
import sys

from evalharness.errors import EvalDataError, EvalError, PlanError
from evalharness.report import ablation_run, load_plan, write_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphfeat-eval",
        description="Evaluate feature combinations over emitted feature CSVs",
    )
    parser.add_argument("--manifest", required=True, help="pipeline manifest.json")
    parser.add_argument("--plan", required=True, help="ablation plan JSON")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--out", help="report directory (default: next to the manifest)"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        plan = load_plan(args.plan)
        report = ablation_run(args.manifest, plan, seed=args.seed)
        out_dir = args.out or os.path.dirname(os.path.abspath(args.manifest))
        csv_path, md_path = write_report(report, out_dir)
        print(f"wrote {csv_path} and {md_path}")
        for row in report.rows:
            extra = (
                f"  ({row.improvement_pct:+.2f}% vs {report.metadata['baseline']})"
                if row.improvement_pct is not None
                else ""
            )
            print(
                f"{row.combination} / {row.learner} / {row.metric}: "
                f"{row.value:.4f}{extra}"
            )
        return 0
    except PlanError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return 2
    except EvalDataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except EvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
