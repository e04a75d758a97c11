"""Command-line interface.

Exit codes: 0 success, 2 configuration/schema error, 3 data error,
4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from graphfeat.errors import DataError, GraphfeatError, SchemaError
from graphfeat.graph import (
    HeteroGraph,
    VertexId,
    export_edge_list,
    mask_predicted_edges,
)
from graphfeat.metrics import (
    PageRankParams,
    avg_neighbor_degree,
    clustering_coefficient,
    degree_centrality,
    is_missing,
    node_redundancy,
    pagerank,
    shared_neighbors_of_type,
    shared_neighbors_ratio,
    shortest_path_excluding,
)
from graphfeat.pipeline import RunConfig, build_state, run_fold, run_pipeline
from graphfeat.schema import load_schema
from graphfeat.schemes import generate_edge_combinations


def _jobs_fallback() -> int | None:
    raw = os.environ.get("GRAPHFEAT_JOBS")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"GRAPHFEAT_JOBS must be an integer, got {raw!r}")


def _load_config(args) -> RunConfig:
    config = RunConfig.from_json(args.config)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = os.path.abspath(args.out)
    jobs = getattr(args, "jobs", None)
    if jobs is None:
        env_jobs = _jobs_fallback()
        if env_jobs is not None:
            overrides["jobs"] = env_jobs
    else:
        overrides["jobs"] = jobs
    return replace(config, **overrides) if overrides else config


def _cmd_run(args) -> int:
    manifest = run_pipeline(_load_config(args))
    print(f"wrote {len(manifest['files'])} files + manifest.json")
    return 0


def _cmd_schema_validate(args) -> int:
    schema = load_schema(args.schema)
    print(
        f"schema OK: {len(schema.tables)} tables, "
        f"{len(schema.relationships)} relationships, "
        f"predicted = {schema.predicted_relationship}"
    )
    return 0


def _cmd_enumerate_schemes(args) -> int:
    schema = load_schema(args.schema)
    masks = generate_edge_combinations(
        set(schema.edge_types), schema.predicted_relationship
    )
    for mask in masks:
        print(mask.scheme_id)
    return 0


def _cmd_folds(args) -> int:
    state = build_state(_load_config(args))
    plan = state.plan
    summary = {
        "n_folds": plan.n_folds,
        "prune_threshold": plan.prune_threshold,
        "seed": plan.rng_seed,
        "instances": len(plan.instances),
        "fold_sizes": [
            sum(1 for f in plan.assignment if f == k)
            for k in range(plan.n_folds)
        ],
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_build_graph(args) -> int:
    state = build_state(_load_config(args))
    graph = state.graph
    if args.fold is not None:
        held_out = {
            (s, t) for s, t, _label in state.plan.test_instances(args.fold)
        }
        view = mask_predicted_edges(graph, held_out)
    else:
        view = graph.view()
    text = export_edge_list(view)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_extract(args) -> int:
    config = _load_config(args)
    state = build_state(config)
    os.makedirs(config.out_dir, exist_ok=True)
    entries = run_fold(state, args.fold)
    for entry in entries:
        print(f"{entry['path']}: {entry['rows']} rows, {entry['columns']} columns")
    return 0


_METRIC_OPS = {
    "degree_centrality": (degree_centrality, 1),
    "avg_neighbor_degree": (avg_neighbor_degree, 1),
    "clustering_coefficient": (clustering_coefficient, 1),
    "node_redundancy": (node_redundancy, 1),
    "pagerank": (None, 1),
    "shortest_path_excluding": (shortest_path_excluding, 2),
    "shared_neighbors_ratio": (shared_neighbors_ratio, 2),
    "shared_neighbors_of_type": (shared_neighbors_of_type, 3),
}


def _parse_vertex(text: str) -> VertexId:
    if "=" not in text:
        raise SchemaError(f"vertex must be written entity=value, got {text!r}")
    entity, value = text.split("=", 1)
    return VertexId(entity, value)


def load_edge_list(path: str, predicted: str | None = None) -> HeteroGraph:
    """Rebuild a graph from the debug edge-list export."""
    vertices: set[VertexId] = set()
    edges: dict = {}
    endpoints: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataError(f"{path}:{line_no}: expected 4 tab-separated fields")
            etype, a_text, b_text, label = parts
            a = _parse_vertex(a_text)
            b = _parse_vertex(b_text)
            vertices.update((a, b))
            endpoints.setdefault(etype, (a.entity_type, b.entity_type))
            key = (a, b, etype) if a <= b else (b, a, etype)
            edges[key] = label or None
    if not endpoints:
        raise DataError(f"{path}: edge list is empty")
    if predicted is None:
        predicted = sorted(endpoints)[0]
    return HeteroGraph(
        vertices=vertices,
        edges=edges,
        predicted_edge_type=predicted,
        type_endpoints=endpoints,
    )


def _format_metric(value) -> str:
    if is_missing(value):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return format(value, ".12g")


def _cmd_metric(args) -> int:
    graph = load_edge_list(args.graph, predicted=args.predicted)
    if args.op not in _METRIC_OPS:
        raise SchemaError(f"unknown metric op {args.op!r}")
    fn, arity = _METRIC_OPS[args.op]
    v = _parse_vertex(args.vertex)
    if args.op == "pagerank":
        result = pagerank(graph, PageRankParams())
        print(_format_metric(result.scores[v]))
        return 0
    if arity == 1:
        print(_format_metric(fn(graph, v)))
        return 0
    if args.vertex2 is None:
        raise SchemaError(f"op {args.op!r} requires --vertex2")
    t = _parse_vertex(args.vertex2)
    if arity == 2:
        print(_format_metric(fn(graph, v, t)))
        return 0
    if args.entity_type is None:
        raise SchemaError(f"op {args.op!r} requires --entity-type")
    print(_format_metric(fn(graph, v, t, args.entity_type)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphfeat",
        description="Graph-based feature extraction for tabular recommender data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", required=True, help="run configuration JSON")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--jobs", type=int, help="parallelism degree")
        p.add_argument("--out", help="override the output directory")

    run = sub.add_parser("run", help="run the full pipeline")
    add_config_flags(run)
    run.set_defaults(handler=_cmd_run)

    schema = sub.add_parser("schema", help="schema utilities")
    schema_sub = schema.add_subparsers(dest="schema_command", required=True)
    validate = schema_sub.add_parser("validate", help="validate a schema file")
    validate.add_argument("--schema", required=True)
    validate.set_defaults(handler=_cmd_schema_validate)

    enumerate_p = sub.add_parser(
        "enumerate-schemes", help="print every scheme id, one per line"
    )
    enumerate_p.add_argument("--schema", required=True)
    enumerate_p.set_defaults(handler=_cmd_enumerate_schemes)

    folds = sub.add_parser("folds", help="print the fold plan summary")
    add_config_flags(folds)
    folds.set_defaults(handler=_cmd_folds)

    build_graph = sub.add_parser(
        "build-graph", help="export the (optionally fold-masked) edge list"
    )
    add_config_flags(build_graph)
    build_graph.add_argument(
        "--fold", type=int, help="mask this fold's test edges"
    )
    build_graph.set_defaults(handler=_cmd_build_graph)

    extract = sub.add_parser("extract", help="emit feature files for one fold")
    add_config_flags(extract)
    extract.add_argument("--fold", type=int, required=True)
    extract.set_defaults(handler=_cmd_extract)

    metric = sub.add_parser("metric", help="evaluate one metric on an edge list")
    metric.add_argument("--graph", required=True, help="edge-list export file")
    metric.add_argument("--op", required=True)
    metric.add_argument("--vertex", required=True, help="entity=value")
    metric.add_argument("--vertex2", help="entity=value")
    metric.add_argument("--entity-type", dest="entity_type")
    metric.add_argument(
        "--predicted", help="edge type treated as predicted (default: first)"
    )
    metric.set_defaults(handler=_cmd_metric)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except GraphfeatError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
