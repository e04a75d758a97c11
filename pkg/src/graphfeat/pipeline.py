"""End-to-end orchestration: folds, masking, schemes, extraction, emission.

One run emits, per fold, a train and a test feature CSV (plus candidate-set
CSVs for ranking tasks) and finally a manifest listing every file with a
content digest.  Output bytes are independent of the parallelism degree.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from graphfeat.errors import DataError, GraphfeatError, SchemaError
from graphfeat.extract import (
    FeatureTable,
    default_registry,
    extract_all_features,
    write_feature_csv,
)
from graphfeat.folds import (
    FoldPlan,
    build_candidate_sets,
    derive_seed,
    make_folds,
    predicted_instances,
    sample_negatives,
)
from graphfeat.graph import HeteroGraph, VertexId, build_complete_graph, mask_predicted_edges
from graphfeat.metrics import PageRankParams
from graphfeat.schema import DatasetSchema, load_schema
from graphfeat.schemes import DEFAULT_MAX_SCHEMES, generate_edge_combinations
from graphfeat.tabular import (
    TabularDataset,
    discretize_dataset,
    filter_sparse_features,
    ingest_tables,
)

TASKS = ("regression", "binary", "ranking")


@dataclass(frozen=True)
class RunConfig:
    schema: str
    data_dir: str
    out_dir: str
    n_folds: int = 5
    seed: int = 0
    prune_threshold: int = 5
    task: str = "regression"
    pagerank: PageRankParams = field(default_factory=PageRankParams)
    candidate_sizes: tuple[int, ...] = ()
    positives_per_set: int = 10
    negative_ratio: float | None = None
    jobs: int = 1
    max_schemes: int = DEFAULT_MAX_SCHEMES
    sparse_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise SchemaError(f"unknown task {self.task!r}")
        if self.task == "ranking" and not self.candidate_sizes:
            raise SchemaError("ranking task requires candidate_sizes")
        if self.task != "ranking" and self.candidate_sizes:
            raise SchemaError("candidate_sizes only apply to the ranking task")
        if self.task == "binary" and self.negative_ratio is None:
            raise SchemaError("binary task requires negative_ratio")
        if self.task != "binary" and self.negative_ratio is not None:
            raise SchemaError("negative_ratio only applies to the binary task")
        if self.n_folds < 2:
            raise SchemaError("n_folds must be at least 2")
        if self.jobs < 1:
            raise SchemaError("jobs must be at least 1")

    @classmethod
    def from_json(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise SchemaError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise SchemaError("config document must be a JSON object")
        base = os.path.dirname(os.path.abspath(path))

        def resolve(p: str) -> str:
            return p if os.path.isabs(p) else os.path.join(base, p)

        known = {
            "schema",
            "data_dir",
            "out_dir",
            "n_folds",
            "seed",
            "prune_threshold",
            "task",
            "pagerank",
            "candidate_sizes",
            "positives_per_set",
            "negative_ratio",
            "jobs",
            "max_schemes",
            "sparse_threshold",
        }
        unknown = set(raw) - known
        if unknown:
            raise SchemaError(f"unknown config keys: {sorted(unknown)}")
        for key in ("schema", "data_dir", "out_dir"):
            if key not in raw:
                raise SchemaError(f"config is missing required key {key!r}")
        pagerank = PageRankParams(**raw.get("pagerank", {}))
        return cls(
            schema=resolve(str(raw["schema"])),
            data_dir=resolve(str(raw["data_dir"])),
            out_dir=resolve(str(raw["out_dir"])),
            n_folds=int(raw.get("n_folds", 5)),
            seed=int(raw.get("seed", 0)),
            prune_threshold=int(raw.get("prune_threshold", 5)),
            task=str(raw.get("task", "regression")),
            pagerank=pagerank,
            candidate_sizes=tuple(int(s) for s in raw.get("candidate_sizes", [])),
            positives_per_set=int(raw.get("positives_per_set", 10)),
            negative_ratio=(
                float(raw["negative_ratio"])
                if raw.get("negative_ratio") is not None
                else None
            ),
            jobs=int(raw.get("jobs", 1)),
            max_schemes=int(raw.get("max_schemes", DEFAULT_MAX_SCHEMES)),
            sparse_threshold=float(raw.get("sparse_threshold", 0.5)),
        )


@dataclass
class PipelineState:
    """Everything folds share: the dataset, the complete graph, and the plan."""

    config: RunConfig
    schema: DatasetSchema
    dataset: TabularDataset
    graph: HeteroGraph
    plan: FoldPlan
    masks: list
    target_universe: list[VertexId]
    associated: dict[VertexId, set[VertexId]]


def build_state(config: RunConfig) -> PipelineState:
    schema = load_schema(config.schema)
    dataset = ingest_tables(schema, config.data_dir)
    dataset, _dropped = filter_sparse_features(dataset, config.sparse_threshold)
    dataset = discretize_dataset(dataset)
    graph = build_complete_graph(dataset, schema)

    masks = generate_edge_combinations(
        set(schema.edge_types), schema.predicted_relationship
    )
    if len(masks) > config.max_schemes:
        raise SchemaError(
            f"{len(masks)} schemes exceed the cap of {config.max_schemes}; "
            "raise max_schemes explicitly to proceed"
        )
    plan = make_folds(
        dataset, schema, config.n_folds, config.prune_threshold, config.seed
    )
    tgt_type = schema.predicted.target_entity
    target_universe = sorted(
        v for v in graph.vertices if v.entity_type == tgt_type
    )
    associated: dict[VertexId, set[VertexId]] = {}
    for s, t, _label in predicted_instances(dataset, schema):
        associated.setdefault(s, set()).add(t)
    return PipelineState(
        config=config,
        schema=schema,
        dataset=dataset,
        graph=graph,
        plan=plan,
        masks=masks,
        target_universe=target_universe,
        associated=associated,
    )


def _digest_and_write(out_dir: str, name: str, text: str) -> str:
    """Atomic write (temp name, then rename); returns the content sha256."""
    payload = text.encode("utf-8")
    digest = hashlib.sha256(payload).hexdigest()
    path = os.path.join(out_dir, name)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)
    return digest


def _emit_table(out_dir: str, name: str, table: FeatureTable) -> dict:
    buffer = io.StringIO()
    header = write_feature_csv(table, buffer)
    digest = _digest_and_write(out_dir, name, buffer.getvalue())
    return {
        "path": name,
        "rows": table.row_count,
        "columns": len(header),
        "sha256": digest,
    }


def _train_pairs_and_labels(state: PipelineState, fold: int):
    config = state.config
    positives = state.plan.train_instances(fold)
    if config.task == "binary":
        keyed = {(s, t): 1 for s, t, _label in positives}
        negatives = sample_negatives(
            [(s, t) for s, t, _label in positives],
            state.target_universe,
            state.associated,
            config.negative_ratio,
            derive_seed(config.seed, "negatives", str(fold)),
        )
        for pair in negatives:
            keyed[pair] = 0
        ordered = sorted(keyed)
        return ordered, [keyed[p] for p in ordered]
    keyed = {(s, t): label for s, t, label in positives}
    ordered = sorted(keyed)
    return ordered, [keyed[p] for p in ordered]


def run_fold(state: PipelineState, fold: int) -> list[dict]:
    """Emit every output file for one fold; returns manifest entries."""
    config = state.config
    test_instances = state.plan.test_instances(fold)
    held_out = {(s, t) for s, t, _label in test_instances}
    masked = mask_predicted_edges(state.graph, held_out)
    registry = default_registry(config.pagerank)

    entries = []
    train_pairs, train_labels = _train_pairs_and_labels(state, fold)
    train_table = extract_all_features(
        masked, state.masks, train_pairs, registry, train_labels
    )
    entries.append(_emit_table(config.out_dir, f"fold{fold}_train.csv", train_table))

    test_keyed = {
        (s, t): (1 if config.task == "binary" else label)
        for s, t, label in test_instances
    }
    test_pairs = sorted(test_keyed)
    test_table = extract_all_features(
        masked, state.masks, test_pairs, registry, [test_keyed[p] for p in test_pairs]
    )
    entries.append(_emit_table(config.out_dir, f"fold{fold}_test.csv", test_table))

    if config.task == "ranking":
        candidate_sets = build_candidate_sets(
            [(s, t) for s, t, _label in test_instances],
            config.candidate_sizes,
            config.positives_per_set,
            state.target_universe,
            state.associated,
            derive_seed(config.seed, "candidates", str(fold)),
        )
        for size in config.candidate_sizes:
            pairs: list[tuple[VertexId, VertexId]] = []
            labels: list[int] = []
            for cs in candidate_sets:
                if cs.size != size:
                    continue
                for t in cs.positives:
                    pairs.append((cs.source, t))
                    labels.append(1)
                for t in cs.negatives:
                    pairs.append((cs.source, t))
                    labels.append(0)
            table = extract_all_features(
                masked, state.masks, pairs, registry, labels
            )
            entries.append(
                _emit_table(
                    config.out_dir, f"fold{fold}_candidates_{size}.csv", table
                )
            )
    return entries


_WORKER_STATE: PipelineState | None = None


def _init_worker(config: RunConfig) -> None:
    global _WORKER_STATE
    _WORKER_STATE = build_state(config)


def _worker_run_fold(fold: int) -> list[dict]:
    assert _WORKER_STATE is not None
    return run_fold(_WORKER_STATE, fold)


def run_pipeline(config: RunConfig) -> dict:
    """Run every fold and write the manifest; returns the manifest document."""
    state = build_state(config)
    os.makedirs(config.out_dir, exist_ok=True)

    folds = list(range(config.n_folds))
    if config.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=min(config.jobs, config.n_folds),
            initializer=_init_worker,
            initargs=(replace(config, jobs=1),),
        ) as pool:
            per_fold = list(pool.map(_worker_run_fold, folds))
    else:
        per_fold = [run_fold(state, fold) for fold in folds]

    files = sorted(
        (entry for entries in per_fold for entry in entries),
        key=lambda e: e["path"],
    )
    manifest = {"files": files}
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    _digest_and_write(config.out_dir, "manifest.json", text)
    return manifest


def surface_error(exc: Exception) -> int:
    """Exit code for an error, mirroring the CLI contract."""
    if isinstance(exc, SchemaError):
        return 2
    if isinstance(exc, DataError):
        return 3
    if isinstance(exc, GraphfeatError):
        return 4
    return 4
