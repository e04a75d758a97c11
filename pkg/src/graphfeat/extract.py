"""Per-pair feature extraction across sub-graph schemes.

For every (source, target) pair of the predicted relationship, each scheme
contributes: every single-vertex generator applied to both endpoints, every
pair generator applied to the pair, and the type-filtered shared-neighbor
generator instantiated once per auxiliary entity type present in the scheme.
Column names are fully deterministic and ordered by plain string comparison.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

from graphfeat.errors import DataError, InternalError
from graphfeat.graph import GraphView, HeteroGraph, VertexId
from graphfeat.metrics import (
    MISSING,
    UNREACHABLE,
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
from graphfeat.schemes import SchemeMask, remove_edges, scheme_identifier
from graphfeat.tabular import format_number


@dataclass(frozen=True)
class VertexGenerator:
    name: str
    fn: Callable


@dataclass(frozen=True)
class PairGenerator:
    name: str
    fn: Callable
    emits_unreachable: bool = False


@dataclass(frozen=True)
class TypedPairGenerator:
    name: str
    fn: Callable


@dataclass(frozen=True)
class GeneratorRegistry:
    one_vertex: tuple[VertexGenerator, ...]
    two_vertex: tuple[PairGenerator, ...]
    n_vertex: tuple[TypedPairGenerator, ...]

    def __post_init__(self) -> None:
        names = (
            [g.name for g in self.one_vertex]
            + [g.name for g in self.two_vertex]
            + [g.name for g in self.n_vertex]
        )
        if len(set(names)) != len(names):
            raise DataError("generator names must be unique")


def _pagerank_score(view: GraphView, v: VertexId, params: PageRankParams):
    return pagerank(view, params).scores[v]


def _node_redundancy_or_missing(view: GraphView, v: VertexId):
    # the generator only applies to bipartite schemes; on other schemes the
    # column exists but every cell is Missing
    if not view.is_bipartite:
        return MISSING
    return node_redundancy(view, v)


def default_registry(
    pagerank_params: PageRankParams | None = None,
) -> GeneratorRegistry:
    params = pagerank_params or PageRankParams()
    return GeneratorRegistry(
        one_vertex=(
            VertexGenerator("degree_centrality", degree_centrality),
            VertexGenerator("avg_neighbor_degree", avg_neighbor_degree),
            VertexGenerator(
                "pagerank", lambda g, v: _pagerank_score(g, v, params)
            ),
            VertexGenerator("clustering_coefficient", clustering_coefficient),
            VertexGenerator("node_redundancy", _node_redundancy_or_missing),
        ),
        two_vertex=(
            PairGenerator(
                "shortest_path_excluding",
                shortest_path_excluding,
                emits_unreachable=True,
            ),
            PairGenerator("shared_neighbors_ratio", shared_neighbors_ratio),
        ),
        n_vertex=(
            TypedPairGenerator(
                "shared_neighbors_of_type", shared_neighbors_of_type
            ),
        ),
    )


def feature_column_name(
    scheme_id: str,
    role: str,
    generator_name: str,
    type_param: str | None = None,
) -> str:
    """`<scheme_id>__<role>__<generator>[__<type>]`; string order of these
    names defines the column order everywhere."""
    if role not in ("src", "tgt", "pair"):
        raise DataError(f"unknown column role {role!r}")
    name = f"{scheme_id}__{role}__{generator_name}"
    if type_param is not None:
        name += f"__{type_param}"
    return name


@dataclass
class FeatureTable:
    """Rows keyed by (source, target) pair with aligned optional labels."""

    pairs: tuple[tuple[VertexId, VertexId], ...]
    labels: tuple
    columns: tuple[str, ...]
    cells: dict[str, list] = field(default_factory=dict)
    flag_columns: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.pairs):
            raise InternalError("labels misaligned with pairs")
        if len(set(self.pairs)) != len(self.pairs):
            raise InternalError("duplicate pair keys in feature table")
        if sorted(self.cells) != sorted(self.columns):
            raise InternalError("cells do not match declared columns")
        for column in self.columns:
            if len(self.cells[column]) != len(self.pairs):
                raise InternalError(f"column {column!r} has wrong row count")

    @property
    def row_count(self) -> int:
        return len(self.pairs)


def _scheme_entity_params(view: GraphView) -> list[str]:
    """Auxiliary entity types feeding the type-filtered generator: every
    entity type reachable through kept edge types except the predicted
    relationship's own endpoints."""
    src_type, tgt_type = view.base.type_endpoints[view.predicted_edge_type]
    return sorted(view.entity_types_present() - {src_type, tgt_type})


def extract_subgraph_features(
    graph: HeteroGraph | GraphView,
    pred_pairs,
    registry: GeneratorRegistry,
    labels=None,
) -> FeatureTable:
    """One scheme's feature fragment for the given predicted pairs."""
    view = graph.view() if isinstance(graph, HeteroGraph) else graph
    pred_pairs = [tuple(p) for p in pred_pairs]
    if labels is None:
        labels = [None] * len(pred_pairs)
    labels = list(labels)
    for s, t in pred_pairs:
        if s not in view or t not in view:
            raise DataError(f"pair ({s}, {t}) references an unknown vertex")

    scheme_id = scheme_identifier(
        frozenset(view.kept_types) - {view.predicted_edge_type}
    )
    entity_params = _scheme_entity_params(view)

    cells: dict[str, list] = {}
    flags: set[str] = set()
    for gen in registry.one_vertex:
        for role, pick in (("src", 0), ("tgt", 1)):
            column = feature_column_name(scheme_id, role, gen.name)
            memo: dict[VertexId, object] = {}
            values = []
            for pair in pred_pairs:
                v = pair[pick]
                if v not in memo:
                    memo[v] = gen.fn(view, v)
                values.append(memo[v])
            cells[column] = values
    for gen in registry.two_vertex:
        column = feature_column_name(scheme_id, "pair", gen.name)
        cells[column] = [gen.fn(view, s, t) for s, t in pred_pairs]
        if gen.emits_unreachable:
            flags.add(column)
    for gen in registry.n_vertex:
        for entity_type in entity_params:
            column = feature_column_name(scheme_id, "pair", gen.name, entity_type)
            cells[column] = [
                gen.fn(view, s, t, entity_type) for s, t in pred_pairs
            ]

    return FeatureTable(
        pairs=tuple(pred_pairs),
        labels=tuple(labels),
        columns=tuple(sorted(cells)),
        cells=cells,
        flag_columns=frozenset(flags),
    )


def extract_all_features(
    graph: HeteroGraph | GraphView,
    masks,
    pred_pairs,
    registry: GeneratorRegistry,
    labels=None,
) -> FeatureTable:
    """Union of every scheme fragment, joined on the pair key."""
    view = graph.view() if isinstance(graph, HeteroGraph) else graph
    pred_pairs = [tuple(p) for p in pred_pairs]
    merged_cells: dict[str, list] = {}
    flags: set[str] = set()
    result_pairs: tuple | None = None
    result_labels: tuple | None = None
    for mask in masks:
        fragment = extract_subgraph_features(
            remove_edges(view, mask), pred_pairs, registry, labels
        )
        if result_pairs is None:
            result_pairs = fragment.pairs
            result_labels = fragment.labels
        elif fragment.pairs != result_pairs:
            raise InternalError("scheme fragments disagree on pair keys")
        for column in fragment.columns:
            if column in merged_cells:
                raise InternalError(f"duplicate feature column {column!r}")
            merged_cells[column] = fragment.cells[column]
        flags.update(fragment.flag_columns)
    if result_pairs is None:
        result_pairs = tuple(pred_pairs)
        result_labels = tuple(labels or [None] * len(pred_pairs))
    return FeatureTable(
        pairs=result_pairs,
        labels=result_labels,
        columns=tuple(sorted(merged_cells)),
        cells=merged_cells,
        flag_columns=frozenset(flags),
    )


def _serialize_cell(value) -> str:
    if value is None or is_missing(value):
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, float)):
        return format_number(value)
    return str(value)


def serialized_columns(table: FeatureTable) -> list[str]:
    """Physical CSV columns: the feature columns plus one 0/1 reachability
    flag per column that can report Unreachable."""
    expanded = list(table.columns)
    expanded.extend(f"{c}__unreachable" for c in sorted(table.flag_columns))
    return sorted(expanded)


def write_feature_csv(table: FeatureTable, fh) -> list[str]:
    """Serialize a feature table as RFC-4180 CSV; returns the header."""
    physical = serialized_columns(table)
    header = ["source", "target", "label"] + physical
    writer = csv.writer(fh)
    writer.writerow(header)
    flag_sources = {f"{c}__unreachable": c for c in table.flag_columns}
    for i, (s, t) in enumerate(table.pairs):
        row = [s.value, t.value, _serialize_cell(table.labels[i])]
        for column in physical:
            if column in flag_sources:
                value = table.cells[flag_sources[column]][i]
                row.append("1" if value is UNREACHABLE else "0")
            else:
                row.append(_serialize_cell(table.cells[column][i]))
        writer.writerow(row)
    return header
