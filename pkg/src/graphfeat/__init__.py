"""Heterogeneous-graph feature extraction for tabular recommender datasets.

The package turns relational CSV tables into a typed undirected graph,
enumerates every sub-graph obtained by dropping subsets of the non-predicted
edge types, and emits per-fold, leakage-safe feature tables for each
(source, target) pair of the predicted relationship.
"""

from graphfeat.errors import DataError, InternalError, SchemaError
from graphfeat.schema import (
    BinningSpec,
    ColumnSpec,
    DatasetSchema,
    RelationshipSpec,
    TableSpec,
    load_schema,
    parse_schema,
)
from graphfeat.tabular import TabularDataset, discretize_column, ingest_tables
from graphfeat.graph import (
    GraphView,
    HeteroGraph,
    VertexId,
    build_complete_graph,
    export_edge_list,
    is_bipartite,
    mask_predicted_edges,
)
from graphfeat.schemes import (
    SchemeMask,
    expected_feature_count,
    expected_scheme_count,
    generate_edge_combinations,
    remove_edges,
)
from graphfeat.metrics import (
    MISSING,
    UNREACHABLE,
    Missing,
    PageRankParams,
    avg_neighbor_degree,
    clustering_coefficient,
    degree_centrality,
    node_redundancy,
    pagerank,
    shared_neighbors_of_type,
    shared_neighbors_ratio,
    shortest_path_excluding,
)
from graphfeat.extract import (
    FeatureTable,
    GeneratorRegistry,
    default_registry,
    extract_all_features,
    extract_subgraph_features,
    feature_column_name,
    serialized_columns,
    write_feature_csv,
)
from graphfeat.folds import CandidateSet, FoldPlan, build_candidate_sets, make_folds, sample_negatives
from graphfeat.pipeline import RunConfig, run_pipeline

__all__ = [
    "BinningSpec",
    "CandidateSet",
    "ColumnSpec",
    "DataError",
    "DatasetSchema",
    "FeatureTable",
    "FoldPlan",
    "GeneratorRegistry",
    "GraphView",
    "HeteroGraph",
    "InternalError",
    "MISSING",
    "Missing",
    "PageRankParams",
    "RelationshipSpec",
    "RunConfig",
    "SchemaError",
    "SchemeMask",
    "TableSpec",
    "TabularDataset",
    "UNREACHABLE",
    "VertexId",
    "avg_neighbor_degree",
    "build_candidate_sets",
    "build_complete_graph",
    "clustering_coefficient",
    "default_registry",
    "degree_centrality",
    "discretize_column",
    "expected_feature_count",
    "expected_scheme_count",
    "export_edge_list",
    "extract_all_features",
    "extract_subgraph_features",
    "feature_column_name",
    "generate_edge_combinations",
    "ingest_tables",
    "is_bipartite",
    "load_schema",
    "parse_schema",
    "make_folds",
    "mask_predicted_edges",
    "node_redundancy",
    "pagerank",
    "remove_edges",
    "run_pipeline",
    "sample_negatives",
    "serialized_columns",
    "shared_neighbors_of_type",
    "shared_neighbors_ratio",
    "shortest_path_excluding",
    "write_feature_csv",
]
