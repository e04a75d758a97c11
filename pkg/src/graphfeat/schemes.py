"""Enumeration of sub-graph schemes and closed-form scheme/feature counts.

A scheme is the graph with one subset of the non-predicted edge types removed;
with M such types there are exactly 2^M schemes.  The predicted relationship
is never removable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from graphfeat.errors import DataError, SchemaError
from graphfeat.graph import GraphView, HeteroGraph

DEFAULT_MAX_SCHEMES = 1024


def scheme_identifier(kept_non_predicted: frozenset[str]) -> str:
    """Deterministic scheme name: the baseline plus the kept edge types."""
    return "BL" + "".join(f"+{t}" for t in sorted(kept_non_predicted))


@dataclass(frozen=True)
class SchemeMask:
    removed_edge_types: frozenset[str]
    scheme_id: str


def generate_edge_combinations(
    edge_types: set[str] | frozenset[str], pred: str
) -> list[SchemeMask]:
    """All removal masks over the non-predicted edge types.

    Ordered by mask cardinality, then lexicographically, so the empty mask
    (the complete graph) always comes first.
    """
    if pred not in edge_types:
        raise SchemaError(
            f"predicted relationship {pred!r} is not among the edge types"
        )
    removable = sorted(set(edge_types) - {pred})
    masks = []
    for size in range(len(removable) + 1):
        for combo in combinations(removable, size):
            removed = frozenset(combo)
            kept = frozenset(removable) - removed
            masks.append(
                SchemeMask(
                    removed_edge_types=removed,
                    scheme_id=scheme_identifier(kept),
                )
            )
    return masks


def remove_edges(graph: HeteroGraph | GraphView, mask: SchemeMask) -> GraphView:
    """Sub-graph view with the mask's edge types hidden.

    Fold exclusions on the input view carry over; predicted edges are never
    affected by the mask itself.
    """
    view = graph.view() if isinstance(graph, HeteroGraph) else graph
    unknown = mask.removed_edge_types - view.base.edge_types
    if unknown:
        raise DataError(f"mask removes unknown edge types {sorted(unknown)}")
    if view.base.predicted_edge_type in mask.removed_edge_types:
        raise DataError("the predicted relationship cannot be removed")
    return GraphView(
        view.base,
        kept_types=view.kept_types - mask.removed_edge_types,
        excluded=view.excluded,
    )


def expected_scheme_count(m: int) -> int:
    """Number of schemes for M non-predicted edge types: sum of C(M,k) = 2^M."""
    if m < 0:
        raise SchemaError("M must be non-negative")
    return 2**m


def expected_feature_count(m: int, f1: int, f2: int) -> int:
    """Closed-form total feature count: (2*F1 + F2 + M) * 2^M.

    F1 single-vertex generators apply to both endpoints, F2 to the pair, and
    up to M auxiliary entity types feed the type-filtered generator, across
    2^M schemes.
    """
    if m < 0 or f1 < 0 or f2 < 0:
        raise SchemaError("feature-count arguments must be non-negative")
    return (2 * f1 + f2 + m) * 2**m
