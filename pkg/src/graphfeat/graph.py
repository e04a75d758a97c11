"""Typed undirected graph built from a tabular dataset, plus masked views.

Vertices are (entity_type, value) pairs; every distinct value of every entity
column becomes a vertex.  Edges carry the relationship name as their type.
Fold masking and scheme selection are implemented as views over one immutable
base graph: adjacency queries consult an exclusion set and a kept-type set
instead of copying the structure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from graphfeat.errors import DataError, InternalError
from graphfeat.schema import DatasetSchema
from graphfeat.tabular import TabularDataset, format_number


@dataclass(frozen=True, order=True)
class VertexId:
    entity_type: str
    value: str

    def __str__(self) -> str:
        return f"{self.entity_type}={self.value}"


Edge = tuple[VertexId, VertexId, str]


def canonical_pair(a: VertexId, b: VertexId) -> tuple[VertexId, VertexId]:
    return (a, b) if a <= b else (b, a)


class HeteroGraph:
    """Immutable heterogeneous graph with per-type adjacency."""

    def __init__(
        self,
        vertices: set[VertexId],
        edges: dict[Edge, str | None],
        predicted_edge_type: str,
        type_endpoints: dict[str, tuple[str, str]],
    ):
        self.predicted_edge_type = predicted_edge_type
        self.type_endpoints = dict(type_endpoints)
        self.edge_types = frozenset(type_endpoints)
        if predicted_edge_type not in self.edge_types:
            raise InternalError("predicted edge type missing from type map")
        self.vertices = frozenset(vertices)
        self.edges: dict[Edge, str | None] = {}
        self.adj: dict[VertexId, dict[str, set[VertexId]]] = {
            v: {} for v in self.vertices
        }
        for (a, b, etype), label in edges.items():
            if a == b:
                raise InternalError(f"self-loop on {a}")
            if a not in self.vertices or b not in self.vertices:
                raise InternalError(f"edge endpoint missing from vertex set: {a}, {b}")
            if etype not in self.edge_types:
                raise InternalError(f"edge of undeclared type {etype!r}")
            a, b = canonical_pair(a, b)
            key = (a, b, etype)
            if key in self.edges:
                raise InternalError(f"duplicate edge {key}")
            self.edges[key] = label
            self.adj[a].setdefault(etype, set()).add(b)
            self.adj[b].setdefault(etype, set()).add(a)

    def predicted_edges(self) -> set[tuple[VertexId, VertexId]]:
        return {
            (a, b)
            for (a, b, etype) in self.edges
            if etype == self.predicted_edge_type
        }

    def view(self) -> "GraphView":
        return GraphView(self, kept_types=self.edge_types, excluded=frozenset())


class GraphView:
    """Read-only window over a HeteroGraph.

    ``kept_types`` selects which edge types are visible; ``excluded`` holds
    canonical predicted-type pairs hidden for fold masking.  The vertex set is
    always that of the base graph.
    """

    def __init__(
        self,
        base: HeteroGraph,
        kept_types: frozenset[str],
        excluded: frozenset[tuple[VertexId, VertexId]],
    ):
        unknown = kept_types - base.edge_types
        if unknown:
            raise DataError(f"unknown edge types {sorted(unknown)}")
        if base.predicted_edge_type not in kept_types:
            raise InternalError("a view must always keep the predicted edge type")
        self.base = base
        self.kept_types = kept_types
        self.excluded = excluded
        self._neighbor_cache: dict[VertexId, frozenset[VertexId]] = {}
        self._bipartite: tuple | None = None
        self._metric_cache = None  # lazily attached by graphfeat.metrics

    @property
    def vertices(self) -> frozenset[VertexId]:
        return self.base.vertices

    @property
    def predicted_edge_type(self) -> str:
        return self.base.predicted_edge_type

    def __contains__(self, v: VertexId) -> bool:
        return v in self.base.vertices

    def _excluded_partner(self, v: VertexId, u: VertexId) -> bool:
        return canonical_pair(v, u) in self.excluded

    def neighbors(self, v: VertexId) -> frozenset[VertexId]:
        if v not in self.base.adj:
            raise DataError(f"unknown vertex {v}")
        cached = self._neighbor_cache.get(v)
        if cached is not None:
            return cached
        result: set[VertexId] = set()
        by_type = self.base.adj[v]
        for etype in self.kept_types:
            nbrs = by_type.get(etype)
            if not nbrs:
                continue
            if etype == self.predicted_edge_type and self.excluded:
                result.update(
                    u for u in nbrs if not self._excluded_partner(v, u)
                )
            else:
                result.update(nbrs)
        frozen = frozenset(result)
        self._neighbor_cache[v] = frozen
        return frozen

    def neighbors_excluding_pair(
        self, v: VertexId, pair: tuple[VertexId, VertexId]
    ) -> frozenset[VertexId]:
        """Neighbors of v with the direct predicted edge of ``pair`` hidden.

        Only the predicted-type connection between the pair is dropped; a
        parallel edge of another kept type still counts.
        """
        nbrs = self.neighbors(v)
        s, t = pair
        if v == s:
            other = t
        elif v == t:
            other = s
        else:
            return nbrs
        if other not in nbrs:
            return nbrs
        if self._connected_by_non_predicted(v, other):
            return nbrs
        if other in self.base.adj[v].get(self.predicted_edge_type, ()):
            return nbrs - {other}
        return nbrs

    def _connected_by_non_predicted(self, a: VertexId, b: VertexId) -> bool:
        for etype in self.kept_types:
            if etype == self.predicted_edge_type:
                continue
            if b in self.base.adj[a].get(etype, ()):
                return True
        return False

    def degree(self, v: VertexId) -> int:
        return len(self.neighbors(v))

    def iter_edges(self):
        """Yield (a, b, type, label) for every visible edge, canonical order."""
        for (a, b, etype), label in self.base.edges.items():
            if etype not in self.kept_types:
                continue
            if etype == self.predicted_edge_type and (a, b) in self.excluded:
                continue
            yield a, b, etype, label

    def predicted_edge_count(self) -> int:
        return sum(
            1
            for (a, b, etype) in self.base.edges
            if etype == self.predicted_edge_type and (a, b) not in self.excluded
        )

    def entity_types_present(self) -> frozenset[str]:
        """Entity types that can appear as endpoints of kept edge types."""
        names: set[str] = set()
        for etype in self.kept_types:
            src, tgt = self.base.type_endpoints[etype]
            names.add(src)
            names.add(tgt)
        return frozenset(names)

    def bipartite_witness(self):
        """(is_bipartite, coloring or None, odd_cycle or None), cached."""
        if self._bipartite is None:
            self._bipartite = _two_color(self)
        return self._bipartite

    @property
    def is_bipartite(self) -> bool:
        return self.bipartite_witness()[0]


# FoldMaskedGraph in the design vocabulary: a view with every edge type kept
# and the held-out predicted pairs excluded.
FoldMaskedGraph = GraphView


def _as_view(graph) -> GraphView:
    return graph.view() if isinstance(graph, HeteroGraph) else graph


def build_complete_graph(
    dataset: TabularDataset, schema: DatasetSchema
) -> HeteroGraph:
    """Construct the full graph: one vertex per distinct entity value, one
    edge per distinct relationship instance.

    Duplicate instances collapse to a single edge whose label aggregates the
    duplicates: mean for numeric labels, occurrence count when no label column
    exists and the instance repeats.
    """
    if not dataset.discretized:
        for table in schema.tables:
            for col in table.columns:
                if col.role == "feature" and col.value_kind == "numeric":
                    raise DataError(
                        "numeric feature columns must be discretized before "
                        "graph construction"
                    )

    vertices: set[VertexId] = set()
    for table in schema.tables:
        data = dataset.table(table.name)
        for col in table.entity_columns():
            entity = col.entity_name
            for value in data.index.get(col.name, ()):
                vertices.add(VertexId(entity, str(value)))

    pending: dict[Edge, list] = {}
    for rel in schema.relationships:
        data = dataset.table(rel.table)
        src_col, tgt_col = schema.relationship_columns(rel.name)
        src_pos = data.column_position(src_col.name)
        tgt_pos = data.column_position(tgt_col.name)
        label_cols = list(rel.feature_labels)
        if not label_cols:
            feedback = schema.table(rel.table).feedback_column
            if feedback is not None:
                label_cols = [feedback.name]
        label_positions = [data.column_position(c) for c in label_cols]
        for row in data.rows:
            sv, tv = row[src_pos], row[tgt_pos]
            if sv is None or tv is None:
                continue
            a = VertexId(src_col.entity_name, str(sv))
            b = VertexId(tgt_col.entity_name, str(tv))
            if a == b:
                continue
            if a not in vertices or b not in vertices:
                raise InternalError(
                    f"row references entity value absent from index: {a}, {b}"
                )
            label = None
            if label_positions:
                parts = [row[p] for p in label_positions]
                parts = [p for p in parts if p is not None]
                if parts:
                    label = parts[0] if len(parts) == 1 else parts
            x, y = canonical_pair(a, b)
            pending.setdefault((x, y, rel.name), []).append(label)

    edges: dict[Edge, str | None] = {}
    for key, labels in pending.items():
        present = [l for l in labels if l is not None]
        if not present:
            label = format_number(len(labels)) if len(labels) > 1 else None
        elif all(isinstance(l, float) for l in present):
            label = format_number(sum(present) / len(present))
        else:
            flat = sorted(
                str(l) if not isinstance(l, list) else "|".join(map(str, l))
                for l in present
            )
            label = flat[0] if len(set(flat)) == 1 else "|".join(flat)
        edges[key] = label

    type_endpoints = {
        rel.name: (rel.source_entity, rel.target_entity)
        for rel in schema.relationships
    }
    return HeteroGraph(
        vertices=vertices,
        edges=edges,
        predicted_edge_type=schema.predicted_relationship,
        type_endpoints=type_endpoints,
    )


def mask_predicted_edges(
    graph: HeteroGraph | GraphView,
    held_out: set[tuple[VertexId, VertexId]],
) -> GraphView:
    """Hide the given predicted-type edges from all adjacency queries.

    The vertex set is unchanged: entities seen only in the test fold stay in
    the graph, they just lose their held-out predicted edges.
    """
    view = _as_view(graph)
    base = view.base
    pred = base.predicted_edge_type
    normalized = set()
    for a, b in held_out:
        x, y = canonical_pair(a, b)
        if (x, y, pred) not in base.edges:
            for etype in base.edge_types:
                if etype != pred and (x, y, etype) in base.edges:
                    raise DataError(
                        f"held-out edge ({a}, {b}) is of type {etype!r}, "
                        "not the predicted type"
                    )
            raise DataError(f"held-out edge ({a}, {b}) is not in the graph")
        normalized.add((x, y))
    return GraphView(
        base,
        kept_types=view.kept_types,
        excluded=view.excluded | frozenset(normalized),
    )


def _two_color(view: GraphView):
    color: dict[VertexId, int] = {}
    parent: dict[VertexId, VertexId | None] = {}
    for start in sorted(view.vertices):
        if start in color:
            continue
        color[start] = 0
        parent[start] = None
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in view.neighbors(v):
                if u not in color:
                    color[u] = 1 - color[v]
                    parent[u] = v
                    queue.append(u)
                elif color[u] == color[v]:
                    return False, None, _odd_cycle(v, u, parent)
    return True, dict(color), None


def _odd_cycle(v: VertexId, u: VertexId, parent: dict) -> list[VertexId]:
    path_v = _root_path(v, parent)
    path_u = _root_path(u, parent)
    anc_u = set(path_u)
    i = next(i for i, x in enumerate(path_v) if x in anc_u)
    meet = path_v[i]
    left = path_v[: i + 1]
    right = path_u[: path_u.index(meet)]
    return left + list(reversed(right))


def _root_path(v: VertexId, parent: dict) -> list[VertexId]:
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def is_bipartite(graph: HeteroGraph | GraphView):
    """Check 2-colorability of the visible edges.

    Returns (flag, witness): the witness is a vertex->color map when
    bipartite, otherwise an odd cycle as a vertex list.
    """
    flag, coloring, cycle = _as_view(graph).bipartite_witness()
    return flag, coloring if flag else cycle


def export_edge_list(graph: HeteroGraph | GraphView) -> str:
    """Debug export: one tab-separated line per visible edge, sorted."""
    view = _as_view(graph)
    lines = []
    for a, b, etype, label in view.iter_edges():
        lines.append(f"{etype}\t{a}\t{b}\t{label if label is not None else ''}")
    return "".join(line + "\n" for line in sorted(lines))
