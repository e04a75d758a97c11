"""Graph metrics over (possibly masked) sub-graph views.

Three generator families feed the feature extractor: single-vertex metrics
(degree, average neighbor degree, PageRank, clustering coefficient, node
redundancy), pair metrics (shortest path with the direct predicted edge
excluded, shared-neighbor ratio), and the type-filtered shared-neighbor
ratio.  Inapplicable results are an explicit Missing marker, never 0 or NaN.

Expensive state (CSR adjacency, BFS distances, PageRank scores) is cached per
view; all public functions stay pure with respect to the graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from graphfeat.errors import DataError
from graphfeat.graph import GraphView, HeteroGraph, VertexId


class Missing:
    """Marker for a metric that cannot be computed for this input."""

    _instance = None

    def __new__(cls):
        if cls is Missing and cls._instance is not None:
            return cls._instance
        obj = super().__new__(cls)
        if cls is Missing:
            cls._instance = obj
        return obj

    def __repr__(self) -> str:
        return "Missing"


class Unreachable(Missing):
    """Missing caused by graph disconnection; serialized with a flag column."""

    _unreachable_instance = None

    def __new__(cls):
        if cls._unreachable_instance is None:
            cls._unreachable_instance = object.__new__(cls)
        return cls._unreachable_instance

    def __repr__(self) -> str:
        return "Unreachable"


MISSING = Missing()
UNREACHABLE = Unreachable()


def is_missing(value) -> bool:
    return isinstance(value, Missing)


@dataclass(frozen=True)
class PageRankParams:
    damping: float = 0.85
    tolerance: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self) -> None:
        if not 0 < self.damping <= 1:
            raise DataError("damping must lie in (0, 1]")
        if not self.tolerance > 0:
            raise DataError("tolerance must be positive")
        if self.max_iterations < 1:
            raise DataError("max_iterations must be positive")


@dataclass(frozen=True)
class PageRankResult:
    scores: dict
    converged: bool
    iterations: int


def _as_view(graph) -> GraphView:
    return graph.view() if isinstance(graph, HeteroGraph) else graph


class MetricCache:
    """Per-view adjacency in CSR form plus memoized metric state."""

    def __init__(self, view: GraphView):
        self.view = view
        self.verts = sorted(view.vertices)
        self.index = {v: i for i, v in enumerate(self.verts)}
        indptr = [0]
        indices: list[int] = []
        for v in self.verts:
            nbrs = sorted(self.index[u] for u in view.neighbors(v))
            indices.extend(nbrs)
            indptr.append(len(indices))
        n = len(self.verts)
        self.matrix = csr_matrix(
            (
                np.ones(len(indices)),
                np.asarray(indices, dtype=np.int64),
                np.asarray(indptr, dtype=np.int64),
            ),
            shape=(n, n),
        )
        # aliases into the matrix's own storage, so the temporary edge ban in
        # distance_excluding_edge is visible to the solver
        self.indptr = self.matrix.indptr
        self.indices = self.matrix.indices
        self.pagerank_results: dict[PageRankParams, PageRankResult] = {}
        self.vertex_values: dict[tuple[str, VertexId], object] = {}
        self._dist_source: int | None = None
        self._dist: np.ndarray | None = None

    def distances_from(self, i: int) -> np.ndarray:
        """Unweighted distances from vertex i; single-entry cache because the
        extractor walks pairs grouped by source."""
        if self._dist_source != i:
            self._dist = dijkstra(
                self.matrix, directed=True, indices=i, unweighted=True
            )
            self._dist_source = i
        return self._dist

    def distance_excluding_edge(self, i: int, j: int) -> float:
        """Distance i -> j with the direct hop i -> j removed.

        A simple shortest path can only use that edge as its first step, so
        dropping the single forward entry from i's row is equivalent to
        deleting the undirected edge.  The entry is pointed at i itself (a
        self-loop, which never shortens any path) and restored afterwards.
        """
        row = self.indices[self.indptr[i] : self.indptr[i + 1]]
        pos = int(np.searchsorted(row, j))
        if pos >= len(row) or row[pos] != j:
            return float(self.distances_from(i)[j])
        offset = int(self.indptr[i]) + pos
        self.indices[offset] = i
        try:
            dist = dijkstra(
                self.matrix, directed=True, indices=i, unweighted=True
            )
        finally:
            self.indices[offset] = j
        return float(dist[j])


def metric_cache(graph) -> MetricCache:
    view = _as_view(graph)
    if view._metric_cache is None:
        view._metric_cache = MetricCache(view)
    return view._metric_cache


def _require_vertex(view: GraphView, v: VertexId) -> None:
    if v not in view:
        raise DataError(f"unknown vertex {v}")


def degree_centrality(graph, v: VertexId) -> int:
    """Number of distinct neighbors of v across all kept edge types."""
    view = _as_view(graph)
    _require_vertex(view, v)
    return view.degree(v)


def avg_neighbor_degree(graph, v: VertexId):
    """Mean degree over the neighbors of v; Missing for isolated vertices."""
    view = _as_view(graph)
    _require_vertex(view, v)
    nbrs = view.neighbors(v)
    if not nbrs:
        return MISSING
    return sum(view.degree(u) for u in nbrs) / len(nbrs)


def pagerank(graph, params: PageRankParams | None = None) -> PageRankResult:
    """Damped PageRank with uniform teleport and uniform redistribution of
    dangling mass; power iteration until the L1 delta drops below tolerance.
    """
    view = _as_view(graph)
    if not view.vertices:
        raise DataError("pagerank requires a non-empty graph")
    if params is None:
        params = PageRankParams()
    cache = metric_cache(view)
    cached = cache.pagerank_results.get(params)
    if cached is not None:
        return cached

    n = len(cache.verts)
    degrees = np.diff(cache.indptr).astype(float)
    dangling = degrees == 0
    safe_degrees = np.where(dangling, 1.0, degrees)
    d = params.damping
    x = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, params.max_iterations + 1):
        # the adjacency matrix is symmetric, so row and column sums agree
        spread = cache.matrix.dot(x / safe_degrees)
        spread += x[dangling].sum() / n
        x_new = (1.0 - d) / n + d * spread
        delta = np.abs(x_new - x).sum()
        x = x_new
        if delta < params.tolerance:
            converged = True
            break
    result = PageRankResult(
        scores={v: float(x[i]) for i, v in enumerate(cache.verts)},
        converged=converged,
        iterations=iterations,
    )
    cache.pagerank_results[params] = result
    return result


def _jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def clustering_coefficient(graph, v: VertexId):
    """Local clustering of v.

    On a bipartite view: the mean Jaccard overlap between N(v) and N(u) over
    the second neighbors u (v itself excluded); Missing when the second
    neighborhood is empty.  On a non-bipartite view: the triangle-based local
    coefficient; Missing when the degree is below 2.
    """
    view = _as_view(graph)
    _require_vertex(view, v)
    cache = metric_cache(view)
    key = ("clustering", v)
    if key in cache.vertex_values:
        return cache.vertex_values[key]

    nbrs = view.neighbors(v)
    if view.is_bipartite:
        second: set[VertexId] = set()
        for u in nbrs:
            second.update(view.neighbors(u))
        second.discard(v)
        if not second:
            value = MISSING
        else:
            value = sum(_jaccard(nbrs, view.neighbors(u)) for u in second) / len(
                second
            )
    else:
        k = len(nbrs)
        if k < 2:
            value = MISSING
        else:
            ordered = sorted(nbrs)
            links = sum(
                1
                for i, u in enumerate(ordered)
                for w in ordered[i + 1 :]
                if w in view.neighbors(u)
            )
            value = links / (k * (k - 1) / 2)
    cache.vertex_values[key] = value
    return value


def node_redundancy(graph, v: VertexId):
    """Fraction of neighbor pairs of v co-connected through another vertex.

    Defined for bipartite views only; Missing when the degree is below 2.
    """
    view = _as_view(graph)
    _require_vertex(view, v)
    if not view.is_bipartite:
        raise DataError("node_redundancy is defined on bipartite graphs only")
    cache = metric_cache(view)
    key = ("redundancy", v)
    if key in cache.vertex_values:
        return cache.vertex_values[key]

    nbrs = sorted(view.neighbors(v))
    if len(nbrs) < 2:
        value = MISSING
    else:
        neighbor_sets = {u: view.neighbors(u) for u in nbrs}
        witnessed = 0
        total = 0
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1 :]:
                total += 1
                if (neighbor_sets[u] & neighbor_sets[w]) - {v}:
                    witnessed += 1
        value = witnessed / total
    cache.vertex_values[key] = value
    return value


def shortest_path_excluding(graph, s: VertexId, t: VertexId):
    """Breadth-first distance from s to t with the direct predicted-type edge
    between them excluded; Unreachable when no alternate route exists.

    A parallel edge of a non-predicted kept type still provides the direct
    hop.  Because the pair's predicted edge can never be part of the answer,
    this distance is at least 2 (or Unreachable) for every predicted pair.
    """
    view = _as_view(graph)
    _require_vertex(view, s)
    _require_vertex(view, t)
    if s == t:
        raise DataError("shortest_path_excluding requires distinct endpoints")
    cache = metric_cache(view)
    i, j = cache.index[s], cache.index[t]
    direct = t in view.neighbors(s)
    if direct and t not in view.neighbors_excluding_pair(s, (s, t)):
        dist = cache.distance_excluding_edge(i, j)
    else:
        dist = float(cache.distances_from(i)[j])
    if not np.isfinite(dist):
        return UNREACHABLE
    return int(dist)


def _pair_neighbor_sets(view: GraphView, s: VertexId, t: VertexId):
    return (
        view.neighbors_excluding_pair(s, (s, t)),
        view.neighbors_excluding_pair(t, (s, t)),
    )


def shared_neighbors_ratio(graph, s: VertexId, t: VertexId) -> float:
    """Jaccard overlap of the two neighborhoods; the direct predicted edge is
    ignored where it would contribute s to N(t) or t to N(s).  0 when the
    union is empty.
    """
    view = _as_view(graph)
    _require_vertex(view, s)
    _require_vertex(view, t)
    ns, nt = _pair_neighbor_sets(view, s, t)
    return _jaccard(ns, nt)


def shared_neighbors_of_type(graph, s: VertexId, t: VertexId, entity_type: str):
    """Jaccard overlap restricted to neighbors of one entity type; Missing
    when neither endpoint touches a vertex of that type."""
    view = _as_view(graph)
    _require_vertex(view, s)
    _require_vertex(view, t)
    declared = set()
    for src, tgt in view.base.type_endpoints.values():
        declared.add(src)
        declared.add(tgt)
    if entity_type not in declared:
        raise DataError(f"unknown entity type {entity_type!r}")
    ns, nt = _pair_neighbor_sets(view, s, t)
    ns = frozenset(u for u in ns if u.entity_type == entity_type)
    nt = frozenset(u for u in nt if u.entity_type == entity_type)
    if not ns and not nt:
        return MISSING
    return _jaccard(ns, nt)
