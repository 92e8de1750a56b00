"""
Neighbor graphs and the graph-geodesic metric.

Shortest-path distances on a kNN or epsilon graph with Euclidean edge weights
approximate the geodesic distance of the manifold the points were sampled
from. Points off the graph are attached to their nearest vertex.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial.distance import cdist, pdist, squareform

from wassdim.domain.errors import InvalidInputError
from wassdim.domain.model import (
    DistanceMatrix,
    GraphConstruction,
    MetricKind,
    NeighborGraph,
    PointCloud,
)

logger = logging.getLogger(__name__)


def default_knn(n: int) -> int:
    """Default neighbor count max(10, ceil(2 log2 n)), capped at n - 1."""
    if n < 2:
        return 1
    return min(max(10, math.ceil(2 * math.log2(n))), n - 1)


def _pairwise(cloud: PointCloud) -> np.ndarray:
    if cloud.n == 0:
        raise InvalidInputError("Cannot compute distances on an empty cloud")
    return squareform(pdist(cloud.points, metric="euclidean"))


def pairwise_euclidean(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean distance matrix of a cloud."""
    return DistanceMatrix(_pairwise(cloud), metric_kind=MetricKind.EUCLIDEAN)


def _knn_graph(distances: np.ndarray, k: int, escalate: bool) -> NeighborGraph:
    n = distances.shape[0]
    masked = distances.copy()
    np.fill_diagonal(masked, np.inf)
    # A stable sort keeps the lower index first among equal distances.
    neighbors = np.argsort(masked, axis=1, kind="stable")[:, :k]

    sources = np.repeat(np.arange(n), k)
    targets = neighbors.ravel()
    pairs = np.unique(
        np.column_stack([np.minimum(sources, targets), np.maximum(sources, targets)]),
        axis=0,
    )
    return NeighborGraph(
        n=n,
        rows=pairs[:, 0],
        cols=pairs[:, 1],
        weights=distances[pairs[:, 0], pairs[:, 1]],
        construction=GraphConstruction(kind=GraphConstruction.KNN, k=k, escalate=escalate),
    )


def build_knn_graph(cloud: PointCloud, k: int) -> NeighborGraph:
    """Join every point to its k nearest neighbors.

    An edge is kept when either endpoint selects the other, so every vertex
    ends up with degree at least k. Ties in distance go to the lower index.

    Args:
        cloud: Vertices of the graph
        k: Neighbors per vertex, 1 <= k < n

    Returns:
        Symmetrized kNN graph with Euclidean edge weights
    """
    if not 1 <= k < cloud.n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n = {cloud.n}, got {k}")
    return _knn_graph(_pairwise(cloud), k, escalate=False)


def _eps_graph(distances: np.ndarray, eps: float) -> NeighborGraph:
    rows, cols = np.nonzero(np.triu(distances <= eps, k=1))
    return NeighborGraph(
        n=distances.shape[0],
        rows=rows,
        cols=cols,
        weights=distances[rows, cols],
        construction=GraphConstruction(kind=GraphConstruction.EPS, eps=eps),
    )


def build_eps_graph(cloud: PointCloud, eps: float) -> NeighborGraph:
    """Join every pair of points at Euclidean distance at most eps.

    The result may be disconnected or even edgeless.
    """
    if not eps > 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    return _eps_graph(_pairwise(cloud), eps)


def geodesic_matrix(graph: NeighborGraph, workers: int = 1) -> DistanceMatrix:
    """All-pairs shortest paths by one Dijkstra run per source.

    Sources are split into contiguous blocks; with workers > 1 the blocks run
    on a thread pool, each writing its own rows of the output.

    Args:
        graph: Weighted undirected graph
        workers: Number of threads for the per-source runs

    Returns:
        Geodesic distance matrix; unreachable pairs are +inf and set the
        disconnected flag
    """
    adjacency = graph.to_csr()
    if workers <= 1 or graph.n < 2 * workers:
        values = dijkstra(adjacency, directed=False)
    else:
        values = np.empty((graph.n, graph.n))
        blocks = np.array_split(np.arange(graph.n), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                lambda block: dijkstra(adjacency, directed=False, indices=block),
                blocks,
            )
            for block, rows in zip(blocks, results):
                values[block] = rows

    # Paths summed from opposite ends can differ in the last bit.
    values = np.minimum(values, values.T)
    disconnected = bool(not np.all(np.isfinite(values)))
    if disconnected:
        logger.warning(
            f"Graph {graph.construction.describe()} on {graph.n} vertices is "
            f"disconnected; unreachable pairs are +inf"
        )
    return DistanceMatrix(
        values,
        metric_kind=MetricKind.GRAPH_GEODESIC,
        disconnected=disconnected,
        construction=graph.construction,
    )


def extend_to_points(
    graph_metric: DistanceMatrix,
    anchors: PointCloud,
    queries: PointCloud,
    targets: Optional[PointCloud] = None,
) -> np.ndarray:
    """Extend a graph metric to points that are not vertices.

    Each point p is projected onto its Euclidean nearest anchor pi(p) (lowest
    index on ties) and d(p, q) = |p - pi(p)| + d_G(pi(p), pi(q)) + |q - pi(q)|.

    Args:
        graph_metric: Geodesic matrix over the anchors
        anchors: Vertices of the graph
        queries: Points to measure from
        targets: Points to measure to; defaults to the queries

    Returns:
        Array of shape (queries.n, targets.n). Without targets the matrix is
        square with a zero diagonal.
    """
    if anchors.n == 0:
        raise InvalidInputError("Cannot extend a graph metric over an empty anchor set")
    if graph_metric.n != anchors.n:
        raise InvalidInputError(
            f"Graph metric covers {graph_metric.n} points but {anchors.n} anchors given"
        )

    def project(cloud: PointCloud):
        offsets = cdist(cloud.points, anchors.points)
        nearest = np.argmin(offsets, axis=1)
        return nearest, offsets[np.arange(cloud.n), nearest]

    query_anchor, query_offset = project(queries)
    if targets is None:
        target_anchor, target_offset = query_anchor, query_offset
    else:
        target_anchor, target_offset = project(targets)

    extended = (
        query_offset[:, None]
        + graph_metric.values[np.ix_(query_anchor, target_anchor)]
        + target_offset[None, :]
    )
    if targets is None:
        np.fill_diagonal(extended, 0.0)
    return extended


def pooled_metric(
    all_points: PointCloud,
    construction: GraphConstruction,
    workers: int = 1,
) -> DistanceMatrix:
    """Geodesic matrix over the pool of every subsample.

    For kNN construction with escalation enabled, k doubles (capped at n - 1)
    until the graph is connected; the final k is recorded on the returned
    matrix. Epsilon graphs are never altered and report disconnection through
    the flag.

    Args:
        all_points: Union of every subsample drawn for an estimate
        construction: Graph rule
        workers: Threads for the shortest-path runs

    Returns:
        Geodesic matrix over the pool
    """
    n = all_points.n
    distances = _pairwise(all_points)
    if n == 1:
        return DistanceMatrix(
            distances, metric_kind=MetricKind.GRAPH_GEODESIC, construction=construction
        )

    if construction.kind == GraphConstruction.EPS:
        graph = _eps_graph(distances, construction.eps)
        return geodesic_matrix(graph, workers=workers)

    k = min(construction.k or default_knn(n), n - 1)
    while True:
        graph = _knn_graph(distances, k, escalate=construction.escalate)
        n_components, _ = connected_components(graph.to_csr(), directed=False)
        if n_components == 1 or not construction.escalate or k >= n - 1:
            break
        escalated = min(2 * k, n - 1)
        logger.info(
            f"kNN graph on {n} points has {n_components} components at k={k}; "
            f"escalating to k={escalated}"
        )
        k = escalated

    logger.debug(f"Pooled graph: {n} vertices, {graph.n_edges} edges, k={k}")
    return geodesic_matrix(graph, workers=workers)
