"""Ground-cost matrices for transport between subsamples."""

import numpy as np
from scipy.spatial.distance import cdist

from wassdim.domain.errors import InvalidInputError
from wassdim.domain.model import CostMatrix, DistanceMatrix, PointCloud


def cost_from_metric(
    dist: DistanceMatrix, idx_a: np.ndarray, idx_b: np.ndarray
) -> CostMatrix:
    """Slice a pooled distance matrix into the cost between two subsamples.

    Args:
        dist: Distances over the pool
        idx_a: Pool indices of the source sample
        idx_b: Pool indices of the target sample

    Returns:
        Cost with cost[r, c] = dist[idx_a[r], idx_b[c]]

    Raises:
        InvalidInputError: On an out-of-range index or an infinite distance
    """
    idx_a = np.asarray(idx_a, dtype=np.intp)
    idx_b = np.asarray(idx_b, dtype=np.intp)
    for name, idx in (("idx_a", idx_a), ("idx_b", idx_b)):
        if idx.size and (idx.min() < 0 or idx.max() >= dist.n):
            raise InvalidInputError(
                f"{name} has indices outside 0..{dist.n - 1}"
            )

    values = dist.values[np.ix_(idx_a, idx_b)]
    if not np.all(np.isfinite(values)):
        raise InvalidInputError(
            "Cost slice contains +inf distances; the pooled graph is disconnected"
        )
    return CostMatrix(values)


def euclidean_cost(source: PointCloud, target: PointCloud) -> CostMatrix:
    """Euclidean ground cost between two clouds."""
    return CostMatrix(cdist(source.points, target.points, metric="euclidean"))
