import numpy as np
import pytest
from scipy.spatial.distance import cdist

from wassdim.adapters.outbound.scipy import exact_w1
from wassdim.domain.errors import InvalidInputError
from wassdim.domain.metricgraph import pairwise_euclidean
from wassdim.domain.model import DistanceMatrix, MetricKind, PointCloud
from wassdim.domain.transport import cost_from_metric, euclidean_cost


@pytest.fixture
def distances():
    values = np.array(
        [
            [0.0, 1.0, 2.0, np.inf],
            [1.0, 0.0, 3.0, np.inf],
            [2.0, 3.0, 0.0, np.inf],
            [np.inf, np.inf, np.inf, 0.0],
        ]
    )
    return DistanceMatrix(values, metric_kind=MetricKind.GRAPH_GEODESIC, disconnected=True)


def test_cost_from_metric_slices_rows_and_columns(distances):
    cost = cost_from_metric(distances, np.array([2, 0]), np.array([1]))
    np.testing.assert_array_equal(cost.values, [[3.0], [1.0]])


def test_cost_from_metric_rejects_out_of_range(distances):
    with pytest.raises(InvalidInputError):
        cost_from_metric(distances, np.array([0]), np.array([4]))
    with pytest.raises(InvalidInputError):
        cost_from_metric(distances, np.array([-1]), np.array([0]))


def test_cost_from_metric_rejects_unreachable_pairs(distances):
    with pytest.raises(InvalidInputError, match="disconnected"):
        cost_from_metric(distances, np.array([0, 1]), np.array([2, 3]))


def test_euclidean_cost():
    generator = np.random.default_rng(0)
    source = PointCloud(generator.random((5, 3)))
    target = PointCloud(generator.random((7, 3)))
    cost = euclidean_cost(source, target)
    assert cost.values.shape == (5, 7)
    np.testing.assert_allclose(cost.values, cdist(source.points, target.points))


def test_sliced_metric_gives_the_same_w1_as_direct_euclidean_costs():
    generator = np.random.default_rng(1)
    cloud = PointCloud(generator.random((40, 3)))
    distances = pairwise_euclidean(cloud)
    for _ in range(10):
        order = generator.permutation(cloud.n)
        idx_a, idx_b = order[:8], order[8:16]
        sliced = exact_w1(cost_from_metric(distances, idx_a, idx_b)).w1
        direct = exact_w1(euclidean_cost(cloud.subset(idx_a), cloud.subset(idx_b))).w1
        assert sliced == pytest.approx(direct, abs=1e-12)


def test_cost_from_metric_full_range_and_singletons():
    cloud = PointCloud(np.random.default_rng(2).random((6, 2)))
    distances = pairwise_euclidean(cloud)
    full = np.arange(6)
    np.testing.assert_array_equal(cost_from_metric(distances, full, full).values, distances.values)
    single = cost_from_metric(distances, np.array([1]), np.array([4]))
    np.testing.assert_array_equal(single.values, [[distances.values[1, 4]]])
