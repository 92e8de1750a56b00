import numpy as np
import pytest

from wassdim.domain.errors import (
    InsufficientDataError,
    InvalidInputError,
    NonDecreasingDecayError,
)
from wassdim.domain.estimators import (
    make_split_plan,
    mle_estimate,
    ratio_estimate,
    slope_estimate,
)
from wassdim.domain.model import EstimateMethod, MetricKind, PointCloud, ScaleSeries
from wassdim.domain.synth import sample_ball

SCALES = [5, 6, 7, 8, 9, 10]


def power_law(d, constant=1.7, scales=SCALES):
    return [constant * (2.0**k) ** (-1.0 / d) for k in scales]


@pytest.mark.parametrize("d", [1.0, 2.5, 7.0])
def test_slope_estimate_recovers_exact_power_law(d):
    estimate = slope_estimate(ScaleSeries.from_values(SCALES, power_law(d)))
    assert estimate.d_hat == pytest.approx(d, abs=1e-10)
    assert estimate.method == EstimateMethod.REGRESSION
    assert estimate.rss < 1e-20
    assert len(estimate.residuals) == len(SCALES)


@pytest.mark.parametrize("d", [1.0, 2.5, 7.0])
def test_ratio_estimate_recovers_exact_power_law(d):
    w1_small, w1_large = power_law(d, scales=[6, 8])
    estimate = ratio_estimate(w1_small, w1_large, alpha=4, n_small=64)
    assert estimate.d_hat == pytest.approx(d, abs=1e-10)
    assert estimate.slope == pytest.approx(-1.0 / d, abs=1e-12)
    assert estimate.intercept == pytest.approx(np.log2(1.7), abs=1e-10)
    assert estimate.method == EstimateMethod.RATIO


def test_slope_estimate_is_invariant_under_global_scaling():
    values = [0.31, 0.22, 0.17, 0.11, 0.083, 0.06]
    base = slope_estimate(ScaleSeries.from_values(SCALES, values))
    scaled = slope_estimate(
        ScaleSeries.from_values(SCALES, [37.5 * value for value in values])
    )
    assert scaled.d_hat == pytest.approx(base.d_hat, abs=1e-12)
    np.testing.assert_allclose(scaled.residuals, base.residuals, atol=1e-12)


def test_slope_estimate_keeps_metric_and_series():
    series = ScaleSeries.from_values(SCALES, power_law(3.0))
    estimate = slope_estimate(series, MetricKind.GRAPH_GEODESIC)
    assert estimate.metric_kind == MetricKind.GRAPH_GEODESIC
    assert estimate.series is series


def test_slope_estimate_rejects_growth():
    with pytest.raises(NonDecreasingDecayError):
        slope_estimate(ScaleSeries.from_values([5, 6, 7], [0.1, 0.2, 0.4]))
    with pytest.raises(NonDecreasingDecayError):
        slope_estimate(ScaleSeries.from_values([5, 6], [0.3, 0.3]))


def test_ratio_estimate_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        ratio_estimate(0.2, 0.1, alpha=1)
    with pytest.raises(InvalidInputError):
        ratio_estimate(0.0, 0.1, alpha=2)
    with pytest.raises(NonDecreasingDecayError):
        ratio_estimate(0.1, 0.2, alpha=2)


def test_mle_hand_computed_on_three_points():
    cloud = PointCloud(np.array([[0.0], [1.0], [3.0]]))
    estimate = mle_estimate(cloud, k=2)
    expected = np.mean([1 / np.log(3.0), 1 / np.log(2.0), 1 / np.log(1.5)])
    assert estimate.d_hat == pytest.approx(expected, rel=1e-12)
    assert estimate.d_hat == pytest.approx(1.606, abs=1e-3)


def test_mle_on_unit_square():
    points = np.random.default_rng(0).random((2000, 2))
    estimate = mle_estimate(PointCloud(points), k=10)
    assert estimate.d_hat == pytest.approx(2.0, rel=0.15)
    assert estimate.method == EstimateMethod.MLE
    assert estimate.details["skipped_points"] == 0


def test_mle_on_five_ball():
    estimate = mle_estimate(sample_ball(5, 4000, 1.0, seed=0), k=10)
    assert estimate.d_hat == pytest.approx(5.0, rel=0.2)


def test_mle_is_invariant_under_rigid_motion():
    generator = np.random.default_rng(1)
    points = generator.random((500, 3))
    rotation, _ = np.linalg.qr(generator.standard_normal((3, 3)))
    moved = points @ rotation.T + [4.0, -2.0, 7.5]

    base = mle_estimate(PointCloud(points), k=8)
    other = mle_estimate(PointCloud(moved), k=8)
    assert other.d_hat == pytest.approx(base.d_hat, abs=1e-9)


def test_mle_skips_duplicate_points():
    points = np.random.default_rng(2).random((200, 2))
    points = np.vstack([points, points[:5]])
    estimate = mle_estimate(PointCloud(points), k=6)
    assert estimate.details["skipped_points"] == 10
    assert estimate.details["n_points"] == 205
    assert np.isfinite(estimate.d_hat)


def test_mle_rejects_bad_k():
    cloud = PointCloud(np.random.default_rng(3).random((10, 2)))
    with pytest.raises(InvalidInputError):
        mle_estimate(cloud, k=1)
    with pytest.raises(InvalidInputError):
        mle_estimate(cloud, k=10)


def test_split_plan_draws_disjoint_pairs():
    plan = make_split_plan(1000, [7, 5, 6], seed=3)
    assert plan.scales == [5, 6, 7]
    for k, (first, second) in plan.pairs.items():
        assert first.size == second.size == 2**k
        assert np.intersect1d(first, second).size == 0
        assert first.max() < 1000 and second.max() < 1000
    assert plan.quadruple is None


def test_split_plan_is_deterministic():
    a = make_split_plan(500, [5, 6], seed=11)
    b = make_split_plan(500, [5, 6], seed=11)
    c = make_split_plan(500, [5, 6], seed=12)
    for k in (5, 6):
        np.testing.assert_array_equal(a.pairs[k][0], b.pairs[k][0])
    assert not np.array_equal(a.pairs[5][0], c.pairs[5][0])


def test_split_plan_quadruple():
    plan = make_split_plan(1000, [6, 8], alpha=4, seed=0)
    sizes = [idx.size for idx in plan.quadruple]
    assert sizes == [64, 64, 256, 256]
    union = np.concatenate(plan.quadruple)
    assert np.unique(union).size == union.size
    assert plan.alpha == 4


def test_split_plan_needs_enough_points():
    with pytest.raises(InsufficientDataError):
        make_split_plan(100, [6])
    with pytest.raises(InsufficientDataError):
        make_split_plan(300, [7], alpha=2)


def test_split_plan_rejects_bad_alpha_and_scales():
    with pytest.raises(InvalidInputError):
        make_split_plan(1000, [6], alpha=3)
    with pytest.raises(InvalidInputError):
        make_split_plan(1000, [0, 5])
    with pytest.raises(InvalidInputError):
        make_split_plan(1000, [])


def test_slope_estimate_matches_normal_equations():
    generator = np.random.default_rng(4)
    for _ in range(20):
        scales = sorted(generator.choice(np.arange(3, 15), size=5, replace=False).tolist())
        values = np.sort(generator.uniform(0.01, 1.0, size=5))[::-1]
        estimate = slope_estimate(ScaleSeries.from_values(scales, values.tolist()))

        design = np.column_stack([np.ones(5), np.asarray(scales, dtype=float)])
        intercept, slope = np.linalg.solve(design.T @ design, design.T @ np.log2(values))
        assert estimate.slope == pytest.approx(slope, abs=1e-10)
        assert estimate.intercept == pytest.approx(intercept, abs=1e-10)


def test_slope_estimate_two_point_and_line_examples():
    two = slope_estimate(ScaleSeries.from_values([5, 6], [1.0, 2.0**-0.25]))
    assert two.slope == pytest.approx(-0.25, abs=1e-12)
    assert two.d_hat == pytest.approx(4.0, abs=1e-12)

    line = slope_estimate(
        ScaleSeries.from_values(SCALES, [2.0 ** (3 - k / 3) for k in SCALES])
    )
    assert line.d_hat == pytest.approx(3.0, abs=1e-10)
    np.testing.assert_allclose(line.residuals, 0.0, atol=1e-12)


def test_slope_estimate_ignores_a_common_size_factor():
    values = [0.31, 0.22, 0.17, 0.11, 0.083, 0.06]
    base = slope_estimate(ScaleSeries.from_values(SCALES, values))
    shifted = slope_estimate(ScaleSeries.from_values([k + 3 for k in SCALES], values))
    assert shifted.d_hat == pytest.approx(base.d_hat, abs=1e-12)
    np.testing.assert_allclose(shifted.residuals, base.residuals, atol=1e-12)


@pytest.mark.parametrize(
    "w1_small,w1_large",
    [(1.0, 2.0**-0.5), (0.5, 0.25), (0.37, 0.29)],
)
def test_ratio_estimate_equals_two_scale_regression(w1_small, w1_large):
    ratio = ratio_estimate(w1_small, w1_large, alpha=4, n_small=2**6)
    regression = slope_estimate(ScaleSeries.from_values([6, 8], [w1_small, w1_large]))
    assert ratio.d_hat == pytest.approx(regression.d_hat, rel=1e-12)
    assert ratio.slope == pytest.approx(regression.slope, rel=1e-12)


def test_ratio_estimate_examples():
    assert ratio_estimate(1.0, 2.0**-0.5, alpha=2).d_hat == pytest.approx(2.0)
    assert ratio_estimate(0.5, 0.25, alpha=4).d_hat == pytest.approx(2.0)
    with pytest.raises(NonDecreasingDecayError):
        ratio_estimate(0.3, 0.3, alpha=2)
