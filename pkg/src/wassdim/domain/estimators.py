"""
Intrinsic dimension estimators.

Two-sample empirical Wasserstein distances decay like n^(-1/d) on a
d-dimensional support, so the dimension is read off the slope of log W1
against log n. The Levina-Bickel maximum likelihood estimator is provided as
a baseline.
"""

import logging
import math
from typing import Iterable, Optional

import numpy as np
from scipy.stats import linregress
from sklearn.neighbors import NearestNeighbors

from wassdim.domain import rng
from wassdim.domain.errors import (
    InsufficientDataError,
    InvalidInputError,
    NonDecreasingDecayError,
)
from wassdim.domain.model import (
    DimensionEstimate,
    EstimateMethod,
    MetricKind,
    PointCloud,
    ScaleSeries,
    SplitPlan,
)

logger = logging.getLogger(__name__)


def ratio_estimate(
    w1_small: float,
    w1_large: float,
    alpha: float,
    metric_kind: MetricKind = MetricKind.EUCLIDEAN,
    n_small: int = 1,
) -> DimensionEstimate:
    """Two-sample estimate d = log(alpha) / (log W1(n) - log W1(alpha n)).

    Args:
        w1_small: Distance between the two samples of size n
        w1_large: Distance between the two samples of size alpha * n
        alpha: Size ratio, > 1
        metric_kind: Ground metric of both distances
        n_small: Size n of the small samples, only used for the intercept

    Raises:
        NonDecreasingDecayError: If w1_small <= w1_large
    """
    if not alpha > 1:
        raise InvalidInputError(f"alpha must be > 1, got {alpha}")
    if not (w1_small > 0 and w1_large > 0):
        raise InvalidInputError(
            f"Distances must be positive, got {w1_small} and {w1_large}"
        )
    drop = math.log2(w1_small) - math.log2(w1_large)
    if drop <= 0:
        raise NonDecreasingDecayError(
            f"W1 does not decrease from n to {alpha}n ({w1_small} -> {w1_large})"
        )
    log2_alpha = math.log2(alpha)
    slope = -drop / log2_alpha
    return DimensionEstimate(
        d_hat=log2_alpha / drop,
        slope=slope,
        intercept=math.log2(w1_small) - slope * math.log2(n_small),
        residuals=(0.0, 0.0),
        metric_kind=metric_kind,
        method=EstimateMethod.RATIO,
        details={"alpha": alpha},
    )


def slope_estimate(
    series: ScaleSeries, metric_kind: MetricKind = MetricKind.EUCLIDEAN
) -> DimensionEstimate:
    """Least-squares fit of log2 W1 on log2 n; the dimension is -1/slope.

    Args:
        series: At least two scales with positive distances
        metric_kind: Ground metric of the distances

    Returns:
        Estimate with the fitted line and per-scale residuals

    Raises:
        NonDecreasingDecayError: If the fitted slope is not negative
    """
    x = series.log2_n
    y = series.log2_w1
    fit = linregress(x, y)
    slope = float(fit.slope)
    intercept = float(fit.intercept)
    if slope >= 0:
        raise NonDecreasingDecayError(
            f"Fitted slope {slope:.4g} over scales {series.scales} shows no decay"
        )
    residuals = y - (intercept + slope * x)
    return DimensionEstimate(
        d_hat=-1.0 / slope,
        slope=slope,
        intercept=intercept,
        residuals=tuple(float(r) for r in residuals),
        metric_kind=metric_kind,
        method=EstimateMethod.REGRESSION,
        series=series,
    )


def mle_estimate(cloud: PointCloud, k: int) -> DimensionEstimate:
    """Levina-Bickel estimate averaged over the points of a cloud.

    Per point, m_k(x) = [ 1/(k-1) * sum_{j=1..k} log(T_k(x) / T_j(x)) ]^-1 with
    T_j the distance to the j-th nearest other point. Points with a zero
    neighbor distance (duplicates) or with all k distances equal are skipped.

    Args:
        cloud: Sample to estimate on
        k: Neighbor count, 2 <= k < n

    Raises:
        InvalidInputError: If k is out of range or every point is skipped
    """
    if not 2 <= k < cloud.n:
        raise InvalidInputError(f"k must satisfy 2 <= k < n = {cloud.n}, got {k}")

    neighbors = NearestNeighbors(n_neighbors=k).fit(cloud.points)
    distances, _ = neighbors.kneighbors()

    usable = distances[:, 0] > 0
    log_ratios = np.zeros_like(distances)
    log_ratios[usable] = np.log(distances[usable, -1:] / distances[usable])
    sums = log_ratios.sum(axis=1)
    usable &= sums > 0

    skipped = int(cloud.n - usable.sum())
    if not usable.any():
        raise InvalidInputError(
            "Every point has a duplicate or equidistant neighbors; MLE undefined"
        )
    if skipped:
        logger.warning(f"MLE skipped {skipped} of {cloud.n} points with k={k}")

    d_hat = float(np.mean((k - 1) / sums[usable]))
    return DimensionEstimate(
        d_hat=d_hat,
        slope=-1.0 / d_hat,
        intercept=0.0,
        residuals=(),
        metric_kind=MetricKind.EUCLIDEAN,
        method=EstimateMethod.MLE,
        details={"k": k, "skipped_points": skipped, "n_points": cloud.n},
    )


def make_split_plan(
    n_total: int,
    scales: Iterable[int],
    alpha: Optional[int] = None,
    seed: int = 0,
) -> SplitPlan:
    """Draw two disjoint subsamples of size 2^k per scale, without replacement.

    Each scale gets a fresh draw, so samples of different scales may overlap.
    With alpha, four mutually disjoint samples are also drawn: two of size
    2^max(scales) / alpha and two of size 2^max(scales).

    Args:
        n_total: Size of the source cloud
        scales: Scale exponents k >= 1
        alpha: Integer size ratio for the two-sample ratio estimate
        seed: Seed of the split stream

    Raises:
        InsufficientDataError: If a scale needs more than n_total points
    """
    scales = sorted(set(int(k) for k in scales))
    if not scales:
        raise InvalidInputError("At least one scale is required")
    if scales[0] < 1:
        raise InvalidInputError(f"Scales must be >= 1, got {scales}")

    largest = 2 ** scales[-1]
    if 2 * largest > n_total:
        raise InsufficientDataError(
            f"Scale k={scales[-1]} needs {2 * largest} points, only {n_total} available"
        )

    pairs = {}
    for k in scales:
        size = 2**k
        order = rng.stream(seed, rng.SPLIT, k).permutation(n_total)
        pairs[k] = (order[:size], order[size : 2 * size])

    quadruple = None
    if alpha is not None:
        if alpha < 2 or largest % alpha:
            raise InvalidInputError(
                f"alpha must be an integer >= 2 dividing {largest}, got {alpha}"
            )
        small = largest // alpha
        if 2 * (small + largest) > n_total:
            raise InsufficientDataError(
                f"Ratio split needs {2 * (small + largest)} points, "
                f"only {n_total} available"
            )
        order = rng.stream(seed, rng.SPLIT, 0).permutation(n_total)
        bounds = np.cumsum([0, small, small, largest, largest])
        quadruple = tuple(order[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:]))

    return SplitPlan(seed=seed, pairs=pairs, quadruple=quadruple, alpha=alpha)
