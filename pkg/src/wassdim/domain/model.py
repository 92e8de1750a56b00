"""
Domain models for wassdim.

This module defines the value objects passed between the generators, the
graph-metric builders, the transport solvers and the estimators. Arrays held by
these objects are copied on construction and marked read-only, so a value can
be shared between worker threads without locking.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from wassdim.domain.errors import InvalidInputError


def _frozen_array(values: Any, dtype: Any = np.float64) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    GRAPH_GEODESIC = "graph_geodesic"


class TransportMethod(str, Enum):
    EXACT_ASSIGNMENT = "exact_assignment"
    SINKHORN = "sinkhorn"


class EstimateMethod(str, Enum):
    RATIO = "ratio"
    REGRESSION = "regression"
    MLE = "mle"


@dataclass(frozen=True)
class PointCloud:
    """A sample of n points in ambient dimension D, one point per row.

    Attributes:
        points: Read-only array of shape (n, D)
    """

    points: np.ndarray

    def __post_init__(self):
        points = _frozen_array(self.points)
        if points.ndim != 2:
            raise InvalidInputError(
                f"Point cloud must be two-dimensional, got shape {points.shape}"
            )
        if points.shape[1] < 1:
            raise InvalidInputError("Point cloud must have ambient dimension D >= 1")
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("Point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def subset(self, indices: np.ndarray) -> "PointCloud":
        """Return the rows at the given indices, in the given order."""
        return PointCloud(self.points[np.asarray(indices, dtype=np.intp)])

    @classmethod
    def concatenate(cls, clouds: List["PointCloud"]) -> "PointCloud":
        """Stack several clouds of equal ambient dimension."""
        dims = {cloud.dim for cloud in clouds}
        if len(dims) != 1:
            raise InvalidInputError(f"Cannot stack clouds with dimensions {dims}")
        return cls(np.vstack([cloud.points for cloud in clouds]))


@dataclass(frozen=True)
class EmbeddingSpec:
    """Parameters of a polynomial embedding of S^d into R^D.

    Attributes:
        source_dim: Intrinsic dimension d of the sphere being embedded
        target_dim: Ambient dimension D of the output
        degree: Highest total degree of the monomial features
        seed: Seed for the random coefficient matrix
    """

    source_dim: int
    target_dim: int
    degree: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.source_dim < 1:
            raise InvalidInputError(f"source_dim must be >= 1, got {self.source_dim}")
        if self.target_dim < self.source_dim + 1:
            raise InvalidInputError(
                f"target_dim must be >= source_dim + 1 = {self.source_dim + 1}, "
                f"got {self.target_dim}"
            )
        if self.degree < 1:
            raise InvalidInputError(f"degree must be >= 1, got {self.degree}")


@dataclass(frozen=True)
class LabeledCloud:
    """A point cloud with one integer label per row (MNIST digits).

    Attributes:
        cloud: Pixel intensities scaled to [0, 1]
        labels: Read-only integer array with one entry per row of the cloud
    """

    cloud: PointCloud
    labels: np.ndarray

    def __post_init__(self):
        labels = _frozen_array(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] != self.cloud.n:
            raise InvalidInputError(
                f"Expected {self.cloud.n} labels, got array of shape {labels.shape}"
            )
        points = self.cloud.points
        if points.size and (points.min() < 0.0 or points.max() > 1.0):
            raise InvalidInputError("Labeled cloud coordinates must lie in [0, 1]")
        object.__setattr__(self, "labels", labels)

    def filter_by_digit(self, digit: int) -> PointCloud:
        return filter_by_digit(self, digit)


def filter_by_digit(data: LabeledCloud, digit: int) -> PointCloud:
    """Select the rows labeled with a digit, keeping their original order.

    Args:
        data: Labeled source cloud
        digit: Label to keep, between 0 and 9

    Returns:
        The matching rows; empty when the digit does not occur

    Raises:
        InvalidInputError: If the digit is outside 0..9
    """
    if not 0 <= digit <= 9:
        raise InvalidInputError(f"digit must be in 0..9, got {digit}")
    mask = data.labels == digit
    return PointCloud(data.cloud.points[mask].reshape(-1, data.cloud.dim))


@dataclass(frozen=True)
class GraphConstruction:
    """How a neighbor graph connects its vertices.

    Attributes:
        kind: "knn" to join each point to its k nearest neighbors, "eps" to join
            every pair closer than eps
        k: Neighbor count for kNN graphs; None selects the size-dependent default
        eps: Radius for epsilon graphs
        escalate: Double k until the kNN graph is connected
    """

    KNN = "knn"
    EPS = "eps"

    kind: str = KNN
    k: Optional[int] = None
    eps: Optional[float] = None
    escalate: bool = True

    def __post_init__(self):
        if self.kind not in (self.KNN, self.EPS):
            raise InvalidInputError(
                f"Unsupported graph construction: {self.kind}. "
                f"Supported constructions are: {self.KNN}, {self.EPS}"
            )
        if self.kind == self.EPS and (self.eps is None or self.eps <= 0):
            raise InvalidInputError("eps graphs need a positive eps")
        if self.kind == self.KNN and self.k is not None and self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")

    def describe(self) -> str:
        if self.kind == self.EPS:
            return f"eps({self.eps})"
        return f"knn({self.k if self.k is not None else 'auto'})"


@dataclass(frozen=True)
class NeighborGraph:
    """Weighted undirected graph over sample indices.

    Each undirected edge is stored once with rows[e] < cols[e]; weights are the
    Euclidean distances between the endpoints.

    Attributes:
        n: Number of vertices
        rows: Lower endpoint of each edge
        cols: Upper endpoint of each edge
        weights: Euclidean length of each edge
        construction: The rule that produced the edges, with k resolved
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    construction: GraphConstruction

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen_array(self.rows, dtype=np.intp))
        object.__setattr__(self, "cols", _frozen_array(self.cols, dtype=np.intp))
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        if not (self.rows.shape == self.cols.shape == self.weights.shape):
            raise InvalidInputError("Edge arrays must have equal length")

    @property
    def n_edges(self) -> int:
        return int(self.weights.shape[0])

    @property
    def edges(self) -> List[Tuple[int, int, float]]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.rows, self.cols, self.weights)
        ]

    def degrees(self) -> np.ndarray:
        return np.bincount(
            np.concatenate([self.rows, self.cols]), minlength=self.n
        ).astype(np.int64)

    def to_csr(self) -> csr_matrix:
        """Upper-triangular sparse adjacency; use with directed=False.

        Coincident points give zero-length edges, which sparse graph routines
        would read as missing, so weights are floored at the smallest normal
        float.
        """
        weights = np.maximum(self.weights, np.finfo(np.float64).tiny)
        return csr_matrix((weights, (self.rows, self.cols)), shape=(self.n, self.n))


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric n x n matrix of pairwise distances.

    Attributes:
        values: Read-only distances; +inf marks unreachable pairs
        metric_kind: Euclidean chords or graph-geodesic path lengths
        disconnected: True when some pair is unreachable
        construction: Graph rule behind a geodesic matrix, with the final k
    """

    values: np.ndarray
    metric_kind: MetricKind
    disconnected: bool = False
    construction: Optional[GraphConstruction] = None

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InvalidInputError(
                f"Distance matrix must be square, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def to_csv(self, path: Path) -> Path:
        """Write the full symmetric matrix row by row."""
        path = Path(path)
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")
        return path


@dataclass(frozen=True)
class CostMatrix:
    """Ground costs between a source and a target sample.

    Attributes:
        values: Read-only array of shape (source_size, target_size)
    """

    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 2 or 0 in values.shape:
            raise InvalidInputError(
                f"Cost matrix must be a non-empty 2-D array, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("Cost matrix contains non-finite entries")
        if np.any(values < 0):
            raise InvalidInputError("Cost matrix contains negative entries")
        object.__setattr__(self, "values", values)

    @property
    def source_size(self) -> int:
        return int(self.values.shape[0])

    @property
    def target_size(self) -> int:
        return int(self.values.shape[1])

    @property
    def is_square(self) -> bool:
        return self.source_size == self.target_size


@dataclass(frozen=True)
class TransportResult:
    """A Wasserstein-1 value together with how it was obtained.

    Attributes:
        w1: Transport cost of the returned coupling
        method: Solver that produced the value
        reg: Entropic regularization (Sinkhorn only)
        iterations_run: Number of solver iterations
        converged: Whether the solver met its stopping rule
        marginal_error: Largest deviation of the coupling marginals from uniform
        trace: (iteration, transport cost) checkpoints recorded by the solver
    """

    w1: float
    method: TransportMethod
    reg: Optional[float] = None
    iterations_run: int = 0
    converged: bool = True
    marginal_error: float = 0.0
    trace: Tuple[Tuple[int, float], ...] = ()

    def __post_init__(self):
        if not self.w1 >= 0:
            raise InvalidInputError(f"w1 must be nonnegative, got {self.w1}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w1": self.w1,
            "method": self.method.value,
            "reg": self.reg,
            "iterations_run": self.iterations_run,
            "converged": self.converged,
            "marginal_error": self.marginal_error,
        }


@dataclass(frozen=True)
class ScaleEntry:
    """One point of a log-log series: W1 between two samples of size 2^k.

    Attributes:
        k: Scale exponent
        w1: Distance at this scale; the geometric mean when repeated
        transport: Solver metadata of the first repetition
        repetitions: Individual W1 values behind w1
    """

    k: int
    w1: float
    transport: Optional[TransportResult] = None
    repetitions: Tuple[float, ...] = ()

    @property
    def n(self) -> int:
        return 2**self.k


@dataclass(frozen=True)
class ScaleSeries:
    """Multi-scale W1 measurements, sorted by scale."""

    entries: Tuple[ScaleEntry, ...]

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=lambda entry: entry.k))
        scales = [entry.k for entry in entries]
        if len(set(scales)) < 2:
            raise InvalidInputError(
                f"A series needs at least two distinct scales, got {scales}"
            )
        if len(set(scales)) != len(scales):
            raise InvalidInputError(f"Duplicate scales in series: {scales}")
        bad = [entry.k for entry in entries if not entry.w1 > 0]
        if bad:
            raise InvalidInputError(f"W1 must be positive, offending scales: {bad}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_values(
        cls, scales: List[int], w1_values: List[float]
    ) -> "ScaleSeries":
        return cls(tuple(ScaleEntry(k=k, w1=w1) for k, w1 in zip(scales, w1_values)))

    @property
    def scales(self) -> List[int]:
        return [entry.k for entry in self.entries]

    @property
    def log2_n(self) -> np.ndarray:
        return np.array([float(entry.k) for entry in self.entries])

    @property
    def log2_w1(self) -> np.ndarray:
        return np.log2([entry.w1 for entry in self.entries])


@dataclass(frozen=True)
class DimensionEstimate:
    """An intrinsic dimension estimate and the fit behind it.

    Attributes:
        d_hat: Estimated dimension
        slope: Slope of log2 W1 against log2 n (-1/d_hat for every method)
        intercept: Intercept of the fitted line
        residuals: Observed minus fitted log2 W1, per scale
        metric_kind: Ground metric the distances were computed under
        method: Estimator that produced the value
        series: The measurements behind a ratio or regression estimate
        details: Method-specific metadata (MLE k, skipped points, final graph k)
    """

    d_hat: float
    slope: float
    intercept: float
    residuals: Tuple[float, ...]
    metric_kind: MetricKind
    method: EstimateMethod
    series: Optional[ScaleSeries] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def rss(self) -> float:
        return float(np.sum(np.square(self.residuals)))

    def to_dict(self) -> Dict[str, Any]:
        """Convert the estimate to a JSON-ready dictionary, scales ascending."""
        result = {
            "d_hat": self.d_hat,
            "slope": self.slope,
            "intercept": self.intercept,
            "residuals": list(self.residuals),
            "metric_kind": self.metric_kind.value,
            "method": self.method.value,
            "details": dict(self.details),
        }
        if self.series is not None:
            result["series"] = [
                {
                    "k": entry.k,
                    "n": entry.n,
                    "w1": entry.w1,
                    "repetitions": list(entry.repetitions),
                    "transport": (
                        entry.transport.to_dict() if entry.transport else None
                    ),
                }
                for entry in self.series.entries
            ]
        return result


@dataclass(frozen=True)
class SplitPlan:
    """Disjoint subsample indices drawn from a source cloud.

    Attributes:
        seed: Seed the plan was drawn with
        pairs: For each scale k, two disjoint index arrays of size 2^k
        quadruple: Four mutually disjoint index arrays (P_n, P_n', P_an, P_an')
            for the two-sample ratio estimate, when alpha was given
        alpha: Size ratio between the large and small samples of the quadruple
    """

    seed: int
    pairs: Dict[int, Tuple[np.ndarray, np.ndarray]]
    quadruple: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = None
    alpha: Optional[int] = None

    @property
    def scales(self) -> List[int]:
        return sorted(self.pairs)

    def all_indices(self) -> np.ndarray:
        """Sorted union of every index the plan touches."""
        chunks = [idx for pair in self.pairs.values() for idx in pair]
        if self.quadruple is not None:
            chunks.extend(self.quadruple)
        return np.unique(np.concatenate(chunks))


@dataclass(frozen=True)
class EstimatePair:
    """Estimates of one sample under the Euclidean and graph-geodesic metrics.

    Either side is None when its metric was not requested.
    """

    euclidean: Optional[DimensionEstimate] = None
    graph_geodesic: Optional[DimensionEstimate] = None

    def get(self, metric_kind: MetricKind) -> Optional[DimensionEstimate]:
        if metric_kind == MetricKind.EUCLIDEAN:
            return self.euclidean
        return self.graph_geodesic

    def primary(self) -> Optional[DimensionEstimate]:
        """The geodesic estimate when present, else the Euclidean one."""
        return self.graph_geodesic or self.euclidean
