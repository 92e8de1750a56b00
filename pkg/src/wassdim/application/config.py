"""
Experiment configuration.

ExperimentConfig is the validated, fully resolved description of one CLI run;
it is what a manifest stores and what a rerun reads back. EstimationConfig is
the narrower view one dimension estimate needs.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wassdim.domain.model import GraphConstruction, MetricKind

EXPERIMENTS = ("sphere_sweep", "ambient_sweep", "swiss_roll", "mnist", "fig1_residuals")

DEFAULT_SCALES = [5, 6, 7, 8, 9, 10]
MNIST_DEFAULT_SCALES = [5, 6, 7, 8, 9]
MNIST_EXPERIMENTS = ("mnist", "fig1_residuals")


@dataclass(frozen=True)
class EstimationConfig:
    """Settings of a single multi-scale dimension estimate.

    Attributes:
        scales: Scale exponents k; samples have size 2^k
        seed: Seed for the split plan or the fresh draws
        metrics: Ground metrics to estimate under
        construction: Neighbor-graph rule for the geodesic metric
        repetitions: Independent plans averaged in log space per scale
        alpha: Size ratio of the two-sample ratio estimate
        workers: Threads for the shortest-path runs
    """

    scales: Tuple[int, ...]
    seed: int = 0
    metrics: Tuple[MetricKind, ...] = (MetricKind.EUCLIDEAN, MetricKind.GRAPH_GEODESIC)
    construction: GraphConstruction = GraphConstruction()
    repetitions: int = 1
    alpha: Optional[int] = None
    workers: int = 1


class SinkhornSetting(BaseModel):
    model_config = ConfigDict(extra="forbid")

    reg: float = Field(gt=0)
    iters: int = Field(ge=1)


class ExperimentConfig(BaseModel):
    """Validated configuration of one experiment run.

    Fields left as None are resolved from the experiment by the model
    validator, so a resolved config always carries concrete values.
    """

    model_config = ConfigDict(extra="forbid")

    experiment: Literal[
        "sphere_sweep", "ambient_sweep", "swiss_roll", "mnist", "fig1_residuals"
    ] = "sphere_sweep"
    scales: Optional[List[int]] = None
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4])
    repetitions: int = Field(default=1, ge=1)
    alpha: Optional[int] = Field(default=None, ge=2)

    # Transport
    ot: Optional[Literal["exact", "sinkhorn"]] = None
    reg: float = Field(default=0.1, gt=0)
    iters: int = Field(default=10000, ge=1)
    tol: float = Field(default=1e-9, gt=0)

    # Metric
    metric: Literal["euclid", "graph", "both"] = "both"
    knn: Optional[int] = Field(default=None, ge=1)
    eps: Optional[float] = Field(default=None, gt=0)
    escalate_knn: bool = True

    # Synthetic data
    sampling: Literal["fresh", "subsample"] = "fresh"
    degree: int = Field(default=3, ge=1)
    embedding_seed: int = 0
    ambient: int = Field(default=20, ge=2)
    intrinsic_dims: List[int] = Field(default_factory=lambda: [2, 4, 8])
    ambient_dims: List[int] = Field(default_factory=lambda: [20, 50, 100])
    ambient_intrinsic_dim: int = Field(default=4, ge=1)
    swiss_roll_n: int = Field(default=4096, ge=2)
    mle_k: int = Field(default=10, ge=2)
    mle_n: int = Field(default=2048, ge=3)

    # MNIST
    mnist_dir: Optional[Path] = None
    mnist_split: Literal["train", "test"] = "train"
    digits: List[int] = Field(default_factory=lambda: list(range(10)))
    fig1_digit: int = Field(default=7, ge=0, le=9)
    mnist_per_digit: Optional[int] = Field(default=None, ge=2)
    mnist_regs: List[SinkhornSetting] = Field(
        default_factory=lambda: [
            SinkhornSetting(reg=0.1, iters=10000),
            SinkhornSetting(reg=0.05, iters=30000),
        ]
    )

    # Execution
    threads: Optional[int] = Field(default=None, ge=1)
    out: Path = Path("results")

    @field_validator("scales")
    @classmethod
    def _scales_increasing(cls, scales: Optional[List[int]]) -> Optional[List[int]]:
        if scales is None:
            return scales
        if not scales:
            raise ValueError("scales must not be empty")
        if any(k < 1 for k in scales):
            raise ValueError(f"scales must be >= 1, got {scales}")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError(f"scales must be strictly increasing, got {scales}")
        return scales

    @field_validator("seeds")
    @classmethod
    def _seeds_nonempty(cls, seeds: List[int]) -> List[int]:
        if not seeds:
            raise ValueError("seeds must not be empty")
        return seeds

    @field_validator("digits")
    @classmethod
    def _digits_in_range(cls, digits: List[int]) -> List[int]:
        if not digits or any(not 0 <= digit <= 9 for digit in digits):
            raise ValueError(f"digits must be a nonempty subset of 0..9, got {digits}")
        return digits

    @field_validator("intrinsic_dims", "ambient_dims")
    @classmethod
    def _dims_positive(cls, dims: List[int]) -> List[int]:
        if not dims or any(dim < 1 for dim in dims):
            raise ValueError("dimensions must be a nonempty list of positive ints")
        return dims

    @model_validator(mode="after")
    def _resolve_defaults(self) -> "ExperimentConfig":
        on_mnist = self.experiment in MNIST_EXPERIMENTS
        if self.scales is None:
            self.scales = list(MNIST_DEFAULT_SCALES if on_mnist else DEFAULT_SCALES)
        if self.ot is None:
            self.ot = "sinkhorn" if on_mnist else "exact"
        needed = max(self.intrinsic_dims) + 1
        if self.experiment == "sphere_sweep" and self.ambient < needed:
            raise ValueError(f"ambient must be >= {needed} for the requested spheres")
        needed = self.ambient_intrinsic_dim + 1
        if self.experiment == "ambient_sweep" and min(self.ambient_dims) < needed:
            raise ValueError(
                f"ambient_dims must all be >= {self.ambient_intrinsic_dim + 1}"
            )
        return self

    def metric_kinds(self) -> Tuple[MetricKind, ...]:
        return {
            "euclid": (MetricKind.EUCLIDEAN,),
            "graph": (MetricKind.GRAPH_GEODESIC,),
            "both": (MetricKind.EUCLIDEAN, MetricKind.GRAPH_GEODESIC),
        }[self.metric]

    def graph_construction(self) -> GraphConstruction:
        if self.eps is not None:
            return GraphConstruction(kind=GraphConstruction.EPS, eps=self.eps)
        return GraphConstruction(
            kind=GraphConstruction.KNN, k=self.knn, escalate=self.escalate_knn
        )

    def estimation(
        self,
        seed: int,
        metrics: Optional[Tuple[MetricKind, ...]] = None,
        scales: Optional[List[int]] = None,
        workers: int = 1,
    ) -> EstimationConfig:
        return EstimationConfig(
            scales=tuple(scales or self.scales),
            seed=seed,
            metrics=metrics or self.metric_kinds(),
            construction=self.graph_construction(),
            repetitions=self.repetitions,
            alpha=self.alpha,
            workers=workers,
        )
