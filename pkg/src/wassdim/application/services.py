"""
Application services for wassdim.

DimensionEstimationService turns a point cloud (or a seeded sampler) into
dimension estimates: it plans the subsamples, builds the pooled metrics, runs
the transport solver per scale and fits the log-log series.
ExperimentService runs whole experiments by fanning (parameter, seed) tasks
out to a bounded worker pool and handing the collected rows to a results
sink.
"""

import logging
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas
import pydantic
import scipy
import sklearn
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

import wassdim
from wassdim.application.config import EstimationConfig, ExperimentConfig
from wassdim.domain import rng
from wassdim.domain.errors import (
    EstimationError,
    GraphDisconnectedError,
    InsufficientDataError,
    InvalidInputError,
    WassdimError,
)
from wassdim.domain.estimators import (
    make_split_plan,
    mle_estimate,
    ratio_estimate,
    slope_estimate,
)
from wassdim.domain.metricgraph import pairwise_euclidean, pooled_metric
from wassdim.domain.model import (
    DimensionEstimate,
    DistanceMatrix,
    EmbeddingSpec,
    EstimatePair,
    MetricKind,
    PointCloud,
    ScaleEntry,
    ScaleSeries,
    TransportResult,
    filter_by_digit,
)
from wassdim.domain.synth import embedded_sphere, swiss_roll
from wassdim.domain.transport import cost_from_metric
from wassdim.ports.outbound.dataset_loader_port import DatasetLoaderPort
from wassdim.ports.outbound.results_sink_port import ResultsSinkPort
from wassdim.ports.outbound.transport_solver_port import TransportSolverPort

logger = logging.getLogger(__name__)

Sampler = Callable[[int, int], PointCloud]
SolverFactory = Callable[[str, float, int], TransportSolverPort]

IndexPairs = Dict[int, Tuple[np.ndarray, np.ndarray]]
Measurement = Tuple[Dict[MetricKind, Dict[int, TransportResult]], Optional[int]]

SERIES_COLUMNS = [
    "experiment",
    "group",
    "seed",
    "metric",
    "k",
    "n",
    "w1",
    "log2_n",
    "log2_w1",
    "fitted",
    "residual",
    "ot_method",
    "reg",
    "iterations",
    "converged",
    "marginal_error",
]

SPHERE_COLUMNS = [
    "d_true",
    "seed",
    "d_hat_w1_euclid",
    "d_hat_w1_graph",
    "d_hat_mle",
    "d_hat_ratio_euclid",
    "d_hat_ratio_graph",
    "status",
]
AMBIENT_COLUMNS = [
    "D",
    "seed",
    "d_hat",
    "d_hat_w1_euclid",
    "d_hat_w1_graph",
    "d_hat_mle",
    "spread",
    "status",
]
SWISS_ROLL_COLUMNS = [
    "seed",
    "n_total",
    "d_hat_w1_euclid",
    "d_hat_w1_graph",
    "d_hat_mle",
    "status",
]
MNIST_COLUMNS = [
    "digit",
    "reg",
    "iters",
    "n_digit",
    "k_max",
    "d_hat",
    "converged",
    "status",
]
FIG1_COLUMNS = [
    "seed",
    "metric",
    "n_digit",
    "k_max",
    "d_hat",
    "slope",
    "intercept",
    "rss",
    "status",
]

OK = "ok"


class DimensionEstimationService:
    """
    Multi-scale Wasserstein dimension estimation under both ground metrics.

    Attributes:
        transport_solver: Port computing W1 from a cost matrix
    """

    def __init__(self, transport_solver: TransportSolverPort):
        self.transport_solver = transport_solver

    def estimate_dimension(
        self, cloud: PointCloud, config: EstimationConfig
    ) -> EstimatePair:
        """
        Estimate the dimension of a fixed corpus by disjoint subsampling.

        Each repetition draws a split plan, pools every drawn point into one
        graph metric, computes W1 per scale under every requested metric and
        the per-scale values are averaged in log space before fitting.

        Args:
            cloud: Source corpus
            config: Scales, metrics, graph rule and seed

        Returns:
            Regression estimates per metric

        Raises:
            EstimationError: If a scale fails; the scale is named
        """
        measurements = []
        for repetition in range(config.repetitions):
            seed = (
                config.seed
                if repetition == 0
                else rng.derive_seed(config.seed, repetition)
            )
            plan = make_split_plan(cloud.n, config.scales, seed=seed)
            pool_indices = plan.all_indices()
            position = np.full(cloud.n, -1, dtype=np.intp)
            position[pool_indices] = np.arange(pool_indices.size)
            pairs = {
                k: (position[idx_a], position[idx_b])
                for k, (idx_a, idx_b) in plan.pairs.items()
            }
            measurements.append(
                self._measure(cloud.subset(pool_indices), pairs, config)
            )
        return self._fit(measurements, config)

    def estimate_dimension_fresh(
        self, sampler: Sampler, config: EstimationConfig
    ) -> EstimatePair:
        """
        Estimate the dimension of a distribution by drawing fresh samples.

        For every scale two new samples of size 2^k come from the sampler;
        the graph metric of a repetition is pooled over all of its draws.

        Args:
            sampler: Callable (n, seed) -> PointCloud of n points
            config: Scales, metrics, graph rule and seed
        """
        measurements = []
        for repetition in range(config.repetitions):
            clouds = []
            pairs: IndexPairs = {}
            offset = 0
            for k in config.scales:
                size = 2**k
                draw_seed = rng.derive_seed(config.seed, repetition, k)
                clouds.append(sampler(2 * size, draw_seed))
                pairs[k] = (
                    np.arange(offset, offset + size),
                    np.arange(offset + size, offset + 2 * size),
                )
                offset += 2 * size
            pool = PointCloud.concatenate(clouds)
            measurements.append(self._measure(pool, pairs, config))
        return self._fit(measurements, config)

    def estimate_ratio(
        self, cloud: PointCloud, config: EstimationConfig
    ) -> EstimatePair:
        """
        Two-sample ratio estimate from four disjoint samples.

        The samples P_n, P_n' and P_an, P_an' are drawn with a = config.alpha
        and a n = 2^max(scales); the graph metric is pooled over all four.
        """
        if config.alpha is None:
            raise InvalidInputError("The ratio estimate needs alpha")
        top = max(config.scales)
        plan = make_split_plan(cloud.n, [top], alpha=config.alpha, seed=config.seed)
        pool_indices = np.concatenate(plan.quadruple)
        small = plan.quadruple[0].size
        # alpha divides 2^top, so both sample sizes are powers of two.
        k_small = small.bit_length() - 1
        bounds = np.cumsum([0] + [idx.size for idx in plan.quadruple])
        pairs = {
            k: (
                np.arange(bounds[2 * index], bounds[2 * index + 1]),
                np.arange(bounds[2 * index + 1], bounds[2 * index + 2]),
            )
            for index, k in enumerate((k_small, top))
        }
        measurement, _ = self._measure(cloud.subset(pool_indices), pairs, config)

        estimates = {
            metric_kind: ratio_estimate(
                by_pair[k_small].w1,
                by_pair[top].w1,
                config.alpha,
                metric_kind=metric_kind,
                n_small=small,
            )
            for metric_kind, by_pair in measurement.items()
        }
        return EstimatePair(
            euclidean=estimates.get(MetricKind.EUCLIDEAN),
            graph_geodesic=estimates.get(MetricKind.GRAPH_GEODESIC),
        )

    def _pool_metrics(
        self, pool: PointCloud, config: EstimationConfig
    ) -> Dict[MetricKind, DistanceMatrix]:
        metrics = {}
        if MetricKind.EUCLIDEAN in config.metrics:
            metrics[MetricKind.EUCLIDEAN] = pairwise_euclidean(pool)
        if MetricKind.GRAPH_GEODESIC in config.metrics:
            geodesic = pooled_metric(pool, config.construction, workers=config.workers)
            if geodesic.disconnected:
                n_components, _ = connected_components(
                    csr_matrix(np.isfinite(geodesic.values)), directed=False
                )
                raise GraphDisconnectedError(
                    f"Pooled {geodesic.construction.describe()} graph over "
                    f"{pool.n} points has {n_components} components",
                    n_components=n_components,
                )
            metrics[MetricKind.GRAPH_GEODESIC] = geodesic
        return metrics

    def _measure(
        self, pool: PointCloud, pairs: IndexPairs, config: EstimationConfig
    ) -> Measurement:
        """W1 per metric and per pair of pool positions, plus the final graph k."""
        try:
            metrics = self._pool_metrics(pool, config)
        except WassdimError as e:
            raise EstimationError(f"pooled metric failed: {e}") from e

        results: Dict[MetricKind, Dict[int, TransportResult]] = {
            metric_kind: {} for metric_kind in metrics
        }
        for k in sorted(pairs):
            idx_a, idx_b = pairs[k]
            for metric_kind, distances in metrics.items():
                try:
                    cost = cost_from_metric(distances, idx_a, idx_b)
                    result = self.transport_solver.solve(cost)
                except WassdimError as e:
                    raise EstimationError(
                        f"{metric_kind.value} W1 failed: {e}", scale=k
                    ) from e
                results[metric_kind][k] = result
                logger.debug(f"k={k} {metric_kind.value}: W1={result.w1:.6g}")

        graph = metrics.get(MetricKind.GRAPH_GEODESIC)
        graph_k = graph.construction.k if graph is not None else None
        return results, graph_k

    def _fit(
        self,
        measurements: List[Measurement],
        config: EstimationConfig,
    ) -> EstimatePair:
        estimates: Dict[MetricKind, DimensionEstimate] = {}
        for metric_kind in config.metrics:
            entries = []
            for k in sorted(config.scales):
                runs = [results[metric_kind][k] for results, _ in measurements]
                values = tuple(run.w1 for run in runs)
                if min(values) <= 0:
                    raise EstimationError(
                        f"{metric_kind.value} W1 is zero; samples coincide", scale=k
                    )
                entries.append(
                    ScaleEntry(
                        k=k,
                        w1=float(2 ** np.mean(np.log2(values))),
                        transport=runs[0],
                        repetitions=values,
                    )
                )
            try:
                estimate = slope_estimate(ScaleSeries(tuple(entries)), metric_kind)
            except WassdimError as e:
                raise EstimationError(f"{metric_kind.value} fit failed: {e}") from e

            details = {"repetitions": config.repetitions, "seed": config.seed}
            if metric_kind == MetricKind.GRAPH_GEODESIC:
                details["graph"] = config.construction.kind
                details["graph_k"] = [graph_k for _, graph_k in measurements]
            estimates[metric_kind] = replace(estimate, details=details)

        return EstimatePair(
            euclidean=estimates.get(MetricKind.EUCLIDEAN),
            graph_geodesic=estimates.get(MetricKind.GRAPH_GEODESIC),
        )


def capped_scales(scales: Sequence[int], n_total: int) -> List[int]:
    """
    Drop the scales a corpus of n_total points cannot split into two samples.

    Raises:
        InsufficientDataError: If fewer than two scales remain
    """
    kept = [k for k in sorted(scales) if 2 * 2**k <= n_total]
    if len(kept) < 2:
        raise InsufficientDataError(
            f"{n_total} points allow scales {kept}, at least two are needed"
        )
    if len(kept) < len(scales):
        logger.warning(
            f"Capping scales at k={kept[-1]} for {n_total} points (requested {list(scales)})"
        )
    return kept


@dataclass
class ExperimentReport:
    """
    Collected output of one experiment run.

    Attributes:
        experiment: Experiment name
        columns: Column order of the results table
        results: One row per task, plus summary rows
        series: One row per (task, metric, scale)
        summary: Aggregates written to the manifest
        failures: Number of failed tasks
    """

    experiment: str
    columns: List[str]
    results: List[Dict[str, Any]] = field(default_factory=list)
    series: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    failures: int = 0

    @property
    def ok(self) -> bool:
        return self.failures == 0


@dataclass
class TaskOutcome:
    row: Dict[str, Any]
    series: List[Dict[str, Any]] = field(default_factory=list)


def _d_hat(estimate: Optional[DimensionEstimate]) -> Optional[float]:
    return estimate.d_hat if estimate is not None else None


def series_rows(
    experiment: str, group: str, seed: int, estimate: DimensionEstimate
) -> List[Dict[str, Any]]:
    """Flatten the log-log series behind an estimate into CSV rows."""
    rows = []
    for entry, residual in zip(estimate.series.entries, estimate.residuals):
        transport = entry.transport
        log2_w1 = float(np.log2(entry.w1))
        rows.append(
            {
                "experiment": experiment,
                "group": group,
                "seed": seed,
                "metric": estimate.metric_kind.value,
                "k": entry.k,
                "n": entry.n,
                "w1": entry.w1,
                "log2_n": float(entry.k),
                "log2_w1": log2_w1,
                "fitted": log2_w1 - residual,
                "residual": residual,
                "ot_method": transport.method.value if transport else None,
                "reg": transport.reg if transport else None,
                "iterations": transport.iterations_run if transport else None,
                "converged": transport.converged if transport else None,
                "marginal_error": transport.marginal_error if transport else None,
            }
        )
    return rows


def _pair_series(
    experiment: str, group: str, seed: int, pair: EstimatePair
) -> List[Dict[str, Any]]:
    rows = []
    for estimate in (pair.euclidean, pair.graph_geodesic):
        if estimate is not None:
            rows.extend(series_rows(experiment, group, seed, estimate))
    return rows


class ExperimentService:
    """
    Runs the desk-scale experiments and publishes their tables.

    Attributes:
        solver_factory: Builds a transport solver from (method, reg, iters)
        results_sink: Port receiving results, series and manifest
        dataset_loader: Port loading MNIST; only needed by MNIST experiments
        max_workers: Size of the task pool
    """

    def __init__(
        self,
        solver_factory: SolverFactory,
        results_sink: ResultsSinkPort,
        dataset_loader: Optional[DatasetLoaderPort] = None,
        max_workers: int = 1,
    ):
        self.solver_factory = solver_factory
        self.results_sink = results_sink
        self.dataset_loader = dataset_loader
        self.max_workers = max(1, max_workers)

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        """Run the configured experiment and publish its outputs."""
        runners = {
            "sphere_sweep": self.run_sphere_sweep,
            "ambient_sweep": self.run_ambient_sweep,
            "swiss_roll": self.run_swiss_roll,
            "mnist": self.run_mnist,
            "fig1_residuals": self.run_fig1,
        }
        logger.info(f"Starting experiment {config.experiment}")
        report = runners[config.experiment](config)
        self.publish(report, config)
        logger.info(
            f"Experiment {config.experiment} finished: {len(report.results)} rows, "
            f"{report.failures} failures"
        )
        return report

    def publish(self, report: ExperimentReport, config: ExperimentConfig) -> None:
        """Hand the report to the results sink, with a manifest."""
        self.results_sink.write_results(report.results, report.columns)
        self.results_sink.write_series(report.series, SERIES_COLUMNS)
        self.results_sink.write_manifest(self.manifest(report, config))

    def manifest(
        self, report: ExperimentReport, config: ExperimentConfig
    ) -> Dict[str, Any]:
        return {
            "wassdim_version": wassdim.__version__,
            "experiment": report.experiment,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "config": config.model_dump(mode="json"),
            "seeds": list(config.seeds),
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "scikit-learn": sklearn.__version__,
                "pandas": pandas.__version__,
                "pydantic": pydantic.__version__,
            },
            "summary": report.summary,
            "failures": report.failures,
        }

    def _estimation_service(
        self, config: ExperimentConfig, reg: Optional[float] = None, iters: Optional[int] = None
    ) -> DimensionEstimationService:
        solver = self.solver_factory(config.ot, reg or config.reg, iters or config.iters)
        return DimensionEstimationService(solver)

    def _graph_workers(self, n_tasks: int) -> int:
        """Threads left per task for the shortest-path runs."""
        return max(1, self.max_workers // max(1, n_tasks))

    def _fan_out(
        self,
        report: ExperimentReport,
        tasks: Sequence[Tuple[Dict[str, Any], Callable[[], TaskOutcome]]],
    ) -> None:
        """Run tasks on the worker pool; rows keep task order."""
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            futures = [(key, pool.submit(task)) for key, task in tasks]
            for key, future in futures:
                try:
                    outcome = future.result()
                except Exception as e:
                    logger.error(f"Task {key} failed: {e}", exc_info=True)
                    report.failures += 1
                    report.results.append({**key, "status": f"failed: {e}"})
                    continue
                report.results.append({**key, **outcome.row, "status": OK})
                report.series.extend(outcome.series)
                logger.info(f"Task {key} done")

    def _synthetic_pair(
        self,
        service: DimensionEstimationService,
        sampler: Sampler,
        config: ExperimentConfig,
        seed: int,
        workers: int = 1,
    ) -> Tuple[EstimatePair, Optional[EstimatePair]]:
        estimation = config.estimation(seed, workers=workers)
        if config.sampling == "fresh":
            pair = service.estimate_dimension_fresh(sampler, estimation)
        else:
            corpus = sampler(2 ** (max(config.scales) + 1), seed)
            pair = service.estimate_dimension(corpus, estimation)

        ratio = None
        if config.alpha is not None:
            large = 2 ** max(config.scales)
            corpus = sampler(2 * (large + large // config.alpha), rng.derive_seed(seed, 2))
            ratio = service.estimate_ratio(corpus, estimation)
        return pair, ratio

    def run_sphere_sweep(self, config: ExperimentConfig) -> ExperimentReport:
        """
        Estimate embedded spheres S^d in R^D for every requested d and seed.

        Rows: (d_true, seed, d_hat_w1_euclid, d_hat_w1_graph, d_hat_mle, ...).
        """
        report = ExperimentReport(config.experiment, SPHERE_COLUMNS)
        service = self._estimation_service(config)
        workers = self._graph_workers(len(config.intrinsic_dims) * len(config.seeds))

        def task(d: int, seed: int) -> TaskOutcome:
            spec = EmbeddingSpec(
                source_dim=d,
                target_dim=config.ambient,
                degree=config.degree,
                seed=config.embedding_seed,
            )

            def sampler(n: int, sample_seed: int) -> PointCloud:
                return embedded_sphere(d, n, spec, sample_seed)

            pair, ratio = self._synthetic_pair(service, sampler, config, seed, workers)
            mle = mle_estimate(sampler(config.mle_n, rng.derive_seed(seed, 1)), config.mle_k)
            row = {
                "d_hat_w1_euclid": _d_hat(pair.euclidean),
                "d_hat_w1_graph": _d_hat(pair.graph_geodesic),
                "d_hat_mle": mle.d_hat,
                "d_hat_ratio_euclid": _d_hat(ratio.euclidean) if ratio else None,
                "d_hat_ratio_graph": _d_hat(ratio.graph_geodesic) if ratio else None,
            }
            return TaskOutcome(row, _pair_series(config.experiment, f"d={d}", seed, pair))

        tasks = [
            ({"d_true": d, "seed": seed}, lambda d=d, seed=seed: task(d, seed))
            for d in config.intrinsic_dims
            for seed in config.seeds
        ]
        self._fan_out(report, tasks)

        for d in config.intrinsic_dims:
            values = [
                row["d_hat_w1_graph"] if row["d_hat_w1_graph"] is not None else row["d_hat_w1_euclid"]
                for row in report.results
                if row["d_true"] == d and row["status"] == OK
            ]
            if values:
                report.summary[f"median_d_hat[d={d}]"] = float(np.median(values))
        return report

    def run_ambient_sweep(self, config: ExperimentConfig) -> ExperimentReport:
        """
        Estimate one embedded sphere across several ambient dimensions D.

        Sphere samples depend only on the seed, so every D sees the same
        source points. A summary row carries the spread of the per-D medians.
        """
        report = ExperimentReport(config.experiment, AMBIENT_COLUMNS)
        service = self._estimation_service(config)
        workers = self._graph_workers(len(config.ambient_dims) * len(config.seeds))
        d = config.ambient_intrinsic_dim

        def task(target_dim: int, seed: int) -> TaskOutcome:
            spec = EmbeddingSpec(
                source_dim=d,
                target_dim=target_dim,
                degree=config.degree,
                seed=config.embedding_seed,
            )

            def sampler(n: int, sample_seed: int) -> PointCloud:
                return embedded_sphere(d, n, spec, sample_seed)

            pair, _ = self._synthetic_pair(service, sampler, config, seed, workers)
            mle = mle_estimate(sampler(config.mle_n, rng.derive_seed(seed, 1)), config.mle_k)
            row = {
                "d_hat": _d_hat(pair.primary()),
                "d_hat_w1_euclid": _d_hat(pair.euclidean),
                "d_hat_w1_graph": _d_hat(pair.graph_geodesic),
                "d_hat_mle": mle.d_hat,
            }
            return TaskOutcome(
                row, _pair_series(config.experiment, f"D={target_dim}", seed, pair)
            )

        tasks = [
            ({"D": target_dim, "seed": seed}, lambda D=target_dim, seed=seed: task(D, seed))
            for target_dim in config.ambient_dims
            for seed in config.seeds
        ]
        self._fan_out(report, tasks)

        medians = {}
        for target_dim in config.ambient_dims:
            values = [
                row["d_hat"]
                for row in report.results
                if row["D"] == target_dim and row["status"] == OK
            ]
            if values:
                medians[target_dim] = float(np.median(values))
        if medians:
            overall = float(
                np.median([row["d_hat"] for row in report.results if row["status"] == OK])
            )
            spread = max(medians.values()) - min(medians.values())
            report.summary.update(
                {
                    "median_d_hat_by_D": {str(key): value for key, value in medians.items()},
                    "overall_median": overall,
                    "spread": spread,
                    "relative_spread": spread / overall,
                }
            )
            report.results.append(
                {"D": "summary", "d_hat": overall, "spread": spread, "status": "summary"}
            )
        return report

    def run_swiss_roll(self, config: ExperimentConfig) -> ExperimentReport:
        """Estimate the Swiss roll by subsampling a corpus of swiss_roll_n points."""
        report = ExperimentReport(config.experiment, SWISS_ROLL_COLUMNS)
        service = self._estimation_service(config)
        workers = self._graph_workers(len(config.seeds))

        def task(seed: int) -> TaskOutcome:
            corpus = swiss_roll(config.swiss_roll_n, seed)
            pair = service.estimate_dimension(
                corpus, config.estimation(seed, workers=workers)
            )
            mle = mle_estimate(corpus, config.mle_k)
            row = {
                "d_hat_w1_euclid": _d_hat(pair.euclidean),
                "d_hat_w1_graph": _d_hat(pair.graph_geodesic),
                "d_hat_mle": mle.d_hat,
            }
            return TaskOutcome(row, _pair_series(config.experiment, "swiss_roll", seed, pair))

        tasks = [
            ({"seed": seed, "n_total": config.swiss_roll_n}, lambda seed=seed: task(seed))
            for seed in config.seeds
        ]
        self._fan_out(report, tasks)
        return report

    def _load_mnist(self, config: ExperimentConfig):
        if self.dataset_loader is None:
            raise FileNotFoundError(
                "MNIST experiments need a dataset directory (--mnist-dir)"
            )
        return self.dataset_loader.load(config.mnist_split)

    def _digit_cloud(self, data, digit: int, config: ExperimentConfig, seed: int) -> PointCloud:
        cloud = filter_by_digit(data, digit)
        if config.mnist_per_digit is not None and cloud.n > config.mnist_per_digit:
            keep = rng.stream(seed, rng.SPLIT, 10_000 + digit).choice(
                cloud.n, size=config.mnist_per_digit, replace=False
            )
            cloud = cloud.subset(np.sort(keep))
        return cloud

    def run_mnist(self, config: ExperimentConfig) -> ExperimentReport:
        """
        Graph-metric estimate per digit and per Sinkhorn setting.

        One row per (digit, reg); a failing digit is recorded and the run
        continues. Scales a digit class is too small for are dropped and the
        largest scale used is reported as k_max.
        """
        report = ExperimentReport(config.experiment, MNIST_COLUMNS)
        data = self._load_mnist(config)
        seed = config.seeds[0]
        workers = self._graph_workers(len(config.digits) * len(config.mnist_regs))

        def task(digit: int, reg: float, iters: int) -> TaskOutcome:
            cloud = self._digit_cloud(data, digit, config, seed)
            scales = capped_scales(config.scales, cloud.n)
            service = self._estimation_service(config, reg=reg, iters=iters)
            estimation = config.estimation(
                seed,
                metrics=(MetricKind.GRAPH_GEODESIC,),
                scales=scales,
                workers=workers,
            )
            estimate = service.estimate_dimension(cloud, estimation).graph_geodesic
            converged = all(
                entry.transport.converged
                for entry in estimate.series.entries
                if entry.transport is not None
            )
            row = {
                "n_digit": cloud.n,
                "k_max": scales[-1],
                "d_hat": estimate.d_hat,
                "converged": converged,
            }
            group = f"digit={digit},reg={reg}"
            return TaskOutcome(row, series_rows(config.experiment, group, seed, estimate))

        tasks = [
            (
                {"digit": digit, "reg": setting.reg, "iters": setting.iters},
                lambda digit=digit, setting=setting: task(digit, setting.reg, setting.iters),
            )
            for digit in config.digits
            for setting in config.mnist_regs
        ]
        self._fan_out(report, tasks)
        return report

    def run_fig1(self, config: ExperimentConfig) -> ExperimentReport:
        """
        Euclidean against graph-geodesic log-log fits on one MNIST digit.

        Rows: one per (seed, metric) with slope, intercept and residual sum
        of squares; series rows hold the residual per scale. The summary
        counts seeds where the geodesic fit has the smaller residuals.
        """
        report = ExperimentReport(config.experiment, FIG1_COLUMNS)
        data = self._load_mnist(config)
        service = self._estimation_service(config)
        metrics = (MetricKind.EUCLIDEAN, MetricKind.GRAPH_GEODESIC)
        workers = self._graph_workers(len(config.seeds))

        outcomes: Dict[int, EstimatePair] = {}

        def task(seed: int) -> TaskOutcome:
            cloud = self._digit_cloud(data, config.fig1_digit, config, seed)
            scales = capped_scales(config.scales, cloud.n)
            estimation = config.estimation(
                seed, metrics=metrics, scales=scales, workers=workers
            )
            pair = service.estimate_dimension(cloud, estimation)
            outcomes[seed] = pair
            group = f"digit={config.fig1_digit}"
            return TaskOutcome(
                {"n_digit": cloud.n, "k_max": scales[-1]},
                _pair_series(config.experiment, group, seed, pair),
            )

        self._fan_out(
            report, [({"seed": seed}, lambda seed=seed: task(seed)) for seed in config.seeds]
        )

        rows = []
        for row in report.results:
            pair = outcomes.get(row["seed"])
            if pair is None:
                rows.append({**row, "metric": None})
                continue
            for estimate in (pair.euclidean, pair.graph_geodesic):
                rows.append(
                    {
                        "seed": row["seed"],
                        "metric": estimate.metric_kind.value,
                        "n_digit": row["n_digit"],
                        "k_max": row["k_max"],
                        "d_hat": estimate.d_hat,
                        "slope": estimate.slope,
                        "intercept": estimate.intercept,
                        "rss": estimate.rss,
                        "status": OK,
                    }
                )
        report.results = rows

        wins = sum(
            1
            for pair in outcomes.values()
            if pair.graph_geodesic.rss <= pair.euclidean.rss
        )
        report.summary.update(
            {"seeds_completed": len(outcomes), "graph_rss_le_euclid": wins}
        )
        return report
