import numpy as np
import pytest

from wassdim.adapters.outbound.inmemory import InMemoryResultsSinkAdapter
from wassdim.application.config import ExperimentConfig
from wassdim.application.services import ExperimentService
from wassdim.cli.dependencies import get_transport_solver, resolve_workers

pytestmark = pytest.mark.slow


def run(**values):
    sink = InMemoryResultsSinkAdapter()
    service = ExperimentService(get_transport_solver, sink, max_workers=resolve_workers())
    report = service.run(ExperimentConfig(**values))
    return report, sink


def test_sphere_sweep_recovers_dimension():
    report, sink = run(experiment="sphere_sweep")
    assert report.ok

    for d in (2, 4, 8):
        estimates = [row["d_hat_w1_graph"] for row in sink.results if row["d_true"] == d]
        assert len(estimates) == 5
        assert abs(np.median(estimates) - d) <= 0.3 * d + 0.7
        assert all(d / 5 <= value <= 5 * d for value in estimates)


def test_ambient_dimension_does_not_move_the_estimate():
    report, _ = run(experiment="ambient_sweep")
    assert report.ok
    assert report.summary["relative_spread"] <= 0.15


def test_isometric_embedding_gives_identical_series_across_ambient_dimensions():
    report, sink = run(
        experiment="ambient_sweep", degree=1, scales=[5, 6, 7, 8], seeds=[0, 1]
    )
    assert report.ok
    series = {}
    for row in sink.series:
        key = (row["seed"], row["metric"], row["k"])
        series.setdefault(key, set()).add(row["w1"])
    assert all(len(values) == 1 for values in series.values())


def test_swiss_roll_estimate():
    report, sink = run(experiment="swiss_roll", seeds=[0])
    assert report.ok
    assert 1.8 <= sink.results[0]["d_hat_w1_graph"] <= 2.9
