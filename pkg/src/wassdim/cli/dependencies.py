"""
Dependency wiring for the wassdim command line.

This module provides the process-level settings and the factory functions that
create and configure the adapters and services a command needs.
"""

import os
from functools import lru_cache, partial
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from wassdim.adapters.outbound import (
    FilesystemResultsSinkAdapter,
    IdxMnistLoaderAdapter,
    InMemoryResultsSinkAdapter,
    LogDomainSinkhornSolverAdapter,
    ScipyAssignmentSolverAdapter,
)
from wassdim.application.config import ExperimentConfig
from wassdim.application.services import DimensionEstimationService, ExperimentService
from wassdim.domain.errors import ConfigError
from wassdim.ports.outbound.dataset_loader_port import DatasetLoaderPort
from wassdim.ports.outbound.results_sink_port import ResultsSinkPort
from wassdim.ports.outbound.transport_solver_port import TransportSolverPort


class Settings(BaseSettings):
    """Global process settings, read from WASSDIM_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="WASSDIM_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Application settings
    app_name: str = "wassdim"
    app_version: str = "0.1.0"
    log_level: str = "INFO"

    # Upper bound on the experiment worker pool; None means the CPU count
    threads: Optional[int] = None

    # Directory with the four MNIST IDX files
    mnist_dir: Optional[Path] = None


@lru_cache
def get_settings() -> Settings:
    """
    Get process settings from environment variables.

    Returns:
        Settings object
    """
    return Settings()


@lru_cache
def get_transport_solver(
    ot: str = "exact",
    reg: float = 0.1,
    iters: int = 10000,
    tol: float = 1e-9,
) -> TransportSolverPort:
    """
    Create and configure a transport solver.

    Args:
        ot: "exact" for the assignment solver, "sinkhorn" for the entropic one
        reg: Sinkhorn regularization
        iters: Sinkhorn iteration cap
        tol: Sinkhorn stopping tolerance on the potentials

    Returns:
        Configured TransportSolverPort implementation
    """
    if ot == "exact":
        return ScipyAssignmentSolverAdapter()
    if ot == "sinkhorn":
        return LogDomainSinkhornSolverAdapter(reg=reg, max_iters=iters, tol=tol)
    raise ConfigError(
        f"Unsupported transport method: {ot}. Supported methods are: exact, sinkhorn"
    )


def get_results_sink(out: Optional[Path] = None) -> ResultsSinkPort:
    """
    Create a results sink.

    Args:
        out: Output directory; without one results are kept in memory

    Returns:
        Configured ResultsSinkPort implementation
    """
    if out is None:
        return InMemoryResultsSinkAdapter()
    return FilesystemResultsSinkAdapter(out)


def get_dataset_loader(mnist_dir: Optional[Path] = None) -> Optional[DatasetLoaderPort]:
    """
    Create the MNIST loader, falling back to WASSDIM_MNIST_DIR.

    Returns:
        Loader, or None when no directory is configured
    """
    mnist_dir = mnist_dir or get_settings().mnist_dir
    if mnist_dir is None:
        return None
    return IdxMnistLoaderAdapter(mnist_dir)


def resolve_workers(requested: Optional[int] = None) -> int:
    """Worker pool size: the request (or the CPU count), capped by WASSDIM_THREADS."""
    workers = requested or os.cpu_count() or 1
    cap = get_settings().threads
    if cap is not None:
        workers = min(workers, cap)
    return max(1, workers)


def get_estimation_service(
    ot: str = "exact", reg: float = 0.1, iters: int = 10000
) -> DimensionEstimationService:
    """
    Create a dimension estimation service.

    Returns:
        DimensionEstimationService bound to the requested solver
    """
    return DimensionEstimationService(get_transport_solver(ot, reg, iters))


def get_experiment_service(
    config: ExperimentConfig,
    results_sink: Optional[ResultsSinkPort] = None,
) -> ExperimentService:
    """
    Create an experiment service for a resolved configuration.

    Args:
        config: Validated experiment configuration
        results_sink: Optional sink; defaults to the configured output directory

    Returns:
        Configured ExperimentService
    """
    return ExperimentService(
        solver_factory=partial(get_transport_solver, tol=config.tol),
        results_sink=results_sink or get_results_sink(config.out),
        dataset_loader=get_dataset_loader(config.mnist_dir),
        max_workers=resolve_workers(config.threads),
    )
