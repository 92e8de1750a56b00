"""
Command line surface of wassdim.

    wassdim <experiment> [--config FILE] [--scales 5..10] [--seeds N] ...

Configuration is layered: model defaults, then a JSON config file (or the
manifest of an earlier run), then flags given on the command line.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from wassdim import __version__
from wassdim.application.config import EXPERIMENTS, ExperimentConfig
from wassdim.cli.dependencies import get_experiment_service
from wassdim.domain.errors import ConfigError, WassdimError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def parse_scales(text: str) -> List[int]:
    """Parse "5..10" (inclusive range) or "5,6,8" into a list of scales."""
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            return list(range(int(low), int(high) + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"Invalid scales: {text!r}; use a range like 5..10 or a list like 5,6,7"
        )


def parse_digits(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid digits: {text!r}")


def parse_dims(text: str) -> List[int]:
    """Parse "20,50,100" or "2..4" into a list of dimensions."""
    try:
        return parse_scales(text)
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(
            f"Invalid dimensions: {text!r}; use a list like 20,50,100 or a range like 2..4"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wassdim",
        description="Estimate intrinsic dimension from the decay of Wasserstein-1 "
        "distances between subsamples.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path, help="JSON config file or manifest")
    parser.add_argument("--scales", type=parse_scales, help="e.g. 5..10 or 5,6,7")
    parser.add_argument("--seeds", type=int, help="Run seeds 0..N-1")
    parser.add_argument("--repetitions", type=int)
    parser.add_argument("--alpha", type=int, help="Also compute the ratio estimate")
    parser.add_argument("--ot", choices=["exact", "sinkhorn"])
    parser.add_argument("--reg", type=float, help="Sinkhorn regularization")
    parser.add_argument("--iters", type=int, help="Sinkhorn iteration cap")
    parser.add_argument("--tol", type=float, help="Sinkhorn tolerance")
    parser.add_argument("--metric", choices=["euclid", "graph", "both"])
    parser.add_argument("--knn", type=int, help="Neighbors per vertex")
    parser.add_argument("--eps", type=float, help="Use an epsilon graph instead of kNN")
    parser.add_argument(
        "--no-escalate",
        dest="escalate_knn",
        action="store_const",
        const=False,
        help="Keep k fixed even if the kNN graph is disconnected",
    )
    parser.add_argument("--sampling", choices=["fresh", "subsample"])
    parser.add_argument("--degree", type=int, help="Polynomial embedding degree")
    parser.add_argument("--ambient", type=int, help="Ambient dimension D")
    parser.add_argument(
        "--intrinsic-dims",
        dest="intrinsic_dims",
        type=parse_dims,
        help="Sphere dimensions d of sphere_sweep, e.g. 2,4,8",
    )
    parser.add_argument(
        "--ambient-dims",
        dest="ambient_dims",
        type=parse_dims,
        help="Ambient dimensions D of ambient_sweep, e.g. 20,50,100",
    )
    parser.add_argument("--digits", type=parse_digits, help="e.g. 0,1,7")
    parser.add_argument("--mnist-dir", dest="mnist_dir", type=Path)
    parser.add_argument("--mnist-split", dest="mnist_split", choices=["train", "test"])
    parser.add_argument("--per-digit", dest="mnist_per_digit", type=int)
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--threads", type=int, help="Worker pool size")
    return parser


def _read_config_file(path: Path) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text() or "{}")
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    # A manifest embeds the resolved config of its run.
    if isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def _describe_validation_error(error: ValidationError) -> str:
    unknown = []
    problems = []
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "config"
        if item["type"] == "extra_forbidden":
            unknown.append(field)
        else:
            problems.append(f"{field}: {item['msg']}")
    if unknown:
        problems.insert(0, f"unknown keys: {', '.join(sorted(unknown))}")
    return "; ".join(problems)


def parse_config(
    path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """
    Build a validated configuration from a file and flag overrides.

    Args:
        path: Optional JSON config file or run manifest
        overrides: Flag values; they win over the file

    Returns:
        Resolved ExperimentConfig

    Raises:
        ConfigError: On unreadable files, unknown keys or invalid values
    """
    data = _read_config_file(path) if path is not None else {}
    data.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {_describe_validation_error(e)}")


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key not in ("config", "seeds") and value is not None
    }
    if args.seeds is not None:
        overrides["seeds"] = list(range(args.seeds))
    return overrides


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the experiment and map the outcome to an exit code.

    Returns:
        0 when every task succeeded, 1 on partial failure, 2 on configuration
        errors or missing data
    """
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config, overrides_from_args(args))
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG_ERROR

    logger.info(f"Resolved configuration: {config.model_dump_json()}")
    service = get_experiment_service(config)
    try:
        report = service.run(config)
    except (WassdimError, FileNotFoundError) as e:
        # Only data loading raises past the task pool: missing or corrupt input.
        logger.error(str(e))
        return EXIT_CONFIG_ERROR

    if not report.ok:
        logger.warning(f"{report.failures} task(s) failed; see the status column")
        return EXIT_PARTIAL_FAILURE
    return EXIT_OK
