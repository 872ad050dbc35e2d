"""Command-line entry point for the experiment catalog.

'why': expose every acceptance experiment as a reproducible, config-driven
command whose exit status CI can consume

Exit status: 0 when every criterion passes, 1 when a criterion fails, 2 for
usage or configuration errors, 3 for any other simulator error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Final, cast

from ._config import load_experiment_config
from ._errors import ExperimentConfigurationError, TsvSimError
from ._experiments import get_experiment
from ._io import render_table
from ._logging import LOGGER_NAMESPACE
from ._models import ExperimentConfig, OutputPaths, Profile, Report
from ._runner import ExperimentRunner

EXIT_PASSED: Final[int] = 0
EXIT_FAILED: Final[int] = 1
EXIT_USAGE: Final[int] = 2
EXIT_ERROR: Final[int] = 3

_LOGGER = logging.getLogger(f"{LOGGER_NAMESPACE}.cli")


@dataclass(frozen=True)
class CliOptions:
    """Parsed command-line arguments.

    'why': keep parsing separate from orchestration logic
    """

    command: str
    experiment: str | None
    config: Path | None
    seed: int | None
    trials: int | None
    threads: int | None
    out: Path | None
    transcripts: Path | None
    log_level: str | None
    profile: str | None


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit status."""

    options = _parse_args(argv)
    try:
        return _dispatch(options)
    except ExperimentConfigurationError as exc:
        _ = sys.stderr.write(f"tsvsim: configuration error: {exc}\n")
        return EXIT_USAGE
    except TsvSimError as exc:
        _LOGGER.error("run aborted: error=%s", exc)
        _ = sys.stderr.write(f"tsvsim: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


def _dispatch(options: CliOptions) -> int:
    if options.command == "list":
        runner = ExperimentRunner()
        _ = sys.stdout.write("".join(f"{experiment_id}\t{description}\n" for experiment_id, description in runner.list_experiments()))
        return EXIT_PASSED
    runner = ExperimentRunner(log_level=options.log_level, threads=options.threads, profile=options.profile)
    if options.command == "verify-all":
        reports = runner.verify_all(
            seed=options.seed if options.seed is not None else 0,
            profile=options.profile or Profile.FAST,
            output=OutputPaths(report_directory=options.out, transcripts=options.transcripts),
        )
        return _finish(reports)
    return _finish([runner.run(_experiment_config(options))])


def _experiment_config(options: CliOptions) -> ExperimentConfig:
    """Merge the config file (if any) with command-line overrides."""

    config = _base_config(options)
    parameters = dict(config.parameters)
    if options.trials is not None:
        spec = get_experiment(config.experiment)
        if spec.trials_parameter is None:
            raise ExperimentConfigurationError(f"{spec.experiment_id} has no trial count to override")
        parameters[spec.trials_parameter] = options.trials
    output = OutputPaths(
        report_directory=options.out or config.output.report_directory,
        transcripts=options.transcripts or config.output.transcripts,
    )
    seed = options.seed if options.seed is not None else config.seed
    return replace(config, seed=seed, parameters=parameters, output=output)


def _base_config(options: CliOptions) -> ExperimentConfig:
    if options.config is not None:
        return _config_from_file(options.config, options.experiment)
    if options.experiment is not None:
        return _config_from_flags(options.experiment, options.seed)
    raise ExperimentConfigurationError("run needs an experiment id or --config")


def _config_from_file(path: Path, experiment: str | None) -> ExperimentConfig:
    config = load_experiment_config(path)
    if experiment is not None and experiment != config.experiment:
        raise ExperimentConfigurationError(f"experiment {experiment!r} conflicts with config experiment {config.experiment!r}")
    return config


def _config_from_flags(experiment: str, seed: int | None) -> ExperimentConfig:
    if seed is None:
        raise ExperimentConfigurationError("--seed is required when no --config is given")
    return ExperimentConfig(experiment=get_experiment(experiment).experiment_id, seed=seed)


def _finish(reports: Sequence[Report]) -> int:
    _ = sys.stdout.write(render_table(reports) + "\n")
    return EXIT_PASSED if all(report.status == "passed" for report in reports) else EXIT_FAILED


def _parse_args(argv: Sequence[str] | None) -> CliOptions:
    """Parse CLI arguments into a `CliOptions` instance.

    argparse exits with status 2 on usage errors, matching EXIT_USAGE.
    """

    parser = argparse.ArgumentParser(prog="tsvsim", description="Two-state-vector protocol simulator")
    commands = parser.add_subparsers(dest="command", required=True)
    _ = commands.add_parser("list", help="List catalog experiments")

    run = commands.add_parser("run", help="Run one experiment")
    _ = run.add_argument("experiment", nargs="?", help="Catalog experiment id (optional with --config)")
    _ = run.add_argument("--config", type=Path, help="JSON experiment config")
    _ = run.add_argument("--trials", type=_positive_int, help="Override the experiment's trial count")

    verify = commands.add_parser("verify-all", help="Run every catalog experiment")
    for sub in (run, verify):
        _ = sub.add_argument("--seed", type=_non_negative_int, help="Root seed (required for run without --config)")
        _ = sub.add_argument("--threads", type=_positive_int, help="Worker threads for trial chunks")
        _ = sub.add_argument("--out", type=Path, help="Directory for report.json and report.csv")
        _ = sub.add_argument("--transcripts", type=Path, help="Directory for JSON-lines transcript export")
        _ = sub.add_argument("--log-level", choices=("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"), type=str.upper)
        _ = sub.add_argument("--profile", choices=tuple(profile.value for profile in Profile), help="Trial-count scale (default fast)")

    namespace = parser.parse_args(list(argv) if argv is not None else sys.argv[1:])
    return CliOptions(
        command=cast(str, getattr(namespace, "command")),
        experiment=cast(str | None, getattr(namespace, "experiment", None)),
        config=cast(Path | None, getattr(namespace, "config", None)),
        seed=cast(int | None, getattr(namespace, "seed", None)),
        trials=cast(int | None, getattr(namespace, "trials", None)),
        threads=cast(int | None, getattr(namespace, "threads", None)),
        out=cast(Path | None, getattr(namespace, "out", None)),
        transcripts=cast(Path | None, getattr(namespace, "transcripts", None)),
        log_level=cast(str | None, getattr(namespace, "log_level", None)),
        profile=cast(str | None, getattr(namespace, "profile", None)),
    )


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1 (got {value})")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative (got {value})")
    return value
