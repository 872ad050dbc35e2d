"""Coordinate stateful access to the experiment catalog.

'why': provide a single, inspectable entry point that captures settings once
and threads them, with a per-runner logger, through every experiment run
"""
from __future__ import annotations

import logging
import threading
import time
from collections.abc import Mapping, Sequence
from dataclasses import replace
from pathlib import Path
from uuid import uuid4

from ._config import build_settings, validated_parameters
from ._experiments import EXPERIMENTS, ExperimentContext, ExperimentOutcome, get_experiment
from ._io import write_reports
from ._ledger import Transcript
from ._logging import LOGGER_NAMESPACE, configure_logger, experiment_logger
from ._models import ExperimentConfig, OperationContext, OutputPaths, Profile, Report, Settings
from ._rng import RandomSource


class ExperimentRunner:
    """Run catalog experiments behind instance state.

    A runner owns a `Settings` snapshot and a logger. `configure` replaces
    both atomically; unspecified settings keep their current values.
    """

    def __init__(
        self,
        log_level: str | None = None,
        log_directory: Path | str | None = None,
        threads: int | None = None,
        profile: Profile | str | None = None,
    ) -> None:
        """Initialize the runner with default statistical settings."""

        self._lock: threading.Lock = threading.Lock()
        self._logger_name: str = f"{LOGGER_NAMESPACE}.runner.{uuid4().hex[:8]}"
        settings = build_settings(log_level=log_level, log_directory=log_directory, threads=threads, profile=profile)
        self._settings: Settings = settings
        self._logger: logging.Logger = configure_logger(self._logger_name, settings.log_level, settings.log_directory)

    def configure(
        self,
        log_level: str | None = None,
        log_directory: Path | str | None = None,
        threads: int | None = None,
        sigma_multiplier: float | None = None,
        tv_tolerance: float | None = None,
        max_attempts: int | None = None,
        max_rounds: int | None = None,
        profile: Profile | str | None = None,
    ) -> None:
        """Update settings; unspecified parameters preserve their current value."""

        current = self._settings
        settings = build_settings(
            log_level=log_level if log_level is not None else current.log_level.value,
            log_directory=log_directory if log_directory is not None else current.log_directory,
            threads=threads if threads is not None else current.threads,
            sigma_multiplier=sigma_multiplier if sigma_multiplier is not None else current.sigma_multiplier,
            tv_tolerance=tv_tolerance if tv_tolerance is not None else current.tv_tolerance,
            max_attempts=max_attempts if max_attempts is not None else current.max_attempts,
            max_rounds=max_rounds if max_rounds is not None else current.max_rounds,
            profile=profile if profile is not None else current.profile,
        )
        logger = configure_logger(self._logger_name, settings.log_level, settings.log_directory)
        with self._lock:
            self._settings = settings
            self._logger = logger

    @property
    def settings(self) -> Settings:
        return self._snapshot_context().settings

    def list_experiments(self) -> list[tuple[str, str]]:
        """Return (id, description) for every catalog experiment in catalog order."""

        return [(spec.experiment_id, spec.description) for spec in EXPERIMENTS]

    def run(self, config: ExperimentConfig) -> Report:
        """Execute one experiment, write its outputs, and return the report.

        Parameters not given in the config come from the runner profile's
        defaults; the common overrides (`max_rounds`, `max_attempts`,
        `tv_tolerance`, `sigma_multiplier`) replace the runner settings for
        this run only.
        """

        return self._run(config, self._snapshot_context())

    def _run(self, config: ExperimentConfig, ctx: OperationContext) -> Report:
        spec = get_experiment(config.experiment)
        parameters = {**spec.defaults(ctx.settings.profile), **validated_parameters(spec, dict(config.parameters))}
        settings = _with_overrides(ctx.settings, parameters)

        with experiment_logger(ctx.logger, spec.experiment_id, config.seed, settings.log_directory) as logger:
            logger.info("experiment start: id=%s seed=%s profile=%s", spec.experiment_id, config.seed, settings.profile.value)
            started = time.perf_counter()
            outcome = spec.run(ExperimentContext(parameters, RandomSource(config.seed), settings, logger, config.scenario))
            duration = time.perf_counter() - started
            report = _report(config, parameters, outcome, duration)
            logger.info("experiment finish: id=%s status=%s duration=%.2fs", spec.experiment_id, report.status, duration)
            _log_failed_criteria(logger, report)

        _write_outputs(config.output, spec.experiment_id, [report], outcome.transcripts)
        return report

    def verify_all(
        self,
        seed: int = 0,
        profile: Profile | str = Profile.FAST,
        output: OutputPaths | None = None,
    ) -> list[Report]:
        """Run every catalog experiment at `profile` scale and write one combined report."""

        ctx = self._snapshot_context()
        ctx = replace(ctx, settings=replace(ctx.settings, profile=Profile(profile)))
        output = output or OutputPaths()
        per_experiment = OutputPaths(transcripts=output.transcripts)
        reports = [self._run(ExperimentConfig(spec.experiment_id, seed, output=per_experiment), ctx) for spec in EXPERIMENTS]
        if output.report_directory is not None:
            _ = write_reports(reports, output.report_directory)
        failed = [report.experiment for report in reports if report.status == "failed"]
        ctx.logger.info("verify-all finish: experiments=%s failed=%s", len(reports), failed)
        return reports

    def _snapshot_context(self) -> OperationContext:
        """Return an atomic snapshot of settings and logger.

        'why': a concurrent `configure` must not mix old settings with a new logger
        """

        with self._lock:
            return OperationContext(settings=self._settings, logger=self._logger)


def _report(config: ExperimentConfig, parameters: dict[str, int | float], outcome: ExperimentOutcome, duration: float) -> Report:
    return Report(
        experiment=config.experiment,
        seed=config.seed,
        parameters={**parameters, **({"scenario": config.scenario} if config.scenario else {})},
        statistics=dict(outcome.statistics),
        criteria=outcome.criteria,
        transcript_digests=tuple(transcript.digest() for transcript in outcome.transcripts),
        duration_seconds=duration,
    )


def _write_outputs(output: OutputPaths, experiment_id: str, reports: Sequence[Report], transcripts: Sequence[Transcript]) -> None:
    if output.report_directory is not None:
        _ = write_reports(reports, output.report_directory)
    if output.transcripts is not None:
        for index, transcript in enumerate(transcripts):
            _ = transcript.write(output.transcripts / f"{experiment_id}-{index:04d}.jsonl")


def _with_overrides(settings: Settings, parameters: Mapping[str, int | float]) -> Settings:
    return replace(
        settings,
        max_rounds=int(parameters.get("max_rounds", settings.max_rounds)),
        max_attempts=int(parameters.get("max_attempts", settings.max_attempts)),
        tv_tolerance=float(parameters.get("tv_tolerance", settings.tv_tolerance)),
        sigma_multiplier=float(parameters.get("sigma_multiplier", settings.sigma_multiplier)),
    )


def _log_failed_criteria(logger: logging.Logger, report: Report) -> None:
    for criterion in report.criteria:
        if not criterion.passed:
            logger.warning(
                "criterion failed: id=%s observed=%s expected=%s", criterion.criterion_id, criterion.observed, criterion.expected
            )
