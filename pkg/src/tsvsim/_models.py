"""Define dataclasses and types for runner settings, configs, and reports.

'why': capture configuration and results in typed, testable shapes
"""
from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Literal


class LogLevel(str, Enum):
    """Enumerate supported logging levels for the runner."""

    CRITICAL = "CRITICAL"
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"
    DEBUG = "DEBUG"


class Profile(str, Enum):
    """Trial-count scale for catalog experiments."""

    FAST = "fast"
    FULL = "full"


@dataclass(frozen=True)
class Settings:
    """Capture runtime settings shared by every experiment run."""

    log_level: LogLevel
    log_directory: Path | None
    threads: int
    sigma_multiplier: float
    tv_tolerance: float
    max_attempts: int
    max_rounds: int
    profile: Profile


@dataclass(frozen=True)
class OperationContext:
    """Bundle settings and logger for atomic snapshotting.

    'why': ensure settings and logger are consistent for thread-safe operations
    """

    settings: Settings
    logger: logging.Logger


@dataclass(frozen=True)
class OutputPaths:
    """Where a run writes its report files and optional transcript export."""

    report_directory: Path | None = None
    transcripts: Path | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    """One validated experiment request."""

    experiment: str
    seed: int
    parameters: Mapping[str, int | float | str] = field(default_factory=dict)
    scenario: str | None = None
    output: OutputPaths = field(default_factory=OutputPaths)


Comparison = Literal["within", "at_most", "at_least", "equals"]


@dataclass(frozen=True)
class CriterionResult:
    """Pass/fail verdict citing the criterion id and both compared numbers."""

    criterion_id: str
    description: str
    observed: float
    expected: float
    comparison: Comparison
    tolerance: float = 0.0

    @property
    def passed(self) -> bool:
        if self.comparison == "within":
            return abs(self.observed - self.expected) <= self.tolerance
        if self.comparison == "at_most":
            return self.observed <= self.expected
        if self.comparison == "at_least":
            return self.observed >= self.expected
        return self.observed == self.expected

    def as_row(self) -> dict[str, object]:
        return {
            "criterion_id": self.criterion_id,
            "description": self.description,
            "observed": self.observed,
            "expected": self.expected,
            "comparison": self.comparison,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def within(criterion_id: str, description: str, observed: float, expected: float, tolerance: float) -> CriterionResult:
    return CriterionResult(criterion_id, description, float(observed), float(expected), "within", float(tolerance))


def at_most(criterion_id: str, description: str, observed: float, bound: float) -> CriterionResult:
    return CriterionResult(criterion_id, description, float(observed), float(bound), "at_most")


def at_least(criterion_id: str, description: str, observed: float, bound: float) -> CriterionResult:
    return CriterionResult(criterion_id, description, float(observed), float(bound), "at_least")


def equals(criterion_id: str, description: str, observed: float, expected: float) -> CriterionResult:
    return CriterionResult(criterion_id, description, float(observed), float(expected), "equals")


@dataclass(frozen=True)
class Report:
    """Communicate an experiment outcome in a consistent shape."""

    experiment: str
    seed: int
    parameters: Mapping[str, int | float | str]
    statistics: Mapping[str, float]
    criteria: tuple[CriterionResult, ...]
    transcript_digests: tuple[str, ...] = ()
    duration_seconds: float = 0.0

    @property
    def status(self) -> Literal["passed", "failed"]:
        return "passed" if all(criterion.passed for criterion in self.criteria) else "failed"

    def to_dict(self, *, include_wall_clock: bool = True) -> dict[str, object]:
        """Return a JSON-ready mapping; wall-clock fields are optional so reruns compare equal."""

        payload: dict[str, object] = {
            "experiment": self.experiment,
            "seed": self.seed,
            "status": self.status,
            "parameters": dict(self.parameters),
            "statistics": dict(self.statistics),
            "criteria": [criterion.as_row() for criterion in self.criteria],
            "transcript_digests": list(self.transcript_digests),
        }
        if include_wall_clock:
            payload["duration_seconds"] = self.duration_seconds
        return payload
