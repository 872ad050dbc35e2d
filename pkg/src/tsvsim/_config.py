"""Manage runner settings and experiment configs.

'why': centralize settings creation and strict config validation so a typo in
an experiment file is rejected instead of silently running different trials
"""
from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Final

from ._demolition import DEFAULT_MAX_ROUNDS
from ._errors import ExperimentConfigurationError
from ._experiments import ExperimentSpec, ParameterValue, get_experiment
from ._models import ExperimentConfig, LogLevel, OutputPaths, Profile, Settings
from ._scenario import DEFAULT_MAX_ATTEMPTS

DEFAULT_SIGMA_MULTIPLIER: Final[float] = 5.0
DEFAULT_TV_TOLERANCE: Final[float] = 0.02

CONFIG_FIELDS: Final[frozenset[str]] = frozenset({"experiment", "seed", "parameters", "scenario", "output"})
OUTPUT_FIELDS: Final[frozenset[str]] = frozenset({"report_directory", "transcripts"})


def build_settings(
    log_level: str | None = None,
    log_directory: Path | str | None = None,
    threads: int | None = None,
    sigma_multiplier: float | None = None,
    tv_tolerance: float | None = None,
    max_attempts: int | None = None,
    max_rounds: int | None = None,
    profile: Profile | str | None = None,
) -> Settings:
    """Return a validated Settings snapshot for the provided configuration."""

    return Settings(
        log_level=_normalized_level(log_level),
        log_directory=_validated_log_directory(log_directory),
        threads=_validated_count("threads", threads, default=1),
        sigma_multiplier=_validated_positive("sigma_multiplier", sigma_multiplier, default=DEFAULT_SIGMA_MULTIPLIER),
        tv_tolerance=_validated_positive("tv_tolerance", tv_tolerance, default=DEFAULT_TV_TOLERANCE),
        max_attempts=_validated_count("max_attempts", max_attempts, default=DEFAULT_MAX_ATTEMPTS),
        max_rounds=_validated_count("max_rounds", max_rounds, default=DEFAULT_MAX_ROUNDS),
        profile=_normalized_profile(profile),
    )


def _normalized_level(level: str | None) -> LogLevel:
    if level is None:
        return LogLevel.INFO
    try:
        return LogLevel[level.upper()]
    except KeyError as exc:
        raise ExperimentConfigurationError(f"unsupported log_level: {level}") from exc


def _normalized_profile(profile: Profile | str | None) -> Profile:
    if profile is None:
        return Profile.FAST
    try:
        return Profile(str(profile).lower())
    except ValueError as exc:
        raise ExperimentConfigurationError(f"unsupported profile: {profile} (expected fast or full)") from exc


def _validated_count(name: str, value: object, default: int) -> int:
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, int):
        raise ExperimentConfigurationError(f"{name} must be an integer (got {value!r})")
    if value < 1:
        raise ExperimentConfigurationError(f"{name} must be at least 1 (got {value})")
    return value


def _validated_positive(name: str, value: object, default: float) -> float:
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ExperimentConfigurationError(f"{name} must be a number (got {value!r})")
    if value <= 0:
        raise ExperimentConfigurationError(f"{name} must be positive (got {value})")
    return float(value)


def _validated_log_directory(value: Path | str | None) -> Path | None:
    if value is None:
        return None
    directory = Path(value)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExperimentConfigurationError(f"unable to create log directory {directory}: {exc}") from exc
    return directory


def load_experiment_config(source: Path | str | Mapping[str, object]) -> ExperimentConfig:
    """Read a JSON experiment config (or an already-parsed mapping) and validate it strictly.

    Unknown top-level, parameter, and output fields are rejected; `seed` is
    required; counts must be integers >= 1 and tolerances positive numbers.
    """

    raw = source if isinstance(source, Mapping) else _read_json(Path(source))
    _require_known(raw, CONFIG_FIELDS, "unknown config fields")
    experiment_id = raw.get("experiment")
    if not isinstance(experiment_id, str):
        raise ExperimentConfigurationError("config needs an 'experiment' id string")
    spec = get_experiment(experiment_id)
    return ExperimentConfig(
        experiment=spec.experiment_id,
        seed=_validated_seed(raw),
        parameters=validated_parameters(spec, raw.get("parameters") or {}),
        scenario=_validated_scenario(spec, raw.get("scenario")),
        output=_validated_output(raw.get("output") or {}),
    )


def _require_known(fields: Iterable[str], allowed: Iterable[str], message: str) -> None:
    unknown = set(fields) - set(allowed)
    if unknown:
        raise ExperimentConfigurationError(f"{message}: {sorted(unknown)}")


def _validated_seed(raw: Mapping[str, object]) -> int:
    if "seed" not in raw:
        raise ExperimentConfigurationError("config needs a 'seed'")
    seed = raw["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ExperimentConfigurationError(f"seed must be a non-negative integer (got {seed!r})")
    return seed


def _read_json(path: Path) -> Mapping[str, object]:
    try:
        payload: object = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ExperimentConfigurationError(f"config file not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ExperimentConfigurationError(f"unable to read config {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ExperimentConfigurationError(f"config {path} must hold a JSON object")
    return payload


def validated_parameters(spec: ExperimentSpec, parameters: object) -> dict[str, ParameterValue]:
    """Check parameter names and kinds against the experiment's catalog defaults.

    'why': the runner and the CLI `--trials` flag share this check
    """

    if not isinstance(parameters, Mapping):
        raise ExperimentConfigurationError("'parameters' must be an object")
    _require_known(parameters, spec.kinds, f"unknown parameters for {spec.experiment_id}")
    return {name: _validated_parameter(spec, name, value) for name, value in parameters.items()}


def _validated_parameter(spec: ExperimentSpec, name: str, value: object) -> ParameterValue:
    if spec.kinds[name] is int:
        return _validated_count(name, value, default=0)
    return _validated_positive(name, value, default=0.0)


def _validated_scenario(spec: ExperimentSpec, scenario: object) -> str | None:
    if scenario is None:
        return None
    if not isinstance(scenario, str) or scenario not in spec.scenarios:
        allowed = list(spec.scenarios) or "none"
        raise ExperimentConfigurationError(f"unknown scenario {scenario!r} for {spec.experiment_id} (allowed: {allowed})")
    return scenario


def _validated_output(output: object) -> OutputPaths:
    if not isinstance(output, Mapping):
        raise ExperimentConfigurationError("'output' must be an object")
    _require_known(output, OUTPUT_FIELDS, "unknown output fields")
    paths = {name: _validated_path(name, output.get(name)) for name in OUTPUT_FIELDS}
    return OutputPaths(report_directory=paths["report_directory"], transcripts=paths["transcripts"])


def _validated_path(name: str, value: object) -> Path | None:
    if value is not None and not isinstance(value, str):
        raise ExperimentConfigurationError(f"output.{name} must be a path string")
    return Path(value) if value else None
