"""Validate settings construction and experiment config loading.

'why': a misspelled field must stop a run before any trial is spent
"""
from __future__ import annotations

from pathlib import Path

import pytest

from tsvsim import ExperimentConfigurationError, LogLevel, Profile, build_settings, load_experiment_config

from ._utils import write_json


def test_build_settings_defaults() -> None:
    settings = build_settings()

    assert settings.log_level is LogLevel.INFO
    assert settings.threads == 1
    assert settings.sigma_multiplier == 5.0
    assert settings.tv_tolerance == 0.02
    assert settings.profile is Profile.FAST


def test_build_settings_normalizes_case() -> None:
    settings = build_settings(log_level="debug", profile="FULL")

    assert settings.log_level is LogLevel.DEBUG
    assert settings.profile is Profile.FULL


@pytest.mark.parametrize(
    ("overrides", "message"),
    [
        ({"log_level": "chatty"}, "unsupported log_level"),
        ({"profile": "huge"}, "unsupported profile"),
        ({"threads": 0}, "threads must be at least 1"),
        ({"max_rounds": 2.5}, "max_rounds must be an integer"),
        ({"sigma_multiplier": -1.0}, "sigma_multiplier must be positive"),
        ({"tv_tolerance": "small"}, "tv_tolerance must be a number"),
    ],
)
def test_build_settings_rejects_bad_values(overrides: dict[str, object], message: str) -> None:
    with pytest.raises(ExperimentConfigurationError) as exc:
        _ = build_settings(**overrides)  # pyright: ignore[reportArgumentType]

    assert message in str(exc.value)


def test_build_settings_reports_an_unusable_log_directory(tmp_path: Path) -> None:
    blocker = tmp_path / "file"
    _ = blocker.write_text("x", encoding="utf-8")

    with pytest.raises(ExperimentConfigurationError) as exc:
        _ = build_settings(log_directory=blocker / "logs")

    assert "unable to create log directory" in str(exc.value)


def test_config_file_loads_with_outputs(tmp_path: Path) -> None:
    """A well-formed file yields a typed config with resolved output paths."""

    # Given a config file with parameters, a scenario and outputs
    path = write_json(
        tmp_path / "a3.json",
        {
            "experiment": "A3-demolition-reliability",
            "seed": 7,
            "parameters": {"successes": 10, "max_rounds": 12},
            "scenario": "bell",
            "output": {"report_directory": str(tmp_path / "out")},
        },
    )

    # When it is loaded
    config = load_experiment_config(path)

    # Then every field is typed
    assert config.experiment == "A3-demolition-reliability"
    assert config.seed == 7
    assert dict(config.parameters) == {"successes": 10, "max_rounds": 12}
    assert config.scenario == "bell"
    assert config.output.report_directory == tmp_path / "out"
    assert config.output.transcripts is None


@pytest.mark.parametrize(
    ("raw", "message"),
    [
        ({"experiment": "A2-forward-reversal", "seed": 1, "trials": 10}, "unknown config fields"),
        ({"seed": 1}, "'experiment' id string"),
        ({"experiment": "A99", "seed": 1}, "unknown experiment"),
        ({"experiment": "A2-forward-reversal"}, "needs a 'seed'"),
        ({"experiment": "A2-forward-reversal", "seed": -3}, "non-negative integer"),
        ({"experiment": "A2-forward-reversal", "seed": True}, "non-negative integer"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "parameters": {"trails": 10}}, "unknown parameters"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "parameters": {"trials": 0}}, "trials must be at least 1"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "parameters": {"trials": 1.5}}, "trials must be an integer"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "parameters": {"tv_tolerance": 0}}, "tv_tolerance must be positive"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "parameters": [1]}, "'parameters' must be an object"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "scenario": "bell"}, "allowed: none"),
        ({"experiment": "A3-demolition-reliability", "seed": 1, "scenario": "ghz"}, "unknown scenario"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "output": {"plots": "x"}}, "unknown output fields"),
        ({"experiment": "A2-forward-reversal", "seed": 1, "output": {"transcripts": 3}}, "must be a path string"),
    ],
)
def test_config_rejects_malformed_fields(raw: dict[str, object], message: str) -> None:
    with pytest.raises(ExperimentConfigurationError) as exc:
        _ = load_experiment_config(raw)

    assert message in str(exc.value)


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(ExperimentConfigurationError) as exc:
        _ = load_experiment_config(tmp_path / "absent.json")

    assert "not found" in str(exc.value)


def test_unparseable_config_file(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    _ = path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ExperimentConfigurationError):
        _ = load_experiment_config(path)


def test_config_file_must_hold_an_object(tmp_path: Path) -> None:
    path = tmp_path / "list.json"
    _ = path.write_text("[1, 2]", encoding="utf-8")

    with pytest.raises(ExperimentConfigurationError) as exc:
        _ = load_experiment_config(path)

    assert "JSON object" in str(exc.value)
