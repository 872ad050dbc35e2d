"""Provide shared pytest fixtures.

'why': centralize seeded sources, quiet runners, and output paths across scenarios
"""
from __future__ import annotations

from pathlib import Path

import pytest

from tsvsim import ExperimentRunner, NonlocalObservable, RandomSource, bell_observable

from ._utils import SEED


@pytest.fixture
def rng() -> RandomSource:
    """Return a fresh source on the shared test seed.

    'why': every statistical assertion must be reproducible run to run
    """

    return RandomSource(SEED)


@pytest.fixture
def runner() -> ExperimentRunner:
    """Return a runner that only logs warnings and above."""

    return ExperimentRunner(log_level="WARNING")


@pytest.fixture
def bell() -> NonlocalObservable:
    """Return the two-site Bell-operator variable."""

    return bell_observable()


@pytest.fixture
def output_directory(tmp_path: Path) -> Path:
    """Provide an empty directory for reports and transcripts.

    'why': avoid polluting the repository root during tests
    """

    dest = tmp_path / "outputs"
    dest.mkdir(parents=True, exist_ok=True)
    return dest
