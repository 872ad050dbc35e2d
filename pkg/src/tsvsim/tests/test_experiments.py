"""Run every catalog experiment end to end at reduced scale.

'why': the acceptance catalog is the product; each entry must pass on a fixed
seed, reproduce itself exactly, and not depend on the worker thread count
"""
from __future__ import annotations

import pytest

from tsvsim import ExperimentConfig, ExperimentRunner, experiment_ids

from ._utils import SEED

SMALL_RUNS: dict[str, dict[str, int | float]] = {
    "A1-time-reversal": {"states": 5, "tomography_states": 1, "trials": 600},
    "A2-forward-reversal": {"trials": 2000},
    "A3-demolition-reliability": {"successes": 5},
    "A4-demolition-statistics": {"successes": 600},
    "A5-round-convergence": {"trials": 1500},
    "A6-abl-agreement": {"vectors": 3, "trials": 800},
    "A7-crossed-reversal": {"runs": 60},
    "A8-consolidation-resources": {"max_parties": 4},
    "A9-instantaneity": {"transcripts": 30},
    "A10-naive-preparation": {"trials": 600},
    "demo-teleportation": {"repeats": 60, "trials": 1000},
    "demo-generalized": {"trials": 1000},
}


def test_catalog_is_fully_covered() -> None:
    assert set(SMALL_RUNS) == set(experiment_ids())


@pytest.mark.parametrize("experiment_id", list(SMALL_RUNS))
def test_catalog_experiment_passes(experiment_id: str, runner: ExperimentRunner) -> None:
    """Each experiment passes every criterion on the shared seed."""

    # Given a reduced-scale config
    config = ExperimentConfig(experiment=experiment_id, seed=SEED, parameters=SMALL_RUNS[experiment_id])

    # When it runs
    report = runner.run(config)

    # Then every criterion holds
    failed = [criterion.criterion_id for criterion in report.criteria if not criterion.passed]
    assert failed == []
    assert report.status == "passed"
    assert report.criteria


def test_demolition_statistics_report_named_scenarios(runner: ExperimentRunner) -> None:
    report = runner.run(ExperimentConfig("A4-demolition-statistics", SEED, SMALL_RUNS["A4-demolition-statistics"]))

    assert {"crossed-image_tv", "bell_tv"} <= set(report.statistics)


def test_scenario_narrows_the_demolition_run(runner: ExperimentRunner) -> None:
    """A scenario id restricts the run to that observable and is echoed in the report."""

    config = ExperimentConfig("A4-demolition-statistics", SEED, SMALL_RUNS["A4-demolition-statistics"], scenario="bell")

    report = runner.run(config)

    assert "bell_tv" in report.statistics
    assert "crossed-image_tv" not in report.statistics
    assert report.parameters["scenario"] == "bell"


def test_round_convergence_reports_the_pinned_curve(runner: ExperimentRunner) -> None:
    report = runner.run(ExperimentConfig("A5-round-convergence", SEED, {"trials": 1500, "max_rounds": 4}))

    assert report.statistics["pinned_cumulative"] == pytest.approx(1.0 - 0.75 * (15.0 / 16.0) ** 3)
    assert "cumulative_round_4" in report.statistics
    assert "cumulative_round_5" not in report.statistics


def test_consolidation_costs_one_singlet_per_remote_party(runner: ExperimentRunner) -> None:
    report = runner.run(ExperimentConfig("A8-consolidation-resources", SEED, {"max_parties": 4}))

    for parties in (2, 3, 4):
        assert report.statistics[f"channels_n{parties}"] == parties - 1
        assert report.statistics[f"bits_n{parties}"] == 0
    assert len(report.transcript_digests) == 3


def test_same_seed_reproduces_the_report(runner: ExperimentRunner) -> None:
    """Two runs on one seed agree on everything but wall-clock time."""

    config = ExperimentConfig("A9-instantaneity", SEED, {"transcripts": 20})

    first = runner.run(config).to_dict(include_wall_clock=False)
    second = runner.run(config).to_dict(include_wall_clock=False)

    assert first == second


def test_different_seeds_give_different_transcripts(runner: ExperimentRunner) -> None:
    first = runner.run(ExperimentConfig("A9-instantaneity", 1, {"transcripts": 10}))
    second = runner.run(ExperimentConfig("A9-instantaneity", 2, {"transcripts": 10}))

    assert first.transcript_digests != second.transcript_digests


def test_results_do_not_depend_on_thread_count(runner: ExperimentRunner) -> None:
    """Chunk substreams make the statistics identical for one or three workers."""

    # Given the same config
    config = ExperimentConfig("A2-forward-reversal", SEED, {"trials": 600})

    # When it runs inline and then on three threads
    inline = runner.run(config)
    runner.configure(threads=3)
    pooled = runner.run(config)

    # Then the statistics match exactly
    assert inline.statistics == pooled.statistics
