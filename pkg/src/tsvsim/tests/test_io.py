"""Test report writing and rendering helpers.

'why': reports are written atomically and rendered the same way for every experiment
"""
from __future__ import annotations

from pathlib import Path

import pytest

from tsvsim import CriterionResult, OutputLocationError, Report
from tsvsim._io import criteria_frame, render_table, write_reports, write_text_atomic
from tsvsim._models import at_least, at_most, equals, within


def _report(*criteria: CriterionResult) -> Report:
    return Report(experiment="A0-example", seed=1, parameters={"trials": 10}, statistics={"rate": 0.5}, criteria=criteria)


def test_write_text_atomic_leaves_no_partial_files(tmp_path: Path) -> None:
    """Atomic writes create parents and leave only the destination behind."""

    dest = tmp_path / "nested" / "out.txt"

    written = write_text_atomic(dest, "hello\n")

    assert written == dest
    assert dest.read_text(encoding="utf-8") == "hello\n"
    assert [path.name for path in dest.parent.iterdir()] == ["out.txt"]


def test_write_text_atomic_reports_unwritable_locations(tmp_path: Path) -> None:
    blocker = tmp_path / "file"
    _ = blocker.write_text("x", encoding="utf-8")

    with pytest.raises(OutputLocationError):
        _ = write_text_atomic(blocker / "out.txt", "data")


@pytest.mark.parametrize(
    ("criterion", "passed"),
    [
        (within("c", "d", 0.26, 0.25, 0.02), True),
        (within("c", "d", 0.30, 0.25, 0.02), False),
        (at_most("c", "d", 0.1, 0.2), True),
        (at_least("c", "d", 0.1, 0.2), False),
        (equals("c", "d", 3, 3), True),
        (equals("c", "d", 2, 3), False),
    ],
)
def test_criterion_comparisons(criterion: CriterionResult, passed: bool) -> None:
    assert criterion.passed is passed


def test_report_status_follows_its_criteria() -> None:
    assert _report(equals("ok", "d", 1, 1)).status == "passed"
    assert _report(equals("ok", "d", 1, 1), equals("bad", "d", 0, 1)).status == "failed"


def test_criteria_frame_columns() -> None:
    frame = criteria_frame([_report(equals("A0.one", "one", 1, 1))])

    assert list(frame.columns) == ["experiment", "criterion_id", "description", "observed", "expected", "comparison", "tolerance", "passed"]
    assert frame.loc[0, "experiment"] == "A0-example"


def test_render_table_marks_pass_and_fail() -> None:
    table = render_table([_report(equals("A0.one", "one", 1, 1), at_most("A0.two", "two", 5, 1))])

    assert "PASS" in table
    assert "FAIL" in table
    assert "A0.two" in table


def test_render_table_without_criteria() -> None:
    assert render_table([_report()]) == "(no criteria)"


def test_write_reports_writes_json_and_csv(tmp_path: Path) -> None:
    """The JSON report keeps wall-clock time; the deterministic view drops it."""

    report = _report(equals("A0.one", "one", 1, 1))

    json_path, csv_path = write_reports([report], tmp_path)

    assert '"duration_seconds"' in json_path.read_text(encoding="utf-8")
    assert csv_path.read_text(encoding="utf-8").splitlines()[0].startswith("experiment,criterion_id")
    assert "duration_seconds" not in report.to_dict(include_wall_clock=False)
