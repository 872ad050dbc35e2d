"""I/O helpers for reports and transcript exports.

'why': keep file operations small and testable; avoid partial outputs
"""
from __future__ import annotations

import json
import tempfile
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from ._errors import OutputLocationError
from ._models import Report


def write_text_atomic(dest_path: Path, text: str) -> Path:
    """Write `text` to `dest_path` atomically.

    Writes to a temporary file in the destination directory and then renames.
    """

    dest_path = Path(dest_path)
    tmp_path = _reserve_partial(dest_path.parent)
    try:
        _ = tmp_path.write_text(text, encoding="utf-8")
        _ = tmp_path.replace(dest_path)
    except OSError as exc:
        tmp_path.unlink(missing_ok=True)
        raise OutputLocationError(f"unable to write {dest_path}: {exc}") from exc
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise
    return dest_path


def _reserve_partial(tmp_dir: Path) -> Path:
    try:
        tmp_dir.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile("w", encoding="utf-8", dir=tmp_dir, delete=False, suffix=".partial") as tmp:
            return Path(tmp.name)
    except OSError as exc:
        raise OutputLocationError(f"unable to create output directory {tmp_dir}: {exc}") from exc


def criteria_frame(reports: Sequence[Report]) -> pd.DataFrame:
    """Flatten the criteria of `reports` into one table."""

    rows = [{"experiment": report.experiment, **criterion.as_row()} for report in reports for criterion in report.criteria]
    columns = ["experiment", "criterion_id", "description", "observed", "expected", "comparison", "tolerance", "passed"]
    return pd.DataFrame(rows, columns=columns)


def write_reports(reports: Sequence[Report], output_dir: Path) -> tuple[Path, Path]:
    """Write report.json and report.csv into `output_dir` and return both paths."""

    output_dir = Path(output_dir)
    payload = [report.to_dict() for report in reports]
    json_path = write_text_atomic(output_dir / "report.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    csv_path = write_text_atomic(output_dir / "report.csv", criteria_frame(reports).to_csv(index=False))
    return json_path, csv_path


def render_table(reports: Sequence[Report]) -> str:
    """Return the human-readable criteria table printed by the CLI."""

    frame = criteria_frame(reports)
    if frame.empty:
        return "(no criteria)"
    frame["passed"] = frame["passed"].map({True: "PASS", False: "FAIL"})
    return frame.drop(columns=["description"]).to_string(index=False)
