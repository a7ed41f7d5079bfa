"""JSON and CSV writers for run reports."""
import csv
import io
import json
from typing import List, Optional

from dforge.schemas import RunReport

EVAL_COLUMNS = ["function", "n_truncation", "re_z", "im_z", "re_value", "im_value", "tail_bound"]
PEEL_COLUMNS = ["n", "recovered_re", "recovered_im", "error_majorant", "rounded_integer", "rounded_im"]


def report_json(report: RunReport, deterministic: bool = False) -> str:
    """Sorted, indented JSON; deterministic mode drops the wall time"""
    data = report.model_dump(mode="json")
    if deterministic:
        data.pop("wall_time", None)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _columns(rows: List[dict]) -> List[str]:
    keys = set(rows[0])
    if keys.issuperset(EVAL_COLUMNS):
        return EVAL_COLUMNS
    if keys.issuperset(PEEL_COLUMNS):
        return PEEL_COLUMNS
    return list(rows[0])


def _cell(value):
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return ""
    return value


def report_csv(report: RunReport) -> str:
    """Result rows as CSV; evaluations and peels use their fixed column sets"""
    buffer = io.StringIO()
    if not report.results:
        return ""
    columns = _columns(report.results)
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in report.results:
        writer.writerow([_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def write_report(report: RunReport, out: Optional[str], csv_path: Optional[str], fmt: str = "json",
                 deterministic: bool = False) -> Optional[str]:
    """Write the report to its destinations; returns the JSON text when no file takes it"""
    text = report_json(report, deterministic)
    if csv_path:
        with open(csv_path, "w", newline="") as handle:
            handle.write(report_csv(report))
    if out:
        with open(out, "w") as handle:
            handle.write(report_csv(report) if fmt == "csv" else text)
        return None
    return text
