"""
Report rendering: JSON lines and CSV tables through pandas.

The report itself is one JSON line. Tables (the report rows, or the
scalar outputs when a command has no rows) are written as CSV with a
header row or as JSON lines, one record per row.
"""

import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import pandas as pd

from qpcocycle.schemas.report import ReportRecord
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)

FORMATS = ("json", "csv")


def _flatten(outputs: Dict[str, Any]) -> Dict[str, Any]:
    return {k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in outputs.items()}


def report_frame(report: ReportRecord) -> pd.DataFrame:
    """Tabular view of a report: its rows, or a single row of outputs."""
    if report.rows:
        return pd.DataFrame(report.rows)
    return pd.DataFrame([_flatten(report.outputs)])


def render_table(report: ReportRecord, fmt: str) -> str:
    frame = report_frame(report)
    if fmt == "csv":
        return frame.to_csv(index=False)
    buffer = io.StringIO()
    frame.to_json(buffer, orient="records", lines=True, double_precision=15)
    text = buffer.getvalue()
    return text if text.endswith("\n") else text + "\n"


def render_report(report: ReportRecord) -> str:
    return report.model_dump_json() + "\n"


def write_report(report: ReportRecord, fmt: str = "json", output: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """
    Emit a report.

    Without ``output``: JSON format prints the report line, CSV prints the
    table. With ``output``: the table goes to the file in ``fmt`` and the
    report line is printed.

    Args:
        report: Command result
        fmt: "json" or "csv"
        output: Optional data file path
        stream: Destination for printed text (stdout by default)
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    stream = stream or sys.stdout
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_table(report, fmt), encoding="utf-8")
        logger.info(f"wrote {len(report_frame(report))} rows to {path}")
        stream.write(render_report(report))
    elif fmt == "csv":
        stream.write(render_table(report, fmt))
    else:
        stream.write(render_report(report))
    stream.flush()
