"""Text table of metrics reports, laid out one row per method or ablation."""

from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional, Sequence

import pandas as pd

from src.models.experiment_models import MetricsReport

COLUMNS = ["method", "ASR_A", "ASR_B", "AMS", "PDR", "episodes", "attempts"]


def format_ratio(value: Optional[float]) -> str:
    """Three decimals, ties rounded half to even on the decimal value; '-' when undefined."""
    if value is None:
        return "-"
    return str(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


def report_frame(reports: Sequence[MetricsReport]) -> pd.DataFrame:
    rows = [
        {
            "method": r.label,
            "ASR_A": format_ratio(r.asr_a),
            "ASR_B": format_ratio(r.asr_b),
            "AMS": format_ratio(r.ams),
            "PDR": format_ratio(r.pdr),
            "episodes": str(r.episodes),
            "attempts": str(r.attempts),
        }
        for r in reports
    ]
    return pd.DataFrame(rows, columns=COLUMNS)


def report_table(reports: Sequence[MetricsReport]) -> str:
    frame = report_frame(reports)
    widths = {
        column: max([len(column)] + [len(v) for v in frame[column].tolist()]) for column in COLUMNS
    }
    lines = ["  ".join(column.ljust(widths[column]) for column in COLUMNS).rstrip()]
    for _, row in frame.iterrows():
        cells = [
            str(row[column]).ljust(widths[column]) if column == "method" else str(row[column]).rjust(widths[column])
            for column in COLUMNS
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
