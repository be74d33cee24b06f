"""
Console tables laid out like the calibration, benchmark and detection tables.
"""
from typing import Dict, Optional

import polars as pl
from rich.table import Table

from entity.Corpus import EvalSummary, RotationReport
from entity.Measures import MEASURES
from entity.Profile import CalibrationSummary
from model.harness import PUBLISHED_DETECTION, PUBLISHED_MODEL_IRS


def _fmt(value: Optional[float], digits: int = 2) -> str:
    return "undefined" if value is None else f"{value:.{digits}f}"


def calibration_table(summary: CalibrationSummary) -> Table:
    """Mean radii per measure and IRS of real and fake corpora, before and after re-scaling."""
    table = Table(title="Calibrated mean radii")
    table.add_column("Stage")
    table.add_column("Corpus")
    for m in MEASURES:
        table.add_column(m.short_name, justify="right")
    table.add_column("IRS", justify="right")

    for row in summary.rows:
        table.add_row(
            row["stage"].capitalize(), row["corpus"].capitalize(),
            *[_fmt(row[m.value]) for m in MEASURES],
            _fmt(row["irs"]),
        )
    table.caption = f"IRS gap real - fake: before {summary.gap_before:.2f}, after {summary.gap_after:.2f}"
    return table


def benchmark_rich_table(df: pl.DataFrame, references: Dict[str, float] = PUBLISHED_MODEL_IRS) -> Table:
    """Per-source IRS with the published mean shown alongside where the source name matches."""
    table = Table(title="Average IRS per source")
    for name in ("Source", "Mean IRS", "Std", "Count", "Published"):
        table.add_column(name, justify="left" if name == "Source" else "right")

    for row in df.iter_rows(named=True):
        published = references.get(row["source"])
        table.add_row(
            row["source"], _fmt(row["mean_irs"]), _fmt(row["std_irs"]), str(row["count"]),
            "-" if published is None else _fmt(published),
        )
    return table


def evaluation_table(summary: EvalSummary, source: str = "Local",
                     references: Dict[str, Dict[str, float]] = PUBLISHED_DETECTION) -> Table:
    """Accuracy, F1, recall and precision; the published rows follow for comparison."""
    table = Table(title="Fake detection")
    table.add_column("Source")
    for name in ("Accuracy", "F1", "Recall", "Precision"):
        table.add_column(name, justify="right")

    table.add_row(source, _fmt(summary.accuracy), _fmt(summary.f1), _fmt(summary.recall), _fmt(summary.precision))
    for model, metrics in references.items():
        table.add_row(
            f"{model} (published)", _fmt(metrics["accuracy"]), _fmt(metrics["f1"]),
            _fmt(metrics["recall"]), _fmt(metrics["precision"]), style="dim",
        )
    table.caption = f"TP {summary.tp}  FP {summary.fp}  TN {summary.tn}  FN {summary.fn}"
    return table


def ordering_table(df: pl.DataFrame) -> Table:
    table = Table(title="Largest-area ordering frequency")
    table.add_column("Ordering")
    table.add_column("Frequency", justify="right")
    for row in df.sort("frequency", descending=True).iter_rows(named=True):
        marker = " *" if row["selected"] else ""
        table.add_row(row["ordering"] + marker, f"{row['frequency']:.3f}")
    return table


def rotation_table(report: RotationReport) -> Table:
    table = Table(title="IRS under rotation")
    table.add_column("Rotation")
    table.add_column("Max deviation", justify="right")
    table.add_column("Mean deviation", justify="right")

    by_rotation: Dict[str, list] = {}
    for row in report.rows:
        by_rotation.setdefault(row["rotation"], []).append(row["deviation"])
    for rotation, deviations in by_rotation.items():
        table.add_row(rotation, f"{max(deviations):.2e}", f"{sum(deviations) / len(deviations):.2e}")
    return table
