"""
CSV and JSON score reports.

CSV holds the successfully scored records, one row each. JSON holds every
record, failures included, as the ScoreRecord dictionaries.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import polars as pl

from entity.Corpus import EvalSummary, ScoreRecord
from entity.Measures import MEASURES, MeasureVector
from entity.Score import Label
from model.errors import IoError

logger = logging.getLogger(__name__)

RADIUS_COLUMNS = [f"r{k}" for k in range(1, len(MEASURES) + 1)]
CSV_COLUMNS = ["path"] + [m.value for m in MEASURES] + RADIUS_COLUMNS + ["irs", "verdict"]
CSV_SCHEMA = {
    "path": pl.Utf8,
    **{m.value: pl.Float64 for m in MEASURES},
    **{r: pl.Float64 for r in RADIUS_COLUMNS},
    "irs": pl.Float64,
    "verdict": pl.Utf8,
}


def records_frame(records: Sequence[ScoreRecord]) -> pl.DataFrame:
    """Successfully scored records as a frame with the CSV report columns."""
    rows = []
    for record in records:
        if not record.ok:
            continue
        row = {"path": record.path}
        row.update(record.measure_vector.to_dict())
        row.update(dict(zip(RADIUS_COLUMNS, record.radii)))
        row["irs"] = record.irs
        row["verdict"] = record.verdict.value
        rows.append(row)
    return pl.DataFrame(rows, schema=CSV_SCHEMA)


def format_csv(records: Sequence[ScoreRecord]) -> str:
    return records_frame(records).write_csv()


def format_json(records: Sequence[ScoreRecord], summary: Optional[EvalSummary] = None) -> str:
    """A JSON list of records, or an object with records and summary when a summary is given."""
    payload = [r.to_dict() for r in records]
    if summary is not None:
        payload = {"records": payload, "summary": summary.to_dict()}
    return json.dumps(payload, indent=2) + "\n"


def write_report(records: Sequence[ScoreRecord], path: Path, fmt: Optional[str] = None,
                 summary: Optional[EvalSummary] = None) -> Path:
    """
    Write a score report as UTF-8 with a trailing newline.

    Args:
        records: Records to write, in report order.
        path: Destination file.
        fmt: "csv" or "json"; taken from the file suffix when omitted.
        summary: Detection metrics, embedded in JSON reports only.

    Raises:
        IoError: The file cannot be written.
    """
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "csv").lower()
    if fmt == "csv":
        skipped = sum(1 for r in records if not r.ok)
        if skipped:
            logger.warning("CSV report %s leaves out %d failed records", path, skipped)
        text = format_csv(records)
    elif fmt == "json":
        text = format_json(records, summary)
    else:
        raise ValueError(f"Unknown report format: {fmt}")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise IoError(f"Cannot write report {path}: {e}") from e
    logger.info("Wrote %d records to %s", len(records), path)
    return path


def _records_from_frame(df: pl.DataFrame) -> List[ScoreRecord]:
    records = []
    for row in df.iter_rows(named=True):
        records.append(ScoreRecord(
            path=row["path"],
            measure_vector=MeasureVector.from_dict({m.value: row[m.value] for m in MEASURES}),
            radii=tuple(row[r] for r in RADIUS_COLUMNS),
            irs=row["irs"],
            verdict=Label(row["verdict"]),
        ))
    return records


def read_report(path: Path) -> List[ScoreRecord]:
    """
    Parse a CSV or JSON report back into records.

    CSV rows come back Unlabeled, since the CSV layout carries no label column.
    """
    path = Path(path)
    if not path.exists():
        raise IoError(f"Report not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            with open(path, "r", encoding="utf-8") as f:
                payload = json.load(f)
            if isinstance(payload, dict):
                payload = payload.get("records", [])
            return [ScoreRecord.from_dict(item) for item in payload]

        df = pl.read_csv(path, schema_overrides=CSV_SCHEMA)
    except (OSError, json.JSONDecodeError, pl.exceptions.PolarsError) as e:
        raise IoError(f"Cannot read report {path}: {e}") from e

    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise IoError(f"Report {path} lacks columns: {', '.join(missing)}")
    return _records_from_frame(df)
