"""
Corpus-level computations: detection metrics, per-model benchmarking, the
ordering-frequency statistic, rotation deviations and the calibration summary.
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import polars as pl
from skimage.transform import rotate

from entity.Corpus import EvalSummary, ScoreRecord
from entity.Image import GrayImage
from entity.Measures import MeasureVector
from entity.Profile import CalibrationProfile, CalibrationStage, CalibrationSummary, Ordering, RadiiVector
from entity.Score import Label
from model.calibration import calibrate_vector, enumerate_cyclic_orders
from model.measures import measure_vector
from model.scoring import irs, pentagon_area

logger = logging.getLogger(__name__)

# Published reference values, reported alongside local runs and never asserted.
PUBLISHED_MODEL_IRS = {"SDM": 2.29, "Dalle2": 1.58, "Midjourney": 2.03, "BigGAN": 1.74, "Real": 4.68}
PUBLISHED_DETECTION = {
    "BigGAN": {"accuracy": 0.85, "f1": 0.87, "recall": 0.95, "precision": 0.81},
    "SDM": {"accuracy": 0.76, "f1": 0.68, "recall": 0.71, "precision": 0.73},
    "Dalle2": {"accuracy": 0.81, "f1": 0.79, "recall": 0.77, "precision": 0.81},
    "Midjourney": {"accuracy": 0.79, "f1": 0.77, "recall": 0.81, "precision": 0.78},
}
PUBLISHED_ORDERING_FREQUENCY = 0.37

AREA_TIE_RTOL = 1e-12


# ===== Detection metrics =====

def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator else None


def detection_metrics(records: Iterable[ScoreRecord]) -> EvalSummary:
    """
    Confusion counts and accuracy/precision/recall/F1 with Fake as the positive class.

    Failed records are left out. Metrics with a zero denominator are None and
    listed in `undefined`.
    """
    tp = fp = tn = fn = 0
    skipped = 0
    for record in records:
        if not record.ok:
            skipped += 1
            continue
        if record.label == Label.UNLABELED:
            raise ValueError(f"Record {record.path} has no Real/Fake label")
        predicted_fake = record.verdict == Label.FAKE
        if record.label == Label.FAKE:
            tp, fn = (tp + 1, fn) if predicted_fake else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if predicted_fake else (fp, tn + 1)
    if skipped:
        logger.warning("Left %d failed records out of the detection metrics", skipped)

    accuracy = _ratio(tp + tn, tp + fp + tn + fn)
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)

    metrics = {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1}
    undefined = tuple(name for name, value in metrics.items() if value is None)
    return EvalSummary(tp=tp, fp=fp, tn=tn, fn=fn, undefined=undefined, **metrics)


# ===== Benchmarking =====

def benchmark_table(records: Iterable[ScoreRecord]) -> pl.DataFrame:
    """Mean, standard deviation and count of IRS per source tag, best first."""
    rows = [{"source": r.source_tag, "irs": r.irs} for r in records if r.ok]
    if not rows:
        return pl.DataFrame(schema={"source": pl.Utf8, "mean_irs": pl.Float64, "std_irs": pl.Float64, "count": pl.UInt32})

    return (
        pl.DataFrame(rows)
        .group_by("source", maintain_order=True)
        .agg(
            pl.col("irs").mean().alias("mean_irs"),
            pl.col("irs").std(ddof=0).alias("std_irs"),
            pl.len().alias("count"),
        )
        .sort(["mean_irs", "source"], descending=[True, False])
    )


# ===== Ordering frequency =====

def _areas_under_all_orders(radii_by_measure: Dict[str, float], orderings: Sequence[Ordering]) -> np.ndarray:
    return np.array([
        pentagon_area(RadiiVector(tuple(radii_by_measure[m.value] for m in o.slots), o)).value
        for o in orderings
    ])


def ordering_frequency(samples: Sequence[MeasureVector], profile: CalibrationProfile) -> pl.DataFrame:
    """
    How often each of the 12 cyclic orders gives a sample its largest pentagon area.

    Ties split the sample's unit weight evenly among the maximizing orders.
    """
    if not samples:
        raise ValueError("ordering_frequency needs at least one sample")

    orderings = enumerate_cyclic_orders()
    tally = np.zeros(len(orderings))
    for v in samples:
        areas = _areas_under_all_orders(calibrate_vector(v, profile).by_measure(), orderings)
        winners = np.isclose(areas, areas.max(), rtol=AREA_TIE_RTOL, atol=0.0)
        tally += winners / winners.sum()

    return pl.DataFrame({
        "ordering": [o.label() for o in orderings],
        "frequency": tally / len(samples),
        "selected": [o == profile.ordering for o in orderings],
    })


# ===== Rotation =====

def relative_deviation(base: float, other: float) -> float:
    if base == 0:
        return abs(other - base)
    return abs(other - base) / abs(base)


def rotation_deviations(img: GrayImage, profile: CalibrationProfile,
                        quarter_turns: Sequence[int] = (1, 2, 3),
                        angles: Sequence[float] = ()) -> List[Dict[str, object]]:
    """
    IRS of a standardized image against its rotated copies.

    Quarter-turns are exact pixel permutations. Free angles are rotated in place
    with bilinear interpolation and replicated borders.
    """
    base = irs(measure_vector(img), profile).value
    rows = []
    for k in quarter_turns:
        rotated = base if k % 4 == 0 else irs(measure_vector(GrayImage(np.rot90(img.values, k))), profile).value
        rows.append({"rotation": f"{90 * k}deg", "kind": "quarter", "base_irs": base,
                     "rotated_irs": rotated, "deviation": relative_deviation(base, rotated)})
    for angle in angles:
        values = rotate(np.array(img.values), angle, resize=False, order=1, mode="edge", preserve_range=True)
        rotated = irs(measure_vector(GrayImage(np.clip(values, 0.0, 1.0))), profile).value
        rows.append({"rotation": f"{angle:g}deg", "kind": "angle", "base_irs": base,
                     "rotated_irs": rotated, "deviation": relative_deviation(base, rotated)})
    return rows


# ===== Calibration summary =====

def _stage_row(vectors: Sequence[MeasureVector], profile: CalibrationProfile,
               stage: CalibrationStage, corpus: str) -> Dict[str, object]:
    radii = np.array([calibrate_vector(v, profile, stage).as_array() for v in vectors])
    mean_radii = RadiiVector(tuple(radii.mean(axis=0)), profile.ordering)
    row = {"stage": "before" if stage is CalibrationStage.INVERTED else "after", "corpus": corpus}
    row.update(mean_radii.by_measure())
    row["irs"] = pentagon_area(mean_radii).value
    return row


def summarize_calibration(real: Sequence[MeasureVector], fake: Sequence[MeasureVector],
                          profile: CalibrationProfile) -> CalibrationSummary:
    """
    Mean radii and IRS of both corpora before and after re-scaling.

    The IRS of a row is the area of the mean radii, so the fake row after
    re-scaling is the regular unit pentagon.
    """
    rows = tuple(
        _stage_row(vectors, profile, stage, corpus)
        for stage in (CalibrationStage.INVERTED, CalibrationStage.RESCALED)
        for corpus, vectors in (("real", real), ("fake", fake))
    )
    before = {r["corpus"]: r["irs"] for r in rows if r["stage"] == "before"}
    after = {r["corpus"]: r["irs"] for r in rows if r["stage"] == "after"}
    return CalibrationSummary(
        rows=rows,
        gap_before=before["real"] - before["fake"],
        gap_after=after["real"] - after["fake"],
    )
