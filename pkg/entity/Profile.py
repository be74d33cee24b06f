import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from entity.Measures import INVERTED_MEASURES, MEASURES, Measure
from model.errors import ProfileFormatError

PROFILE_VERSION = "irs-profile/1"
PROFILE_FIELDS = {
    "version", "real_means", "inversion_mask", "fake_calibrated_means", "weights",
    "ordering", "threshold", "radius_clamp", "provenance",
}


class CalibrationStage(str, Enum):
    """How far a measure vector is taken through calibration"""
    NORMALIZED = "normalized"   # divided by the real-corpus means
    INVERTED = "inverted"       # masked measures replaced by their reciprocals
    RESCALED = "rescaled"       # multiplied by the re-scaling weights


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """5x5 Pearson coefficients, labelled by measure."""
    frame: pd.DataFrame

    def __post_init__(self):
        labels = [m.value for m in MEASURES]
        if list(self.frame.index) != labels or list(self.frame.columns) != labels:
            raise ValueError("Correlation matrix must be labelled with the five measures in canonical order")

    def __getitem__(self, pair: Tuple[Measure, Measure]) -> float:
        a, b = pair
        return float(self.frame.loc[a.value, b.value])

    def to_numpy(self) -> np.ndarray:
        return self.frame.to_numpy(dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "CorrelationMatrix":
        labels = [m.value for m in MEASURES]
        return cls(pd.DataFrame(np.asarray(values, dtype=np.float64), index=labels, columns=labels))


@dataclass(frozen=True)
class Ordering:
    """
    Cyclic assignment of the five measures to pentagon slots m1..m5.

    Stored canonically: GLCM_C in slot 1, and of its two cycle neighbours the one
    with the lower measure index in slot 2.
    """
    slots: Tuple[Measure, ...]

    def __post_init__(self):
        slots = tuple(Measure(s) for s in self.slots)
        if sorted(m.index for m in slots) != list(range(len(MEASURES))):
            raise ValueError(f"Ordering must be a permutation of the five measures, got {slots}")
        object.__setattr__(self, "slots", self.canonicalize(slots))

    @staticmethod
    def canonicalize(slots: Tuple[Measure, ...]) -> Tuple[Measure, ...]:
        start = slots.index(Measure.GLCM_C)
        rotated = slots[start:] + slots[:start]
        if rotated[1].index > rotated[-1].index:
            rotated = (rotated[0],) + tuple(reversed(rotated[1:]))
        return rotated

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(m.index for m in self.slots)

    def adjacent_pairs(self) -> Tuple[Tuple[Measure, Measure], ...]:
        n = len(self.slots)
        return tuple((self.slots[k], self.slots[(k + 1) % n]) for k in range(n))

    def label(self) -> str:
        return "-".join(m.short_name for m in self.slots)

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class RadiiVector:
    """Pentagon radii in slot order. Validation happens where the radii are used."""
    values: Tuple[float, ...]
    ordering: Optional[Ordering] = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(MEASURES):
            raise ValueError(f"Expected {len(MEASURES)} radii, got {len(self.values)}")

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)

    def by_measure(self) -> Dict[str, float]:
        """Radii keyed by measure name (requires the ordering)."""
        if self.ordering is None:
            raise ValueError("Radii carry no ordering")
        return {m.value: r for m, r in zip(self.ordering.slots, self.values)}


def _measure_map(values: Iterable[float]) -> Dict[str, float]:
    return {m.value: float(v) for m, v in zip(MEASURES, values)}


def _read_measure_map(document: Dict[str, Any], key: str) -> Tuple[float, ...]:
    data = document[key]
    if not isinstance(data, dict) or set(data) != {m.value for m in MEASURES}:
        raise ProfileFormatError(f"'{key}' must map exactly the five measure names to numbers")
    try:
        return tuple(float(data[m.value]) for m in MEASURES)
    except (TypeError, ValueError) as e:
        raise ProfileFormatError(f"'{key}' contains a non-numeric value: {e}") from e


@dataclass(frozen=True)
class CalibrationProfile:
    """
    Everything needed to turn a MeasureVector into an IRS.

    Attributes:
        real_means (tuple): Raw-measure means of the real corpus, canonical measure order.
        fake_calibrated_means (tuple): Mean normalized+inverted fake vector.
        weights (tuple): Re-scaling weights, the reciprocals of fake_calibrated_means.
        ordering (Ordering): Pentagon slot assignment.
        threshold (float): Decision threshold; IRS below it means Fake.
        radius_clamp (float): Upper bound on every calibrated radius.
        inversion_mask (tuple): Measures replaced by their reciprocals.
        provenance (dict): Free-form notes on how the profile was built.
        version (str): Document format tag.
    """
    real_means: Tuple[float, ...]
    fake_calibrated_means: Tuple[float, ...]
    weights: Tuple[float, ...]
    ordering: Ordering
    threshold: float = 3.0
    radius_clamp: float = 3.0
    inversion_mask: Tuple[Measure, ...] = INVERTED_MEASURES
    provenance: Dict[str, str] = field(default_factory=dict)
    version: str = PROFILE_VERSION

    def __post_init__(self):
        for name in ("real_means", "fake_calibrated_means", "weights"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != len(MEASURES):
                raise ValueError(f"{name} needs {len(MEASURES)} values, got {len(values)}")
            if not all(math.isfinite(v) and v > 0 for v in values):
                raise ValueError(f"{name} must be finite and positive, got {values}")
            object.__setattr__(self, name, values)

        for w, f in zip(self.weights, self.fake_calibrated_means):
            if not math.isclose(w * f, 1.0, rel_tol=0, abs_tol=1e-9):
                raise ValueError("weights must be the reciprocals of fake_calibrated_means")

        mask = tuple(Measure(m) for m in self.inversion_mask)
        if set(mask) != set(INVERTED_MEASURES):
            raise ValueError(f"inversion_mask is fixed to {[m.value for m in INVERTED_MEASURES]}")
        object.__setattr__(self, "inversion_mask", tuple(m for m in MEASURES if m in mask))

        if not math.isfinite(self.threshold) or self.threshold <= 0:
            raise ValueError(f"threshold must be > 0, got {self.threshold}")
        if not math.isfinite(self.radius_clamp) or self.radius_clamp <= 0:
            raise ValueError(f"radius_clamp must be > 0, got {self.radius_clamp}")
        if self.version != PROFILE_VERSION:
            raise ValueError(f"Unsupported profile version: {self.version}")
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "radius_clamp", float(self.radius_clamp))
        object.__setattr__(self, "provenance", {str(k): str(v) for k, v in self.provenance.items()})

    def with_threshold(self, threshold: float) -> "CalibrationProfile":
        return CalibrationProfile(
            real_means=self.real_means,
            fake_calibrated_means=self.fake_calibrated_means,
            weights=self.weights,
            ordering=self.ordering,
            threshold=threshold,
            radius_clamp=self.radius_clamp,
            inversion_mask=self.inversion_mask,
            provenance=self.provenance,
        )

    def to_document(self) -> Dict[str, Any]:
        """JSON-ready document mirroring the profile fields."""
        return {
            "version": self.version,
            "real_means": _measure_map(self.real_means),
            "inversion_mask": [m.value for m in self.inversion_mask],
            "fake_calibrated_means": _measure_map(self.fake_calibrated_means),
            "weights": _measure_map(self.weights),
            "ordering": [m.value for m in self.ordering.slots],
            "threshold": self.threshold,
            "radius_clamp": self.radius_clamp,
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "CalibrationProfile":
        if not isinstance(document, dict):
            raise ProfileFormatError("Profile document must be a JSON object")
        unknown = set(document) - PROFILE_FIELDS
        if unknown:
            raise ProfileFormatError(f"Unknown profile fields: {', '.join(sorted(unknown))}")
        missing = (PROFILE_FIELDS - {"provenance"}) - set(document)
        if missing:
            raise ProfileFormatError(f"Missing profile fields: {', '.join(sorted(missing))}")
        if document["version"] != PROFILE_VERSION:
            raise ProfileFormatError(
                f"Unsupported profile version {document['version']!r}, expected {PROFILE_VERSION!r}"
            )

        try:
            return cls(
                real_means=_read_measure_map(document, "real_means"),
                fake_calibrated_means=_read_measure_map(document, "fake_calibrated_means"),
                weights=_read_measure_map(document, "weights"),
                ordering=Ordering(tuple(Measure(m) for m in document["ordering"])),
                threshold=float(document["threshold"]),
                radius_clamp=float(document["radius_clamp"]),
                inversion_mask=tuple(Measure(m) for m in document["inversion_mask"]),
                provenance=document.get("provenance") or {},
            )
        except ProfileFormatError:
            raise
        except (TypeError, ValueError) as e:
            raise ProfileFormatError(f"Invalid profile document: {e}") from e


@dataclass(frozen=True)
class CalibrationSummary:
    """
    Mean radii and IRS of the real and fake corpora before and after re-scaling.

    Attributes:
        rows (tuple): One dict per (stage, corpus) with per-measure mean radii and the IRS.
        gap_before (float): Real minus fake IRS at the inverted stage.
        gap_after (float): Real minus fake IRS after re-scaling.
    """
    rows: Tuple[Dict[str, Any], ...]
    gap_before: float
    gap_after: float
