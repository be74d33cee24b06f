import math
from dataclasses import dataclass, astuple, fields
from enum import Enum
from typing import Dict, Tuple

import numpy as np


class Measure(str, Enum):
    """The five image statistics, in canonical index order"""
    GLCM_C = "glcm_contrast"
    GLCM_E = "glcm_energy"
    CED = "ced"
    VBM = "vbm"
    MS = "ms"

    @property
    def index(self) -> int:
        return list(Measure).index(self)

    @property
    def short_name(self) -> str:
        return self.name


MEASURES: Tuple[Measure, ...] = tuple(Measure)

# Measures that grow when a generator smooths an image; their reciprocals enter the pentagon.
INVERTED_MEASURES: Tuple[Measure, ...] = (Measure.GLCM_E, Measure.VBM, Measure.MS)


@dataclass(frozen=True, eq=False)
class LevelImage:
    """Image quantized to `levels` integer gray levels."""
    values: np.ndarray
    levels: int

    def __post_init__(self):
        values = np.array(self.values, dtype=np.int64, copy=True)
        if values.ndim != 2 or values.size == 0:
            raise ValueError(f"Level values must be a non-empty 2-D array, got shape {values.shape}")
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")
        if values.min() < 0 or values.max() >= self.levels:
            raise ValueError(f"Level values must lie in [0, {self.levels - 1}]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class GlcmMatrix:
    """Normalized, symmetric gray-level co-occurrence matrix."""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64, copy=True)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"GLCM must be square, got shape {entries.shape}")
        if entries.min() < 0 or not math.isclose(entries.sum(), 1.0, abs_tol=1e-9):
            raise ValueError("GLCM entries must be non-negative and sum to 1")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def levels(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class EdgeMask:
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=bool, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def edge_count(self) -> int:
        return int(self.values.sum())


@dataclass(frozen=True)
class MeasureVector:
    """
    The five raw statistics of one image.

    Attributes:
        glcm_contrast (float): GLCM contrast, >= 0.
        glcm_energy (float): GLCM energy (angular second moment), in (0, 1].
        ced (float): Canny edge density, in [0, 1].
        vbm (float): Variance of the Laplacian, >= 0.
        ms (float): Mean Fourier magnitude, >= 0.
    """
    glcm_contrast: float
    glcm_energy: float
    ced: float
    vbm: float
    ms: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{f.name} must be finite and non-negative, got {value}")
            object.__setattr__(self, f.name, value)
        if self.ced > 1.0:
            raise ValueError(f"ced must lie in [0, 1], got {self.ced}")
        if not 0.0 < self.glcm_energy <= 1.0 + 1e-12:
            raise ValueError(f"glcm_energy must lie in (0, 1], got {self.glcm_energy}")

    def as_array(self) -> np.ndarray:
        """Values in canonical measure order."""
        return np.array(astuple(self), dtype=np.float64)

    def to_dict(self) -> Dict[str, float]:
        return {m.value: getattr(self, m.value) for m in MEASURES}

    @classmethod
    def from_array(cls, values) -> "MeasureVector":
        values = [float(v) for v in values]
        if len(values) != len(MEASURES):
            raise ValueError(f"Expected {len(MEASURES)} values, got {len(values)}")
        return cls(*values)

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "MeasureVector":
        return cls(**{m.value: float(data[m.value]) for m in MEASURES})
