import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from entity.Profile import RadiiVector


class Label(str, Enum):
    """Ground-truth or predicted image class"""
    REAL = "Real"
    FAKE = "Fake"
    UNLABELED = "Unlabeled"


@dataclass(frozen=True)
class IrsScore:
    """
    Pentagon area of one image's calibrated radii.

    Attributes:
        value (float): The IRS, the sum of the five triangle areas.
        radii (RadiiVector): Calibrated radii in slot order.
        triangle_areas (tuple): Area of each adjacent-radii triangle, slot pairs (1,2)..(5,1).
    """
    value: float
    radii: RadiiVector
    triangle_areas: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "triangle_areas", tuple(float(a) for a in self.triangle_areas))
        if not math.isclose(self.value, sum(self.triangle_areas), rel_tol=0, abs_tol=1e-9):
            raise ValueError("IRS value must equal the sum of its triangle areas")


@dataclass(frozen=True)
class Verdict:
    label: Label
    score: IrsScore
    threshold: float

    def __post_init__(self):
        expected = Label.FAKE if self.score.value < self.threshold else Label.REAL
        if self.label != expected:
            raise ValueError(f"Verdict {self.label.value} contradicts IRS {self.score.value} at threshold {self.threshold}")
