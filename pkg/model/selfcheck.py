"""
Analytic fixtures run by the `selfcheck` command.

Each fixture recomputes a published or closed-form value with the library
code and compares it against a tolerance.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

from entity.Measures import MEASURES
from entity.Profile import Ordering, RadiiVector
from entity.Score import IrsScore, Label
from model.calibration import (
    PUBLISHED_CORRELATIONS, PUBLISHED_FAKE_CALIBRATED_MEANS, PUBLISHED_ORDERING, adjacency_sum,
    enumerate_cyclic_orders,
)
from model.scoring import classify, pentagon_area

logger = logging.getLogger(__name__)

UNIT_PENTAGON_AREA = 2.5 * math.sin(math.radians(72))
PUBLISHED_REAL_RESCALED_MEANS = (2.31, 1.02, 1.57, 1.11, 1.02)
EXPECTED_ORDERING = "GLCM_C-CED-MS-GLCM_E-VBM"


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    expected: str
    actual: str


def _in_slot_order(values_by_measure: Tuple[float, ...], ordering: Ordering = PUBLISHED_ORDERING) -> RadiiVector:
    return RadiiVector(tuple(values_by_measure[m.index] for m in ordering.slots), ordering)


def _close(name: str, actual: float, expected: float, tolerance: float) -> FixtureResult:
    return FixtureResult(
        name=name,
        passed=abs(actual - expected) <= tolerance,
        expected=f"{expected:.6f} ± {tolerance:g}",
        actual=f"{actual:.6f}",
    )


def check_unit_pentagon() -> FixtureResult:
    area = pentagon_area(RadiiVector((1.0,) * 5)).value
    return _close("unit pentagon area", area, 2.377641, 1e-6)


def check_fake_before_rescaling() -> FixtureResult:
    area = pentagon_area(_in_slot_order(PUBLISHED_FAKE_CALIBRATED_MEANS)).value
    return _close("fake row before re-scaling", area, 1.48, 0.03)


def check_real_after_rescaling() -> FixtureResult:
    area = pentagon_area(_in_slot_order(PUBLISHED_REAL_RESCALED_MEANS)).value
    return _close("real row after re-scaling", area, 4.68, 0.10)


def check_ordering_selection() -> FixtureResult:
    """The enumerated maximum must match a brute force over all 120 permutations."""
    best = max(
        (Ordering(p) for p in itertools.permutations(MEASURES)),
        key=lambda o: adjacency_sum(o, PUBLISHED_CORRELATIONS),
    )
    total = adjacency_sum(PUBLISHED_ORDERING, PUBLISHED_CORRELATIONS)
    passed = (
        len(enumerate_cyclic_orders()) == 12
        and PUBLISHED_ORDERING == best
        and PUBLISHED_ORDERING.label() == EXPECTED_ORDERING
        and abs(total - 1.03) < 1e-9
    )
    return FixtureResult(
        name="ordering from published correlations",
        passed=passed,
        expected=f"{EXPECTED_ORDERING} (sum 1.03)",
        actual=f"{PUBLISHED_ORDERING.label()} (sum {total:.2f})",
    )


def check_rescaled_fake_is_unit() -> FixtureResult:
    weights = [1.0 / f for f in PUBLISHED_FAKE_CALIBRATED_MEANS]
    rescaled = tuple(w * f for w, f in zip(weights, PUBLISHED_FAKE_CALIBRATED_MEANS))
    area = pentagon_area(_in_slot_order(rescaled)).value
    return _close("fake row after re-scaling", area, UNIT_PENTAGON_AREA, 1e-9)


def check_threshold_rule() -> FixtureResult:
    def verdict(value: float) -> Label:
        score = IrsScore(value=value, radii=RadiiVector((0.0,) * 5), triangle_areas=(value, 0, 0, 0, 0))
        return classify(score, 3.0).label

    below, at = verdict(2.999), verdict(3.0)
    return FixtureResult(
        name="threshold rule at 3.0",
        passed=below == Label.FAKE and at == Label.REAL,
        expected="2.999 Fake, 3.0 Real",
        actual=f"2.999 {below.value}, 3.0 {at.value}",
    )


FIXTURES: List[Callable[[], FixtureResult]] = [
    check_unit_pentagon,
    check_fake_before_rescaling,
    check_real_after_rescaling,
    check_ordering_selection,
    check_rescaled_fake_is_unit,
    check_threshold_rule,
]


def run_selfcheck() -> List[FixtureResult]:
    results = []
    for fixture in FIXTURES:
        result = fixture()
        log = logger.info if result.passed else logger.error
        log("%s: %s (expected %s, got %s)", result.name, "pass" if result.passed else "FAIL",
            result.expected, result.actual)
        results.append(result)
    return results
