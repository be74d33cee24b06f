import math

import numpy as np

from entity.Measures import MeasureVector
from entity.Profile import CalibrationProfile, RadiiVector
from entity.Score import IrsScore, Label, Verdict
from model.calibration import calibrate_vector
from model.errors import InvalidThreshold, NegativeRadius, NonFiniteRadius

# Equal central angles of the pentagon.
CENTRAL_ANGLE = 2.0 * math.pi / 5.0
TRIANGLE_FACTOR = 0.5 * math.sin(CENTRAL_ANGLE)


def pentagon_area(radii: RadiiVector) -> IrsScore:
    """
    Area of the pentagon spanned by five radii at 72° spacing.

    Sum over the adjacent slot pairs (1,2), (2,3), (3,4), (4,5), (5,1) of
    m_a * m_b / 2 * sin(72°).
    """
    values = radii.as_array()
    if not np.all(np.isfinite(values)):
        raise NonFiniteRadius(f"Radii must be finite, got {radii.values}")
    if np.any(values < 0):
        raise NegativeRadius(f"Radii must be non-negative, got {radii.values}")

    areas = TRIANGLE_FACTOR * values * np.roll(values, -1)
    triangle_areas = tuple(float(a) for a in areas)
    return IrsScore(value=math.fsum(triangle_areas), radii=radii, triangle_areas=triangle_areas)


def irs(v: MeasureVector, profile: CalibrationProfile) -> IrsScore:
    """
    Image Realism Score of one measure vector.

    The per-triangle weights w_a * w_b are folded into the radii, which gives
    the same area since w_a*w_b*A(m_a, m_b) = A(w_a*m_a, w_b*m_b).
    """
    return pentagon_area(calibrate_vector(v, profile))


def classify(score: IrsScore, threshold: float) -> Verdict:
    """Fake if the IRS is strictly below the threshold, Real otherwise."""
    if not (math.isfinite(threshold) and threshold > 0):
        raise InvalidThreshold(f"threshold must be > 0, got {threshold}")
    label = Label.FAKE if score.value < threshold else Label.REAL
    return Verdict(label=label, score=score, threshold=threshold)
