"""
Calibration: reference means, inversion, pentagon ordering and re-scaling weights.
"""
import itertools
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from entity.Measures import INVERTED_MEASURES, MEASURES, Measure, MeasureVector
from entity.Profile import CalibrationProfile, CalibrationStage, CorrelationMatrix, Ordering, RadiiVector
from model.errors import (
    DegenerateColumn, EmptyCorpus, MissingReferenceFile, ProfileFormatError, TooFewSamples, ZeroFakeMean,
    ZeroRealMean,
)
from utils.profile_cache import file_cache

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_PATH = Path(__file__).resolve().parent.parent / "data" / "default_profile.json"

DEFAULT_THRESHOLD = 3.0
DEFAULT_RADIUS_CLAMP = 3.0
INVERSION_FLOOR = 1e-9
MIN_REFERENCE_IMAGES = 1000

# Published correlations between the raw measures of 10,000 ImageNet photographs.
PUBLISHED_CORRELATIONS = CorrelationMatrix.from_array([
    # GLCM_C  GLCM_E   CED    VBM    MS
    [1.00, -0.13, 0.76, 0.20, 0.14],    # GLCM_C
    [-0.13, 1.00, -0.28, 0.21, -0.35],  # GLCM_E
    [0.76, -0.28, 1.00, 0.05, 0.21],    # CED
    [0.20, 0.21, 0.05, 1.00, -0.07],    # VBM
    [0.14, -0.35, 0.21, -0.07, 1.00],   # MS
])

# Published mean normalized+inverted fake vector, canonical measure order.
PUBLISHED_FAKE_CALIBRATED_MEANS = (0.43, 0.97, 0.64, 0.90, 0.98)


# ===== Correlations and ordering =====

def correlation_matrix(samples: Sequence[MeasureVector]) -> CorrelationMatrix:
    """
    Pearson correlations between the raw measures.

    Raises:
        TooFewSamples: Fewer than three vectors.
        DegenerateColumn: A measure is constant across the samples.
    """
    if len(samples) < 3:
        raise TooFewSamples(f"Correlations need at least 3 samples, got {len(samples)}")

    frame = pd.DataFrame([s.as_array() for s in samples], columns=[m.value for m in MEASURES])
    flat = [name for name, std in frame.std(ddof=0).items() if not std > 0]
    if flat:
        raise DegenerateColumn(f"Measures with zero variance: {', '.join(flat)}")

    corr = frame.corr(method="pearson").to_numpy()
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix.from_array(corr)


def enumerate_cyclic_orders() -> List[Ordering]:
    """The 12 distinct cyclic arrangements of the five measures, canonical and sorted."""
    others = [m for m in MEASURES if m is not Measure.GLCM_C]
    orderings = {Ordering((Measure.GLCM_C,) + perm) for perm in itertools.permutations(others)}
    return sorted(orderings, key=lambda o: o.indices)


def adjacency_sum(ordering: Ordering, corr: CorrelationMatrix) -> float:
    return sum(corr[a, b] for a, b in ordering.adjacent_pairs())


def select_ordering(corr: CorrelationMatrix) -> Ordering:
    """
    Cycle maximizing the summed signed correlation of adjacent radii.

    Ties go to the first cycle in canonical order.
    """
    best, best_sum = None, -np.inf
    for ordering in enumerate_cyclic_orders():
        total = adjacency_sum(ordering, corr)
        if total > best_sum:
            best, best_sum = ordering, total
    logger.debug("Selected ordering %s (adjacency sum %.4f)", best, best_sum)
    return best


PUBLISHED_ORDERING = select_ordering(PUBLISHED_CORRELATIONS)


# ===== Calibration =====

def _calibrate_array(values: np.ndarray, real_means: np.ndarray, stage: CalibrationStage,
                     weights: Optional[np.ndarray] = None) -> np.ndarray:
    """Normalize rows of raw measures and, depending on the stage, invert and re-scale them."""
    calibrated = values / real_means
    if stage is CalibrationStage.NORMALIZED:
        return calibrated

    mask = np.array([m in INVERTED_MEASURES for m in MEASURES])
    calibrated[..., mask] = 1.0 / np.maximum(calibrated[..., mask], INVERSION_FLOOR)
    if stage is CalibrationStage.RESCALED and weights is not None:
        calibrated = calibrated * weights
    return calibrated


def compute_profile(real: Sequence[MeasureVector], fake: Sequence[MeasureVector],
                    threshold: float = DEFAULT_THRESHOLD,
                    radius_clamp: float = DEFAULT_RADIUS_CLAMP,
                    ordering: Optional[Ordering] = None,
                    provenance: Optional[Dict[str, str]] = None) -> CalibrationProfile:
    """
    Build a calibration profile from real and fake corpora.

    The real means normalize every vector, GLCM energy, VBM and MS are inverted,
    and the weights re-scale the mean calibrated fake vector to all ones. The
    ordering comes from the real corpus correlations unless given.

    Raises:
        EmptyCorpus: Either corpus is empty.
        ZeroRealMean: A real-corpus mean is not positive.
        ZeroFakeMean: A calibrated fake-corpus mean is zero or not finite.
    """
    if not real or not fake:
        raise EmptyCorpus(f"Calibration needs real and fake samples (got {len(real)} real, {len(fake)} fake)")

    real_values = np.array([v.as_array() for v in real])
    fake_values = np.array([v.as_array() for v in fake])

    real_means = real_values.mean(axis=0)
    zero = [m.value for m, mean in zip(MEASURES, real_means) if not mean > 0]
    if zero:
        raise ZeroRealMean(f"Real-corpus means must be positive; zero for: {', '.join(zero)}")

    fake_calibrated = _calibrate_array(fake_values, real_means, CalibrationStage.INVERTED)
    fake_means = fake_calibrated.mean(axis=0)
    degenerate = [m.value for m, mean in zip(MEASURES, fake_means) if not (np.isfinite(mean) and mean > 0)]
    if degenerate:
        raise ZeroFakeMean(
            f"Fake-corpus calibrated means must be positive and finite; degenerate for: {', '.join(degenerate)}"
        )
    weights = 1.0 / fake_means

    if ordering is None:
        try:
            ordering = select_ordering(correlation_matrix(real))
        except (TooFewSamples, DegenerateColumn) as e:
            logger.warning("Cannot derive ordering from the real corpus (%s); using the published ordering", e)
            ordering = PUBLISHED_ORDERING

    profile = CalibrationProfile(
        real_means=tuple(real_means),
        fake_calibrated_means=tuple(fake_means),
        weights=tuple(weights),
        ordering=ordering,
        threshold=threshold,
        radius_clamp=radius_clamp,
        provenance=provenance or {"real_images": str(len(real)), "fake_images": str(len(fake))},
    )
    logger.info("Computed profile: weights=%s ordering=%s", np.round(weights, 4).tolist(), ordering)
    return profile


def calibrate_vector(v: MeasureVector, profile: CalibrationProfile,
                     stage: CalibrationStage = CalibrationStage.RESCALED) -> RadiiVector:
    """
    Pentagon radii of one measure vector, in the profile's slot order.

    Each radius is clamped to [0, radius_clamp]; masked measures are inverted
    with a denominator floor, so degenerate images still produce finite radii.
    """
    calibrated = _calibrate_array(
        v.as_array(), np.array(profile.real_means), stage, np.array(profile.weights),
    )
    clamped = np.clip(calibrated, 0.0, profile.radius_clamp)
    if np.any(clamped != calibrated):
        logger.debug("Clamped radii %s to %s", calibrated.tolist(), profile.radius_clamp)
    return RadiiVector(tuple(clamped[m.index] for m in profile.ordering.slots), profile.ordering)


# ===== Profile files =====

def save_profile(profile: CalibrationProfile, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(profile.to_document(), f, indent=2)
        f.write("\n")


@file_cache(timeout=300)
def load_profile(path: Path) -> CalibrationProfile:
    """
    Read a profile document.

    Raises:
        MissingReferenceFile: The file does not exist.
        ProfileFormatError: The file is not a valid profile document.
    """
    path = Path(path)
    if not path.exists():
        raise MissingReferenceFile(f"Profile file not found at {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ProfileFormatError(f"Profile {path} is not valid JSON: {e}") from e
    return CalibrationProfile.from_document(document)


def reference_image_count(profile: CalibrationProfile) -> int:
    """Number of real images behind the profile's real_means, 0 when unrecorded."""
    try:
        return int(profile.provenance.get("real_images", 0))
    except ValueError:
        return 0


def default_profile() -> CalibrationProfile:
    """
    The shipped profile: published weights, ordering and threshold.

    Logs a warning when its real_means rest on fewer than MIN_REFERENCE_IMAGES
    photographs; scripts/build_default_profile.py regenerates them.
    """
    profile = load_profile(DEFAULT_PROFILE_PATH)
    count = reference_image_count(profile)
    if count < MIN_REFERENCE_IMAGES:
        logger.warning(
            "Default profile real_means rest on %d measured images (need %d); scores are provisional. "
            "Run scripts/build_default_profile.py to regenerate them", count, MIN_REFERENCE_IMAGES,
        )
    return profile
