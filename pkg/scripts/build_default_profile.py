#!/usr/bin/env python3
"""
Regenerate the real-corpus means of the shipped default profile.

The published weights, ordering and threshold are kept; only real_means is
measured, either from a local directory of real photographs or from crops of
the photographs bundled with scikit-image.

Usage:
    python scripts/build_default_profile.py PHOTO_DIR [--workers N] [--output data/default_profile.json]
    python scripts/build_default_profile.py --bundled-photos CROP_DIR [--count 1200]
"""
import argparse
import logging
import sys
from datetime import date
from pathlib import Path
from typing import Iterator, Tuple

import numpy as np
from PIL import Image
from skimage import color, data, img_as_float

# Add project root to Python path if necessary
project_root = str(Path(__file__).resolve().parent.parent)
if project_root not in sys.path:
    sys.path.append(project_root)

from controllers.corpus_controller import CorpusController, ingest_corpus
from entity.Profile import CalibrationProfile
from entity.Score import Label
from model.calibration import (
    DEFAULT_PROFILE_PATH, DEFAULT_RADIUS_CLAMP, DEFAULT_THRESHOLD, MIN_REFERENCE_IMAGES,
    PUBLISHED_FAKE_CALIBRATED_MEANS, PUBLISHED_ORDERING, save_profile,
)
from model.errors import EmptyCorpus, IrsError
from utils.logging_setup import configure_logging

logger = logging.getLogger("build_default_profile")

# Natural photographs shipped inside scikit-image, usable without a download.
BUNDLED_PHOTOS = (
    "camera", "astronaut", "coffee", "chelsea", "rocket", "coins", "moon", "hubble_deep_field",
    "immunohistochemistry", "brick", "grass", "gravel", "clock",
)


# ===== Bundled photographs =====

def bundled_photos() -> Iterator[Tuple[str, np.ndarray]]:
    """Luminance in [0, 1] of every bundled photograph that loads."""
    for name in BUNDLED_PHOTOS:
        try:
            pixels = getattr(data, name)()
        except Exception as e:
            logger.warning("Bundled photograph %s unavailable: %s", name, e)
            continue
        values = img_as_float(pixels)
        if values.ndim == 3:
            values = color.rgb2gray(values[..., :3])
        yield name, np.clip(values, 0.0, 1.0)


def photo_crops(count: int, seed: int = 0, min_side: int = 96) -> Iterator[Tuple[str, np.ndarray]]:
    """
    Square crops of the bundled photographs at random positions and sizes.

    Photographs are visited in turn, so each contributes about count / 13 crops.
    """
    photos = list(bundled_photos())
    if not photos:
        raise EmptyCorpus("No bundled photograph could be loaded")
    rng = np.random.default_rng(seed)
    for k in range(count):
        name, values = photos[k % len(photos)]
        short = min(values.shape)
        side = int(rng.integers(min(min_side, short), short + 1))
        top = int(rng.integers(0, values.shape[0] - side + 1))
        left = int(rng.integers(0, values.shape[1] - side + 1))
        yield f"{name}_{k:05d}", values[top:top + side, left:left + side]


def write_photo_crops(directory: Path, count: int, seed: int = 0) -> Path:
    """Save photo_crops as 8-bit grayscale PNG files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, values in photo_crops(count, seed):
        gray = np.round(np.clip(values, 0.0, 1.0) * 255).astype(np.uint8)
        Image.fromarray(gray).save(directory / f"{name}.png")
    return directory


# ===== Profile =====

def build_profile(photo_dir: Path, workers: int = 1, min_images: int = MIN_REFERENCE_IMAGES,
                  source: str = "") -> CalibrationProfile:
    """
    Published calibration with real_means measured on a photo directory.

    Raises:
        NoImagesFound: The directory holds no supported image.
        IrsError: Fewer than min_images files could be measured.
    """
    photo_dir = Path(photo_dir)
    corpus = ingest_corpus(photo_dir, Label.REAL)
    vectors = [v for v in CorpusController(workers, show_progress=True).measure_corpus(corpus) if v is not None]
    if len(vectors) < max(min_images, 1):
        raise IrsError(f"Only {len(vectors)} images under {photo_dir} could be measured; need {min_images}")

    real_means = np.array([v.as_array() for v in vectors]).mean(axis=0)
    return CalibrationProfile(
        real_means=tuple(real_means),
        fake_calibrated_means=PUBLISHED_FAKE_CALIBRATED_MEANS,
        weights=tuple(1.0 / f for f in PUBLISHED_FAKE_CALIBRATED_MEANS),
        ordering=PUBLISHED_ORDERING,
        threshold=DEFAULT_THRESHOLD,
        radius_clamp=DEFAULT_RADIUS_CLAMP,
        provenance={
            "weights": "reciprocals of the published mean calibrated fake vector",
            "ordering": "maximum adjacent correlation over the published ImageNet correlation table",
            "threshold": "published decision threshold",
            "real_means": f"measured on {len(vectors)} images from {source or photo_dir.name}",
            "real_images": str(len(vectors)),
            "measured_on": date.today().isoformat(),
        },
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("photo_dir", type=Path, nargs="?")
    parser.add_argument("--bundled-photos", type=Path, metavar="CROP_DIR",
                        help="write crops of the scikit-image photographs here and measure them")
    parser.add_argument("--count", type=int, default=1200, help="number of bundled-photo crops")
    parser.add_argument("--min-images", type=int, default=MIN_REFERENCE_IMAGES)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--output", type=Path, default=DEFAULT_PROFILE_PATH)
    args = parser.parse_args()
    if (args.photo_dir is None) == (args.bundled_photos is None):
        parser.error("give either PHOTO_DIR or --bundled-photos")

    configure_logging(logging.INFO)
    try:
        if args.bundled_photos is not None:
            photo_dir = write_photo_crops(args.bundled_photos, args.count)
            source = f"{args.count} crops of {len(BUNDLED_PHOTOS)} scikit-image photographs"
        else:
            photo_dir, source = args.photo_dir, ""
        profile = build_profile(photo_dir, args.workers, args.min_images, source)
    except IrsError as e:
        logger.error("%s", e)
        return 1
    save_profile(profile, args.output)
    logger.info("Wrote %s", args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
