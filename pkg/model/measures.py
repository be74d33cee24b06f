"""
The five statistical measures of a standardized grayscale image.

GLCM contrast and energy, Canny edge density, variance of the Laplacian and
the mean Fourier magnitude.
"""
import logging
from typing import Sequence, Tuple

import numpy as np
from scipy import ndimage
from skimage.feature import graycoprops

from entity.Image import GrayImage
from entity.Measures import EdgeMask, GlcmMatrix, LevelImage, MeasureVector
from model.errors import InvalidLevels, NoValidPairs
from model.imgproc import dft2_magnitude, gaussian_blur, laplacian_filter

logger = logging.getLogger(__name__)

GLCM_LEVELS = 64
# The four unit-distance directions; with symmetric counting the set is closed under 90° rotation.
GLCM_OFFSETS: Tuple[Tuple[int, int], ...] = ((1, 0), (0, 1), (1, 1), (1, -1))

CANNY_SIGMA = 1.4
CANNY_LOW_RATIO = 0.10
CANNY_HIGH_RATIO = 0.20

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


# ===== GLCM =====

def quantize(img: GrayImage, levels: int) -> LevelImage:
    """Map [0, 1] luminance to integer levels: min(floor(v * levels), levels - 1)."""
    if not 2 <= levels <= 256:
        raise InvalidLevels(f"levels must lie in [2, 256], got {levels}")
    quantized = np.floor(img.values * levels).astype(np.int64)
    return LevelImage(np.clip(quantized, 0, levels - 1), levels)


def _offset_views(values: np.ndarray, dx: int, dy: int) -> Tuple[np.ndarray, np.ndarray]:
    """Aligned (reference, neighbour) views for the offset (dx, dy); x runs along columns."""
    height, width = values.shape
    rows = slice(max(0, -dy), height - max(0, dy))
    cols = slice(max(0, -dx), width - max(0, dx))
    shifted_rows = slice(rows.start + dy, rows.stop + dy)
    shifted_cols = slice(cols.start + dx, cols.stop + dx)
    return values[rows, cols], values[shifted_rows, shifted_cols]


def glcm(img: LevelImage, offsets: Sequence[Tuple[int, int]] = GLCM_OFFSETS) -> GlcmMatrix:
    """
    Symmetric co-occurrence matrix summed over all offsets and normalized to 1.

    Every pair is counted in both directions, so the result is symmetric.

    Raises:
        NoValidPairs: An offset produces no pixel pair inside the image.
    """
    if not offsets:
        raise NoValidPairs("At least one offset is required")

    n = img.levels
    counts = np.zeros(n * n, dtype=np.int64)
    for dx, dy in offsets:
        if abs(dx) >= img.width or abs(dy) >= img.height:
            raise NoValidPairs(f"Offset ({dx}, {dy}) yields no pairs in a {img.width}x{img.height} image")
        reference, neighbour = _offset_views(img.values, dx, dy)
        counts += np.bincount((reference * n + neighbour).ravel(), minlength=n * n)

    matrix = counts.reshape(n, n)
    matrix = matrix + matrix.T
    return GlcmMatrix(matrix / matrix.sum())


def _glcm_property(P: GlcmMatrix, prop: str) -> float:
    return float(graycoprops(P.entries[:, :, np.newaxis, np.newaxis], prop)[0, 0])


def glcm_energy(P: GlcmMatrix) -> float:
    """Sum of squared entries (the angular second moment)."""
    return _glcm_property(P, "ASM")


def glcm_contrast(P: GlcmMatrix) -> float:
    return _glcm_property(P, "contrast")


# ===== Canny =====

def _non_maximum_suppression(magnitude: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """
    Keep pixels that are local maxima along the quantized gradient direction.

    A pixel survives if it is strictly above its neighbour behind it and not below
    the neighbour ahead of it, so a flat two-pixel ridge keeps exactly one pixel.
    """
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    padded = np.pad(magnitude, 1, mode="constant")
    height, width = magnitude.shape

    def neighbour(dr: int, dc: int) -> np.ndarray:
        return padded[1 + dr:1 + dr + height, 1 + dc:1 + dc + width]

    # (behind, ahead) offsets in (row, col) for the four directions; rows grow downwards.
    directions = [
        ((angle < 22.5) | (angle >= 157.5), (0, -1), (0, 1)),
        ((angle >= 22.5) & (angle < 67.5), (-1, -1), (1, 1)),
        ((angle >= 67.5) & (angle < 112.5), (-1, 0), (1, 0)),
        ((angle >= 112.5) & (angle < 157.5), (-1, 1), (1, -1)),
    ]

    keep = np.zeros_like(magnitude, dtype=bool)
    for selector, behind, ahead in directions:
        local_max = (magnitude > neighbour(*behind)) & (magnitude >= neighbour(*ahead))
        keep |= selector & local_max
    return keep


def canny_edges(img: GrayImage) -> EdgeMask:
    """
    Canny detector: Gaussian smoothing, Sobel gradients, non-maximum suppression
    and double-threshold hysteresis relative to the strongest gradient.
    """
    smoothed = gaussian_blur(img, CANNY_SIGMA).values
    gx = ndimage.sobel(smoothed, axis=1, mode="nearest")
    gy = ndimage.sobel(smoothed, axis=0, mode="nearest")
    magnitude = np.hypot(gx, gy)

    max_magnitude = magnitude.max()
    if max_magnitude <= 0:
        return EdgeMask(np.zeros_like(magnitude, dtype=bool))

    candidates = _non_maximum_suppression(magnitude, gx, gy) & (magnitude > 0)
    weak = candidates & (magnitude >= CANNY_LOW_RATIO * max_magnitude)
    strong = candidates & (magnitude >= CANNY_HIGH_RATIO * max_magnitude)

    # Weak pixels survive when their 8-connected component touches a strong pixel.
    labels, count = ndimage.label(weak, structure=EIGHT_CONNECTED)
    if count == 0:
        return EdgeMask(strong)
    connected = np.zeros(count + 1, dtype=bool)
    connected[np.unique(labels[strong])] = True
    connected[0] = False
    return EdgeMask(connected[labels])


def canny_edge_density(img: GrayImage) -> Tuple[EdgeMask, float]:
    """Edge mask and the fraction of edge pixels."""
    mask = canny_edges(img)
    return mask, mask.edge_count / mask.values.size


# ===== Blur and spectrum =====

def variance_blur_measure(img: GrayImage) -> float:
    """Population variance of the Laplacian-filtered image."""
    return float(np.var(laplacian_filter(img).values))


def mean_spectrum(img: GrayImage) -> float:
    """Mean DFT magnitude over the full spectrum, DC term included."""
    return float(np.mean(dft2_magnitude(img).values))


def measure_vector(img: GrayImage) -> MeasureVector:
    P = glcm(quantize(img, GLCM_LEVELS), GLCM_OFFSETS)
    _, ced = canny_edge_density(img)
    vector = MeasureVector(
        glcm_contrast=glcm_contrast(P),
        glcm_energy=glcm_energy(P),
        ced=ced,
        vbm=variance_blur_measure(img),
        ms=mean_spectrum(img),
    )
    logger.debug("Measures: %s", vector)
    return vector
