from dataclasses import dataclass

import numpy as np


def _frozen(values: np.ndarray, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RgbImage:
    """
    Decoded 8-bit colour image.

    Attributes:
        pixels (np.ndarray): (height, width, 3) array of uint8 channel values.
    """
    pixels: np.ndarray

    def __post_init__(self):
        pixels = _frozen(self.pixels, np.uint8)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError(f"RGB pixels must have shape (H, W, 3), got {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError("RGB image must be at least 1x1")
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class GrayImage:
    """
    Luminance image with values in [0, 1], stored as a (height, width) float64 array.
    """
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ValueError(f"Gray values must be a non-empty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)) or values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("Gray values must be finite and lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True, eq=False)
class FloatField:
    """Unbounded real-valued field with the dimensions of its source image."""
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        if values.ndim != 2:
            raise ValueError(f"Field values must be 2-D, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]
