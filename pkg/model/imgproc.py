"""
Image decoding and the pixel-level primitives the five measures are built on.

Every function is pure: inputs are never modified and no state is shared,
so callers may run them from many threads at once.
"""
import io
import math
import struct

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage
from skimage.transform import resize

from entity.Image import FloatField, GrayImage, RgbImage
from model.errors import CorruptFile, ImageTooSmall, InvalidSigma, UnsupportedFormat

SUPPORTED_FORMATS = {"PNG", "JPEG", "BMP"}
SUPPORTED_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}

# Errors Pillow raises on damaged or hostile files
DECODE_ERRORS = (OSError, SyntaxError, ValueError, EOFError, struct.error, Image.DecompressionBombError)

WORKING_SIZE = 256
MIN_SIZE = 16

# BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

LAPLACIAN_KERNEL = np.array([
    [0.0, 1.0, 0.0],
    [1.0, -4.0, 1.0],
    [0.0, 1.0, 0.0],
])


def decode_image(data: bytes) -> RgbImage:
    """
    Decode PNG, JPEG or BMP bytes into an 8-bit RGB image.

    Raises:
        UnsupportedFormat: The bytes are not one of the supported formats.
        CorruptFile: The header is recognised but the pixel data cannot be read.
    """
    try:
        img = Image.open(io.BytesIO(data))
    except UnidentifiedImageError as e:
        raise UnsupportedFormat("Not a PNG, JPEG or BMP image") from e
    except DECODE_ERRORS as e:
        raise CorruptFile(f"Cannot read image header: {e}") from e

    with img:
        if img.format not in SUPPORTED_FORMATS:
            raise UnsupportedFormat(f"Unsupported image format: {img.format}")
        try:
            img.load()
            rgb = img.convert("RGB")
        except DECODE_ERRORS as e:
            raise CorruptFile(f"Cannot decode {img.format} image: {e}") from e
        return RgbImage(np.asarray(rgb, dtype=np.uint8))


def to_grayscale(img: RgbImage) -> GrayImage:
    """BT.601 luma scaled to [0, 1]."""
    luma = img.pixels.astype(np.float64) @ LUMA_WEIGHTS / 255.0
    return GrayImage(np.clip(luma, 0.0, 1.0))


def standardize(img: GrayImage, size: int = WORKING_SIZE) -> GrayImage:
    """
    Bring an image to the fixed working resolution.

    Bilinear resize so the shorter side equals `size`, then a centered crop to
    size x size. Images already at the working size are returned unchanged.
    """
    height, width = img.shape
    if min(height, width) < MIN_SIZE:
        raise ImageTooSmall(f"Image is {width}x{height}; both sides must be at least {MIN_SIZE} pixels")
    if (height, width) == (size, size):
        return img

    scale = size / min(height, width)
    new_height = max(size, int(round(height * scale)))
    new_width = max(size, int(round(width * scale)))
    values = img.values
    if (new_height, new_width) != (height, width):
        values = resize(
            values, (new_height, new_width), order=1, mode="edge",
            anti_aliasing=False, preserve_range=True,
        )

    top = (new_height - size) // 2
    left = (new_width - size) // 2
    cropped = values[top:top + size, left:left + size]
    return GrayImage(np.clip(cropped, 0.0, 1.0))


def gaussian_kernel_radius(sigma: float) -> int:
    return int(math.ceil(3.0 * sigma))


def gaussian_blur(img: GrayImage, sigma: float) -> GrayImage:
    """Separable Gaussian blur, kernel radius ceil(3*sigma), replicated borders."""
    if not sigma > 0:
        raise InvalidSigma(f"sigma must be > 0, got {sigma}")
    blurred = ndimage.gaussian_filter(
        img.values, sigma=sigma, mode="nearest", radius=gaussian_kernel_radius(sigma),
    )
    return GrayImage(np.clip(blurred, 0.0, 1.0))


def laplacian_filter(img: GrayImage) -> FloatField:
    return FloatField(ndimage.convolve(img.values, LAPLACIAN_KERNEL, mode="nearest"))


def dft2_magnitude(img: GrayImage) -> FloatField:
    """Magnitude of the unnormalized forward 2-D DFT."""
    return FloatField(np.abs(np.fft.fft2(img.values)))


def load_gray(data: bytes) -> GrayImage:
    """Decode, convert to luminance and standardize in one step."""
    return standardize(to_grayscale(decode_image(data)))
