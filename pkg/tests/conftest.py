import io
import struct
import sys
import zlib
from pathlib import Path

import numpy as np
import pytest
from PIL import Image
from scipy import ndimage

# Add project root to Python path if necessary
project_root = str(Path(__file__).resolve().parent.parent)
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from entity.Image import GrayImage  # noqa: E402
from entity.Measures import MeasureVector  # noqa: E402
from entity.Profile import CalibrationProfile  # noqa: E402
from model.calibration import PUBLISHED_FAKE_CALIBRATED_MEANS, PUBLISHED_ORDERING  # noqa: E402

REAL_MEANS = (10.0, 0.02, 0.1, 0.01, 5.0)


def texture_values(seed: int, size: int = 256, smooth: float = 1.5) -> np.ndarray:
    """Smoothed noise with a few sharp-edged patches, rescaled to [0, 1]."""
    rng = np.random.default_rng(seed)
    values = ndimage.gaussian_filter(rng.random((size, size)), smooth)
    for _ in range(6):
        top, left = rng.integers(0, size - size // 4, 2)
        height, width = rng.integers(size // 16, size // 4, 2)
        values[top:top + height, left:left + width] += rng.uniform(-0.3, 0.3)
    values -= values.min()
    return values / values.max()


def png_bytes(values: np.ndarray, fmt: str = "PNG") -> bytes:
    gray = np.round(np.clip(values, 0, 1) * 255).astype(np.uint8)
    buffer = io.BytesIO()
    Image.fromarray(np.stack([gray] * 3, axis=-1)).save(buffer, fmt)
    return buffer.getvalue()


def png_chunk(kind: bytes, payload: bytes) -> bytes:
    return struct.pack(">I", len(payload)) + kind + payload + struct.pack(">I", zlib.crc32(kind + payload))


@pytest.fixture
def oversized_png() -> bytes:
    """A tiny PNG whose header claims 20000x20000 RGB pixels."""
    header = struct.pack(">IIBBBBB", 20000, 20000, 8, 2, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + png_chunk(b"IHDR", header) + png_chunk(b"IEND", b"")


@pytest.fixture
def make_texture():
    def make(seed: int = 0, size: int = 256, smooth: float = 1.5) -> GrayImage:
        return GrayImage(texture_values(seed, size, smooth))
    return make


@pytest.fixture
def write_image():
    def write(path: Path, values: np.ndarray, fmt: str = "PNG") -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(png_bytes(values, fmt))
        return path
    return write


@pytest.fixture
def image_dir(tmp_path, write_image):
    """A directory of four 64x64 texture PNGs."""
    def make(name: str = "images", count: int = 4, seed: int = 0, size: int = 64) -> Path:
        directory = tmp_path / name
        for k in range(count):
            write_image(directory / f"img_{k:02d}.png", texture_values(seed + k, size, smooth=1.0))
        return directory
    return make


@pytest.fixture
def published_profile() -> CalibrationProfile:
    """Published weights and ordering over fixed, round real-corpus means."""
    return CalibrationProfile(
        real_means=REAL_MEANS,
        fake_calibrated_means=PUBLISHED_FAKE_CALIBRATED_MEANS,
        weights=tuple(1.0 / f for f in PUBLISHED_FAKE_CALIBRATED_MEANS),
        ordering=PUBLISHED_ORDERING,
    )


@pytest.fixture
def real_vector() -> MeasureVector:
    return MeasureVector.from_array(REAL_MEANS)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("IRS_PROFILE", "IRS_WORKERS", "IRS_LOG_LEVEL", "IRS_CONFIG"):
        monkeypatch.delenv(name, raising=False)
