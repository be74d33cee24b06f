import numpy as np
import pytest

from entity.Image import GrayImage
from entity.Measures import LevelImage
from model.errors import InvalidLevels, NoValidPairs
from model.measures import (
    GLCM_LEVELS, GLCM_OFFSETS, canny_edge_density, canny_edges, glcm, glcm_contrast, glcm_energy, mean_spectrum,
    measure_vector, quantize, variance_blur_measure,
)
from model.imgproc import gaussian_blur


def naive_glcm(values: np.ndarray, levels: int, offsets) -> np.ndarray:
    counts = np.zeros((levels, levels))
    height, width = values.shape
    for dx, dy in offsets:
        for y in range(height):
            for x in range(width):
                x2, y2 = x + dx, y + dy
                if 0 <= x2 < width and 0 <= y2 < height:
                    i, j = values[y, x], values[y2, x2]
                    counts[i, j] += 1
                    counts[j, i] += 1
    return counts / counts.sum()


def naive_mean_spectrum(values: np.ndarray) -> float:
    rows, cols = values.shape
    y = np.arange(rows)[:, None]
    x = np.arange(cols)[None, :]
    total = 0.0
    for u in range(rows):
        for v in range(cols):
            total += abs(np.sum(values * np.exp(-2j * np.pi * (u * y / rows + v * x / cols))))
    return total / (rows * cols)


def checkerboard(size: int, block: int) -> np.ndarray:
    idx = np.arange(size) // block
    return ((idx[:, None] + idx[None, :]) % 2).astype(np.float64)


# ===== Quantization and GLCM =====

def test_quantize_maps_extremes():
    levels = quantize(GrayImage(np.array([[0.0, 0.5, 0.999, 1.0]])), 64)
    assert levels.values.tolist() == [[0, 32, 63, 63]]
    assert levels.levels == 64


@pytest.mark.parametrize("levels", [1, 257])
def test_quantize_rejects_level_counts(levels):
    with pytest.raises(InvalidLevels):
        quantize(GrayImage(np.zeros((4, 4))), levels)


def test_glcm_matches_naive_pair_count():
    rng = np.random.default_rng(11)
    for _ in range(100):
        values = rng.integers(0, 8, (8, 8))
        P = glcm(LevelImage(values, 8), GLCM_OFFSETS)
        assert np.array_equal(P.entries, naive_glcm(values, 8, GLCM_OFFSETS))


def test_glcm_is_symmetric_and_normalized():
    values = np.random.default_rng(2).integers(0, 16, (20, 30))
    P = glcm(LevelImage(values, 16)).entries
    assert np.allclose(P, P.T)
    assert P.sum() == pytest.approx(1.0)


def test_glcm_offset_must_fit():
    with pytest.raises(NoValidPairs):
        glcm(LevelImage(np.zeros((1, 1), dtype=int), 4))
    with pytest.raises(NoValidPairs):
        glcm(LevelImage(np.zeros((4, 4), dtype=int), 4), offsets=())


def test_constant_image_texture():
    P = glcm(quantize(GrayImage(np.full((32, 32), 0.4)), 64))
    assert glcm_energy(P) == pytest.approx(1.0)
    assert glcm_contrast(P) == 0.0


def test_pixel_checkerboard_contrast():
    # horizontal and vertical pairs always differ by 63 levels, diagonal pairs never do
    P = glcm(quantize(GrayImage(checkerboard(8, 1)), 64))
    differing = 2 * 8 * 7
    total = differing + 2 * 7 * 7
    assert glcm_contrast(P) == pytest.approx(63 ** 2 * differing / total)


def test_energy_and_contrast_formulas():
    values = np.random.default_rng(8).integers(0, 64, (32, 32))
    P = glcm(LevelImage(values, 64)).entries
    i, j = np.indices(P.shape)
    matrix = glcm(LevelImage(values, 64))
    assert glcm_energy(matrix) == pytest.approx(np.sum(P ** 2))
    assert glcm_contrast(matrix) == pytest.approx(np.sum(P * (i - j) ** 2))


def test_block_checkerboard_has_texture():
    P = glcm(quantize(GrayImage(checkerboard(64, 8)), 64))
    assert glcm_contrast(P) > 0
    assert 0 < glcm_energy(P) < 1


# ===== Canny =====

def test_constant_image_has_no_edges():
    mask, density = canny_edge_density(GrayImage(np.full((64, 64), 0.5)))
    assert mask.edge_count == 0
    assert density == 0.0


def test_vertical_step_gives_one_edge_column():
    values = np.zeros((256, 256))
    values[:, 128:] = 1.0
    mask, density = canny_edge_density(GrayImage(values))
    assert mask.edge_count == 256
    assert density == pytest.approx(1 / 256)
    columns = np.nonzero(mask.values.any(axis=0))[0]
    assert len(columns) == 1 and columns[0] in (127, 128)


def test_edges_are_thin_on_textures(make_texture):
    mask = canny_edges(make_texture(seed=4))
    assert 0 < mask.edge_count < mask.values.size // 2


def test_blur_reduces_edge_density(make_texture):
    img = make_texture(seed=6)
    _, sharp = canny_edge_density(img)
    _, blurred = canny_edge_density(gaussian_blur(img, 2.0))
    assert blurred < sharp


# ===== Blur and spectrum =====

def test_variance_blur_measure_of_constant():
    assert variance_blur_measure(GrayImage(np.full((32, 32), 0.7))) == 0.0


def test_variance_blur_measure_drops_with_blur(make_texture):
    img = make_texture(seed=9)
    assert variance_blur_measure(gaussian_blur(img, 1.0)) < variance_blur_measure(img)


def test_mean_spectrum_of_constant_is_its_value():
    assert mean_spectrum(GrayImage(np.full((16, 16), 0.5))) == pytest.approx(0.5)


def test_mean_spectrum_matches_naive_dft():
    rng = np.random.default_rng(21)
    for _ in range(20):
        values = rng.random((16, 16))
        assert mean_spectrum(GrayImage(values)) == pytest.approx(naive_mean_spectrum(values), rel=1e-6)


# ===== Measure vector =====

def test_measure_vector_of_constant_image():
    v = measure_vector(GrayImage(np.full((256, 256), 0.5)))
    assert v.glcm_contrast == 0.0
    assert v.glcm_energy == pytest.approx(1.0)
    assert v.ced == 0.0
    assert v.vbm == 0.0
    assert v.ms == pytest.approx(0.5)


def test_measure_vector_of_texture_is_positive(make_texture):
    v = measure_vector(make_texture(seed=12))
    assert all(value > 0 for value in v.as_array())
    assert v.ced <= 1 and v.glcm_energy <= 1


def test_every_measure_survives_quarter_turns(make_texture):
    for seed in (13, 14):
        img = make_texture(seed=seed)
        base = measure_vector(img).as_array()
        for k in (1, 2, 3):
            turned = measure_vector(GrayImage(np.rot90(img.values, k))).as_array()
            assert turned == pytest.approx(base, rel=1e-9, abs=1e-12)


def test_checkerboard_against_constant():
    board = measure_vector(GrayImage(checkerboard(256, 8)))
    flat = measure_vector(GrayImage(np.full((256, 256), 0.5)))
    assert board.glcm_contrast > flat.glcm_contrast
    assert board.glcm_energy < flat.glcm_energy
    assert board.ced > flat.ced
    assert board.vbm > flat.vbm
    assert board.ms > flat.ms


def test_blur_moves_texture_measures_over_a_corpus(make_texture):
    images = [make_texture(seed=40 + s, size=128) for s in range(8)]
    contrast, energy = [], []
    for sigma in (0.0, 1.0, 2.0, 3.0):
        matrices = [glcm(quantize(gaussian_blur(img, sigma) if sigma else img, GLCM_LEVELS)) for img in images]
        contrast.append(np.mean([glcm_contrast(P) for P in matrices]))
        energy.append(np.mean([glcm_energy(P) for P in matrices]))
    assert np.all(np.diff(contrast) < 0)
    assert np.all(np.diff(energy) > 0)
