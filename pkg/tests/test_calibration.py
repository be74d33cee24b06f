import itertools
import json
import logging
import os

import numpy as np
import pytest

from entity.Measures import MEASURES, Measure, MeasureVector
from entity.Profile import CalibrationStage, CorrelationMatrix, Ordering, RadiiVector
from model.calibration import (
    MIN_REFERENCE_IMAGES, PUBLISHED_CORRELATIONS, PUBLISHED_FAKE_CALIBRATED_MEANS, PUBLISHED_ORDERING, adjacency_sum,
    calibrate_vector, compute_profile, correlation_matrix, default_profile,
    enumerate_cyclic_orders, load_profile, reference_image_count, save_profile, select_ordering,
)
from model.errors import (
    DegenerateColumn, EmptyCorpus, IrsError, MissingReferenceFile, ProfileFormatError, TooFewSamples, ZeroFakeMean,
    ZeroRealMean,
)
from model.scoring import pentagon_area
from scripts.build_default_profile import build_profile, photo_crops

UNIT_PENTAGON_AREA = 2.5 * np.sin(np.deg2rad(72))
FAKE_FACTORS = np.array([0.5, 1.5, 0.6, 1.2, 1.1])


def jittered(base, count, seed, spread=0.1):
    rng = np.random.default_rng(seed)
    return [MeasureVector.from_array(np.asarray(base) * rng.uniform(1 - spread, 1 + spread, 5))
            for _ in range(count)]


@pytest.fixture
def corpora():
    base = np.array([10.0, 0.02, 0.1, 0.01, 5.0])
    return jittered(base, 30, seed=1), jittered(base * FAKE_FACTORS, 30, seed=2)


# ===== Orderings =====

def test_twelve_cyclic_orders():
    orders = enumerate_cyclic_orders()
    assert len(orders) == 12
    assert len(set(orders)) == 12
    assert all(o.slots[0] is Measure.GLCM_C for o in orders)
    assert [o.indices for o in orders] == sorted(o.indices for o in orders)


def test_ordering_is_canonical():
    cycle = Ordering((Measure.CED, Measure.GLCM_C, Measure.VBM, Measure.GLCM_E, Measure.MS))
    mirrored = Ordering(tuple(reversed(cycle.slots)))
    assert cycle == mirrored
    assert cycle.slots == (Measure.GLCM_C, Measure.CED, Measure.MS, Measure.GLCM_E, Measure.VBM)


def test_published_correlations_select_the_published_cycle():
    ordering = select_ordering(PUBLISHED_CORRELATIONS)
    assert ordering == PUBLISHED_ORDERING
    assert ordering.label() == "GLCM_C-CED-MS-GLCM_E-VBM"
    assert adjacency_sum(ordering, PUBLISHED_CORRELATIONS) == pytest.approx(1.03)


def test_selection_agrees_with_permutation_brute_force():
    best = max(
        itertools.permutations(MEASURES),
        key=lambda p: sum(PUBLISHED_CORRELATIONS[p[k], p[(k + 1) % 5]] for k in range(5)),
    )
    assert Ordering(best) == select_ordering(PUBLISHED_CORRELATIONS)


def test_selected_sum_is_a_unique_maximum():
    sums = sorted(adjacency_sum(o, PUBLISHED_CORRELATIONS) for o in enumerate_cyclic_orders())
    assert sums[-1] > sums[-2]


def cycle_edges(indices):
    return frozenset(frozenset((indices[k], indices[(k + 1) % len(indices)])) for k in range(len(indices)))


def test_cyclic_orders_match_every_permutation():
    distinct = {cycle_edges(p) for p in itertools.permutations(range(5))}
    assert len(distinct) == 12
    assert {cycle_edges(o.indices) for o in enumerate_cyclic_orders()} == distinct


# ===== Correlations =====

def samples_with_correlation(target: np.ndarray, n: int = 200, seed: int = 0):
    rng = np.random.default_rng(seed)
    centred = rng.standard_normal((n, 5))
    centred -= centred.mean(axis=0)
    q, _ = np.linalg.qr(centred)
    data = q @ np.linalg.cholesky(target).T
    data = 0.5 + 0.4 * data / np.abs(data).max(axis=0)
    return [MeasureVector.from_array(row) for row in data]


def test_correlation_matrix_recovers_known_structure():
    published = PUBLISHED_CORRELATIONS.to_numpy()
    target = np.eye(5) + 0.5 * (published - np.eye(5))
    corr = correlation_matrix(samples_with_correlation(target))
    assert np.allclose(corr.to_numpy(), target, atol=1e-9)
    assert select_ordering(corr) == PUBLISHED_ORDERING


def test_correlation_matrix_is_symmetric_with_unit_diagonal(corpora):
    corr = correlation_matrix(corpora[0]).to_numpy()
    assert np.array_equal(corr, corr.T)
    assert np.all(np.diag(corr) == 1.0)
    assert np.all(np.abs(corr) <= 1.0)


def test_correlation_needs_three_samples(corpora):
    with pytest.raises(TooFewSamples):
        correlation_matrix(corpora[0][:2])


def test_rescaling_a_measure_keeps_correlations_and_ordering():
    samples = samples_with_correlation(np.eye(5) + 0.5 * (PUBLISHED_CORRELATIONS.to_numpy() - np.eye(5)))
    scaled = [MeasureVector(1000.0 * v.glcm_contrast, v.glcm_energy, v.ced, v.vbm, 0.001 * v.ms) for v in samples]
    assert np.allclose(correlation_matrix(scaled).to_numpy(), correlation_matrix(samples).to_numpy(), atol=1e-9)
    assert select_ordering(correlation_matrix(scaled)) == select_ordering(correlation_matrix(samples))


def test_correlation_rejects_constant_measure(real_vector):
    with pytest.raises(DegenerateColumn):
        correlation_matrix([real_vector] * 5)


# ===== Profiles =====

def mean_radii(vectors, profile):
    radii = np.array([calibrate_vector(v, profile).as_array() for v in vectors])
    return RadiiVector(tuple(radii.mean(axis=0)), profile.ordering)


def test_profile_rescales_fake_means_to_one(corpora):
    real, fake = corpora
    profile = compute_profile(real, fake)
    assert np.allclose(np.array(profile.weights) * np.array(profile.fake_calibrated_means), 1.0)

    radii = np.array([calibrate_vector(v, profile).as_array() for v in fake])
    assert np.allclose(radii.mean(axis=0), 1.0, atol=1e-6)

    fake_mean_irs = pentagon_area(mean_radii(fake, profile)).value
    real_mean_irs = pentagon_area(mean_radii(real, profile)).value
    assert fake_mean_irs == pytest.approx(UNIT_PENTAGON_AREA, abs=1e-3)
    assert real_mean_irs > fake_mean_irs


def test_profile_keeps_explicit_ordering(corpora):
    ordering = enumerate_cyclic_orders()[0]
    assert compute_profile(*corpora, ordering=ordering).ordering == ordering


def test_profile_falls_back_to_published_ordering(corpora):
    real, fake = corpora
    assert compute_profile(real[:2], fake).ordering == PUBLISHED_ORDERING


def test_profile_rejects_empty_corpus(corpora):
    with pytest.raises(EmptyCorpus):
        compute_profile([], corpora[1])
    with pytest.raises(EmptyCorpus):
        compute_profile(corpora[0], [])


def test_profile_rejects_zero_real_mean(corpora):
    flat = [MeasureVector(v.glcm_contrast, v.glcm_energy, 0.0, v.vbm, v.ms) for v in corpora[0]]
    with pytest.raises(ZeroRealMean):
        compute_profile(flat, corpora[1])


def test_profile_rejects_constant_fake_corpus(corpora):
    # flat images: no contrast, no edges, no blur variance
    flat = [MeasureVector(0.0, 1.0, 0.0, 0.0, 0.5)] * 3
    with pytest.raises(ZeroFakeMean, match="glcm_contrast, ced") as info:
        compute_profile(corpora[0], flat)
    assert isinstance(info.value, IrsError)


def test_profile_reproduces_published_weights():
    base = np.array([10.0, 0.02, 0.1, 0.01, 5.0])
    real = [MeasureVector.from_array(base * f) for f in (0.9, 1.1, 0.8, 1.2)]
    fake_means = np.array(PUBLISHED_FAKE_CALIBRATED_MEANS)
    fake_vector = MeasureVector.from_array(base * np.where([False, True, False, True, True], 1 / fake_means, fake_means))
    profile = compute_profile(real, [fake_vector] * 4, ordering=PUBLISHED_ORDERING)

    assert profile.fake_calibrated_means == pytest.approx(PUBLISHED_FAKE_CALIBRATED_MEANS, abs=1e-12)
    assert profile.weights == pytest.approx((2.3256, 1.0309, 1.5625, 1.1111, 1.0204), abs=1e-4)


# ===== Calibration stages =====

def test_normalized_stage_divides_by_real_means(published_profile):
    v = MeasureVector.from_array(np.array(published_profile.real_means) * [2.0, 0.5, 1.5, 1.0, 0.8])
    radii = calibrate_vector(v, published_profile, CalibrationStage.NORMALIZED).by_measure()
    assert radii == pytest.approx({"glcm_contrast": 2.0, "glcm_energy": 0.5, "ced": 1.5, "vbm": 1.0, "ms": 0.8})


def test_inverted_stage_takes_reciprocals(published_profile):
    v = MeasureVector.from_array(np.array(published_profile.real_means) * [2.0, 0.5, 1.5, 1.0, 0.8])
    radii = calibrate_vector(v, published_profile, CalibrationStage.INVERTED).by_measure()
    assert radii == pytest.approx({"glcm_contrast": 2.0, "glcm_energy": 2.0, "ced": 1.5, "vbm": 1.0, "ms": 1.25})


def test_rescaled_real_means_are_the_weights(published_profile, real_vector):
    radii = calibrate_vector(real_vector, published_profile).by_measure()
    expected = {m.value: w for m, w in zip(MEASURES, published_profile.weights)}
    assert radii == pytest.approx(expected)


def test_radii_follow_slot_order(published_profile, real_vector):
    radii = calibrate_vector(real_vector, published_profile)
    assert radii.ordering == published_profile.ordering
    weights = dict(zip(MEASURES, published_profile.weights))
    assert radii.values == pytest.approx(tuple(weights[m] for m in published_profile.ordering.slots))


def test_radii_are_clamped(published_profile):
    v = MeasureVector(glcm_contrast=1e6, glcm_energy=1.0, ced=0.1, vbm=0.0, ms=0.0)
    radii = calibrate_vector(v, published_profile).by_measure()
    assert radii["glcm_contrast"] == published_profile.radius_clamp
    # zero VBM and MS hit the inversion floor and are clamped rather than infinite
    assert radii["vbm"] == published_profile.radius_clamp
    assert radii["ms"] == published_profile.radius_clamp
    assert all(0 <= r <= published_profile.radius_clamp for r in radii.values())


# ===== Profile files =====

def test_profile_file_round_trip(tmp_path, corpora):
    profile = compute_profile(*corpora, provenance={"source": "synthetic"})
    path = tmp_path / "profile.json"
    save_profile(profile, path)
    assert path.read_text(encoding="utf-8").endswith("}\n")
    assert load_profile(path) == profile


def test_profile_document_uses_measure_names(published_profile):
    document = published_profile.to_document()
    assert set(document["weights"]) == {m.value for m in MEASURES}
    assert document["ordering"] == ["glcm_contrast", "ced", "ms", "glcm_energy", "vbm"]
    assert document["inversion_mask"] == ["glcm_energy", "vbm", "ms"]


def test_load_profile_missing_file(tmp_path):
    with pytest.raises(MissingReferenceFile):
        load_profile(tmp_path / "absent.json")


def test_load_profile_rejects_bad_documents(tmp_path, published_profile):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ProfileFormatError):
        load_profile(path)

    for mutate in (
        lambda d: d.update(extra=1),
        lambda d: d.update(version="irs-profile/0"),
        lambda d: d.pop("weights"),
        lambda d: d["weights"].pop("ms"),
        lambda d: d.update(inversion_mask=["glcm_contrast"]),
        lambda d: d.update(threshold=-1),
    ):
        document = published_profile.to_document()
        mutate(document)
        path = tmp_path / f"bad_{id(mutate)}.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(ProfileFormatError):
            load_profile(path)


def test_load_profile_rereads_changed_file(tmp_path, published_profile):
    path = tmp_path / "profile.json"
    save_profile(published_profile, path)
    assert load_profile(path).threshold == 3.0

    save_profile(published_profile.with_threshold(2.5), path)
    stat = path.stat()
    os.utime(path, ns=(stat.st_atime_ns, stat.st_mtime_ns + 1_000_000_000))
    assert load_profile(path).threshold == 2.5


def test_default_profile_carries_published_calibration():
    profile = default_profile()
    assert profile.ordering == PUBLISHED_ORDERING
    assert profile.threshold == 3.0
    assert profile.fake_calibrated_means == (0.43, 0.97, 0.64, 0.90, 0.98)
    assert all(abs(w * f - 1) < 1e-9 for w, f in zip(profile.weights, profile.fake_calibrated_means))


def test_default_profile_reports_its_reference_corpus(caplog):
    with caplog.at_level(logging.WARNING, logger="model.calibration"):
        profile = default_profile()
    if reference_image_count(profile) >= MIN_REFERENCE_IMAGES:
        assert profile.provenance["real_means"].startswith("measured on")
        assert "provisional" not in caplog.text
    else:
        assert "placeholder" in profile.provenance["real_means"]
        assert "provisional" in caplog.text


def test_correlation_matrix_labels():
    with pytest.raises(ValueError):
        CorrelationMatrix(PUBLISHED_CORRELATIONS.frame.iloc[::-1])


def test_build_default_profile_measures_real_means(image_dir):
    profile = build_profile(image_dir(count=3), min_images=3)
    assert all(mean > 0 for mean in profile.real_means)
    assert profile.ordering == PUBLISHED_ORDERING
    assert profile.fake_calibrated_means == (0.43, 0.97, 0.64, 0.90, 0.98)
    assert profile.provenance["real_means"].startswith("measured on 3 images")
    assert reference_image_count(profile) == 3


def test_build_default_profile_needs_enough_images(image_dir):
    with pytest.raises(IrsError, match="need 1000"):
        build_profile(image_dir(count=3))


def test_bundled_photo_crops():
    crops = list(photo_crops(26))
    assert len(crops) == 26
    assert len({name.rsplit("_", 1)[0] for name, _ in crops}) >= 7
    for _, values in crops:
        assert values.ndim == 2 and values.shape[0] == values.shape[1] >= 16
        assert 0.0 <= values.min() and values.max() <= 1.0
