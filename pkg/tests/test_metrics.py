import math

import numpy as np
import pytest

from conftest import (
    oracle_entropy,
    oracle_mutual_information,
    random_image,
    random_nonconstant_image,
)
from fusecraft import Image
from fusecraft.errors import DegenerateInputError, DimensionMismatchError
from fusecraft.metrics import (
    TABLE_COLUMNS,
    correlation_coefficient,
    entropy,
    evaluate_all,
    fusion_factor,
    fusion_index,
    fusion_symmetry,
    histogram,
    image_quality_index,
    joint_histogram,
    mutual_information,
    psnr,
    rmse,
    spatial_frequency,
)


def _uniform_histogram_image() -> Image:
    return Image(np.arange(256, dtype=np.uint8).reshape(16, 16))


# ---------------------------------------------------------------------------
# Image quality index


def test_iqi_identity():
    rng = np.random.default_rng(1)
    for _ in range(10):
        img = random_nonconstant_image(rng, 8, 8)
        assert image_quality_index(img, img) == pytest.approx(1.0, abs=1e-12)


def test_iqi_equal_constants():
    assert image_quality_index(Image.filled(3, 3, 100), Image.filled(3, 3, 100)) == 1.0


def test_iqi_anticorrelated():
    x = Image(np.array([[0], [255]], dtype=np.uint8))
    y = Image(np.array([[255], [0]], dtype=np.uint8))
    value = image_quality_index(x, y)
    assert value < 0
    assert value == pytest.approx(-1.0, abs=1e-12)


def test_iqi_black_pair_degenerate():
    with pytest.raises(DegenerateInputError):
        image_quality_index(Image.filled(2, 2, 0), Image.filled(2, 2, 0))


def test_iqi_bounded():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = random_nonconstant_image(rng, 6, 6)
        b = random_nonconstant_image(rng, 6, 6)
        assert -1.0 <= image_quality_index(a, b) <= 1.0


# ---------------------------------------------------------------------------
# Mutual information


def test_mi_self_is_entropy():
    rng = np.random.default_rng(3)
    for _ in range(10):
        img = random_image(rng, 8, 8)
        assert abs(mutual_information(img, img) - entropy(img)) < 1e-12


def test_mi_constant_is_zero():
    rng = np.random.default_rng(4)
    other = random_image(rng, 4, 4)
    assert mutual_information(Image.filled(4, 4, 7), other) == 0.0


def test_mi_independent_quadrants():
    m = Image(np.array([[0, 0], [255, 255]], dtype=np.uint8))
    n = Image(np.array([[0, 255], [0, 255]], dtype=np.uint8))
    assert mutual_information(m, n) == 0.0


def test_mi_matches_enumeration_oracle():
    rng = np.random.default_rng(5)
    for _ in range(30):
        a = random_image(rng, 4, 4)
        b = random_image(rng, 4, 4)
        assert abs(mutual_information(a, b) - oracle_mutual_information(a, b)) < 1e-12


def test_mi_symmetric_exactly():
    rng = np.random.default_rng(6)
    for _ in range(30):
        a = random_image(rng, 5, 7)
        b = random_image(rng, 5, 7)
        assert mutual_information(a, b) == mutual_information(b, a)


def test_mi_nonnegative():
    rng = np.random.default_rng(7)
    for _ in range(30):
        a = random_image(rng, 6, 6)
        b = random_image(rng, 6, 6)
        assert mutual_information(a, b) >= 0.0


def test_joint_marginals_match_histograms():
    rng = np.random.default_rng(8)
    a = random_image(rng, 9, 11)
    b = random_image(rng, 9, 11)
    joint = joint_histogram(a, b)
    assert np.array_equal(joint.sum(axis=1), histogram(a))
    assert np.array_equal(joint.sum(axis=0), histogram(b))
    assert joint.sum() == 9 * 11


# ---------------------------------------------------------------------------
# Fusion factor / symmetry / index


def test_fusion_factor_self():
    rng = np.random.default_rng(9)
    img = random_nonconstant_image(rng, 8, 8)
    ff = fusion_factor(img, img, img)
    assert ff == pytest.approx(2.0 * entropy(img), abs=1e-9)
    assert ff.i_af == ff.i_bf


def test_fusion_factor_constant_fused():
    rng = np.random.default_rng(10)
    a = random_image(rng, 4, 4)
    b = random_image(rng, 4, 4)
    assert fusion_factor(a, b, Image.filled(4, 4, 128)) == 0.0


def test_fusion_symmetry_cases():
    assert fusion_symmetry(1.3, 1.3) == 0.0
    assert fusion_symmetry(1.0, 0.0) == 0.5
    assert fusion_symmetry(1.4656, 1.3459) == pytest.approx(0.0213, abs=1e-4)
    with pytest.raises(DegenerateInputError):
        fusion_symmetry(0.0, 0.0)


def test_fusion_index_cases():
    assert fusion_index(0.7, 0.7) == 1.0
    assert fusion_index(1.4656, 1.3459) == pytest.approx(1.0837, abs=0.01)
    with pytest.raises(ZeroDivisionError):
        fusion_index(1.0, 0.0)


# ---------------------------------------------------------------------------
# RMSE / PSNR


def test_rmse_cases():
    rng = np.random.default_rng(11)
    img = random_image(rng, 8, 8)
    assert rmse(img, img) == 0.0
    assert rmse(Image.filled(2, 2, 0), Image.filled(2, 2, 255)) == 255.0
    r = Image(np.array([[0, 0]], dtype=np.uint8))
    f = Image(np.array([[3, 4]], dtype=np.uint8))
    assert rmse(r, f) == pytest.approx(math.sqrt(25.0 / 2.0), abs=1e-12)
    with pytest.raises(DimensionMismatchError):
        rmse(Image.filled(2, 2, 0), Image.filled(2, 3, 0))


def test_psnr_cases():
    rng = np.random.default_rng(12)
    img = random_image(rng, 8, 8)
    assert psnr(img, img) == math.inf
    assert psnr(Image.filled(2, 2, 0), Image.filled(2, 2, 255)) == pytest.approx(0.0, abs=1e-12)
    r = Image.filled(1, 1, 100)
    f = Image.filled(1, 1, 105)  # MSE == 25
    assert psnr(r, f) == pytest.approx(34.1514, abs=1e-3)
    assert psnr(r, f, formula="paper") == pytest.approx(2 * 34.1514, abs=2e-3)
    with pytest.raises(ValueError):
        psnr(r, f, formula="classic")


# ---------------------------------------------------------------------------
# Entropy / correlation / spatial frequency


def test_entropy_cases():
    assert entropy(Image.filled(5, 5, 77)) == 0.0
    assert entropy(_uniform_histogram_image()) == 8.0
    half = Image(np.array([[0, 255], [0, 255]], dtype=np.uint8))
    assert entropy(half) == 1.0


def test_entropy_matches_oracle():
    rng = np.random.default_rng(13)
    for _ in range(10):
        img = random_image(rng, 7, 7)
        assert abs(entropy(img) - oracle_entropy(img)) < 1e-12


def test_entropy_bounds():
    rng = np.random.default_rng(14)
    for _ in range(20):
        img = random_image(rng, 10, 10)
        assert 0.0 <= entropy(img) <= 8.0


def test_correlation_cases():
    rng = np.random.default_rng(15)
    img = random_nonconstant_image(rng, 8, 8)
    assert correlation_coefficient(img, img) == pytest.approx(1.0, abs=1e-12)
    inverted = Image(255 - img.data)
    assert correlation_coefficient(img, inverted) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(DegenerateInputError):
        correlation_coefficient(Image.filled(8, 8, 9), img)


def test_correlation_affine_invariance():
    rng = np.random.default_rng(16)
    x = rng.uniform(0, 255, (12, 12))
    for a, b in [(2.5, 10.0), (-0.75, 100.0), (0.01, -5.0)]:
        value = correlation_coefficient(x, a * x + b)
        assert value == pytest.approx(math.copysign(1.0, a), abs=1e-9)


def test_spatial_frequency_cases():
    assert spatial_frequency(Image.filled(6, 6, 50)) == 0.0
    assert spatial_frequency(Image.filled(1, 1, 9)) == 0.0
    stripes = Image(np.array([[0, 255, 0, 255], [0, 255, 0, 255]], dtype=np.uint8))
    expected = 255.0 * math.sqrt(6.0 / 8.0)
    assert spatial_frequency(stripes) == pytest.approx(expected, abs=1e-9)


def test_spatial_frequency_nonnegative():
    rng = np.random.default_rng(17)
    for _ in range(20):
        assert spatial_frequency(random_image(rng, 5, 9)) >= 0.0


# ---------------------------------------------------------------------------
# Full report


def test_evaluate_all_identity_composition():
    rng = np.random.default_rng(18)
    img = random_nonconstant_image(rng, 16, 16)
    report = evaluate_all(img, img, img)
    assert report.iqi == pytest.approx(1.0, abs=1e-12)
    assert report.rmse == 0.0
    assert report.cc == pytest.approx(1.0, abs=1e-12)
    assert report.fs == 0.0
    assert report.fi == 1.0
    assert report.ff == pytest.approx(2.0 * entropy(img), abs=1e-9)
    assert report.mim == report.i_af
    assert report.psnr == math.inf
    assert report.degenerate == ()
    assert report.reference == "input_a"


def test_report_field_count_and_order():
    keys = tuple(key for key, _ in TABLE_COLUMNS)
    assert keys == ("iqi", "mim", "ff", "fs", "fi", "rmse", "psnr", "entropy", "cc", "sf")
    rng = np.random.default_rng(19)
    img = random_nonconstant_image(rng, 8, 8)
    doc = evaluate_all(img, img, img).to_dict()
    numeric = [k for k, v in doc.items() if isinstance(v, float)]
    assert len(numeric) == 12  # ten indices plus the two MI components


def test_evaluate_all_crops_and_flags():
    rng = np.random.default_rng(20)
    a = random_nonconstant_image(rng, 10, 6)
    b = random_nonconstant_image(rng, 7, 9)
    f = Image.filled(7, 6, 40)  # constant fused image
    report = evaluate_all(a, b, f)
    assert "fs" in report.degenerate and "fi" in report.degenerate
    assert "cc" in report.degenerate  # constant fused side
    assert math.isnan(report.fs) and math.isnan(report.fi) and math.isnan(report.cc)
    assert report.entropy == 0.0
    assert report.ff == 0.0


def test_evaluate_all_explicit_reference():
    rng = np.random.default_rng(21)
    a = random_nonconstant_image(rng, 8, 8)
    b = random_nonconstant_image(rng, 8, 8)
    f = random_nonconstant_image(rng, 8, 8)
    ref = random_nonconstant_image(rng, 8, 8)
    report = evaluate_all(a, b, f, reference=ref)
    assert report.reference == "reference"
    assert report.rmse == rmse(ref, f)
