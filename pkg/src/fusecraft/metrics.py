"""Quality indices for fused grayscale images.

All functions accept either Image objects or plain 2-D arrays. Information
measures use 256-bin histograms over the 8-bit gray levels and log base 2,
so mutual information and entropy share units (bits) and I(X;X) == H(X).
Conventions: population (divide by N) variance and covariance, and
0 * log(0) == 0 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionMismatchError
from .image_io import Image

#: report column key -> header, in fixed table order
TABLE_COLUMNS = (
    ("iqi", "IQI"),
    ("mim", "MIM"),
    ("ff", "FF"),
    ("fs", "FS"),
    ("fi", "FI"),
    ("rmse", "RMSE"),
    ("psnr", "PSNR"),
    ("entropy", "Entropy"),
    ("cc", "CC"),
    ("sf", "SF"),
)


def _as_float(img) -> np.ndarray:
    arr = img.data if isinstance(img, Image) else np.asarray(img)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D image, got shape {arr.shape}")
    return arr.astype(np.float64)


def _pair(x, y) -> tuple:
    a, b = _as_float(x), _as_float(y)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def _as_levels(img) -> np.ndarray:
    arr = img.data if isinstance(img, Image) else np.asarray(img)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D image, got shape {arr.shape}")
    levels = np.rint(arr).astype(np.int64)
    if levels.size and (levels.min() < 0 or levels.max() > 255):
        raise ValueError("gray levels must lie in [0, 255]")
    return levels


def histogram(img) -> np.ndarray:
    """256-bin gray-level counts."""
    return np.bincount(_as_levels(img).reshape(-1), minlength=256)


def joint_histogram(m, n) -> np.ndarray:
    """256x256 counts of co-located gray-level pairs."""
    a = _as_levels(m)
    b = _as_levels(n)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    flat = a.reshape(-1) * 256 + b.reshape(-1)
    return np.bincount(flat, minlength=65536).reshape(256, 256)


def image_quality_index(x, y) -> float:
    """Structural similarity in [-1, 1]; 1 iff the images are identical.

    Computed globally: 4 * cov * mean_x * mean_y divided by
    (var_x + var_y) * (mean_x^2 + mean_y^2). When both variances vanish
    the luminance-only limit 2 * mean_x * mean_y / (mean_x^2 + mean_y^2)
    is returned; two all-black inputs are rejected as degenerate.
    """
    a, b = _pair(x, y)
    mean_a, mean_b = a.mean(), b.mean()
    da, db = a - mean_a, b - mean_b
    var_a = np.mean(da * da)
    var_b = np.mean(db * db)
    cov = np.mean(da * db)
    den_var = var_a + var_b
    den_lum = mean_a * mean_a + mean_b * mean_b
    if den_var == 0.0:
        if den_lum == 0.0:
            raise DegenerateInputError("both images are constant zero")
        return float(2.0 * mean_a * mean_b / den_lum)
    return float(4.0 * cov * mean_a * mean_b / (den_var * den_lum))


def mutual_information(m, n) -> float:
    """Shared information between two images' gray levels, in bits."""
    joint = joint_histogram(m, n)
    total = joint.sum()
    p_joint = joint / total
    p_m = p_joint.sum(axis=1)
    p_n = p_joint.sum(axis=0)
    nz = p_joint > 0
    outer = p_m[:, None] * p_n[None, :]
    terms = p_joint[nz] * np.log2(p_joint[nz] / outer[nz])
    # summing in sorted order makes the measure exactly symmetric in its
    # arguments (the term multiset is transpose-invariant)
    mi = float(np.sum(np.sort(terms)))
    # analytically >= 0; trim float rounding
    return max(mi, 0.0)


class FusionFactorResult(float):
    """Fusion factor that also carries its two mutual-information parts."""

    __slots__ = ("i_af", "i_bf")

    def __new__(cls, i_af: float, i_bf: float):
        obj = super().__new__(cls, i_af + i_bf)
        obj.i_af = i_af
        obj.i_bf = i_bf
        return obj


def fusion_factor(a, b, f) -> FusionFactorResult:
    """Total information the fused image shares with both sources.

    The result behaves as the float I_AF + I_BF and exposes the two
    components as .i_af and .i_bf for reuse.
    """
    return FusionFactorResult(mutual_information(a, f), mutual_information(b, f))


def fusion_symmetry(i_af: float, i_bf: float) -> float:
    """How unevenly the fused image draws from the two sources, in [0, 0.5]."""
    total = i_af + i_bf
    if total == 0.0:
        raise DegenerateInputError("fused image shares no information with either input")
    return abs(i_af / total - 0.5)


def fusion_index(i_af: float, i_bf: float) -> float:
    """Ratio of first-source to second-source shared information."""
    if i_bf == 0.0:
        raise ZeroDivisionError("second-source mutual information is zero")
    return i_af / i_bf


def rmse(r, f) -> float:
    """Root-mean-square pixel difference between reference and fused image."""
    a, b = _pair(r, f)
    diff = a - b
    return float(np.sqrt(np.mean(diff * diff)))


def psnr(r, f, gray_levels: int = 255, formula: str = "standard") -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical images.

    "standard" is 10*log10(L^2 / MSE). "paper" doubles the factor to
    20*log10(L^2 / MSE) for compatibility with sources that state it
    that way.
    """
    if formula not in ("standard", "paper"):
        raise ValueError(f"unknown psnr formula {formula!r}")
    a, b = _pair(r, f)
    diff = a - b
    mse = np.mean(diff * diff)
    if mse == 0.0:
        return math.inf
    factor = 10.0 if formula == "standard" else 20.0
    return float(factor * np.log10(gray_levels * gray_levels / mse))


def entropy(img) -> float:
    """Average bits per pixel of the gray-level distribution; 0 to 8."""
    counts = histogram(img)
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def correlation_coefficient(x, y) -> float:
    """Pearson correlation of co-located pixels, in [-1, 1]."""
    a, b = _pair(x, y)
    da = a - a.mean()
    db = b - b.mean()
    norm_a = np.sqrt(np.sum(da * da))
    norm_b = np.sqrt(np.sum(db * db))
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateInputError("correlation is undefined for a constant image")
    return float(np.sum(da * db) / (norm_a * norm_b))


def spatial_frequency(f) -> float:
    """Overall activity level: root of summed mean-square neighbor steps.

    Row frequency squares the horizontal first differences, column
    frequency the vertical ones; both are averaged over all M*N pixels.
    """
    a = _as_float(f)
    m, n = a.shape
    row_steps = a[:, 1:] - a[:, :-1]
    col_steps = a[1:, :] - a[:-1, :]
    rf = np.sqrt(np.sum(row_steps * row_steps) / (m * n))
    cf = np.sqrt(np.sum(col_steps * col_steps) / (m * n))
    return float(np.sqrt(rf * rf + cf * cf))


@dataclass(frozen=True)
class MetricsReport:
    """All ten indices for one (A, B, fused) triple plus MI components.

    mim is the mutual information between the first input and the fused
    image (i_af); fs and fi are derived from i_af and i_bf. Fields whose
    inputs were degenerate hold NaN and are listed in `degenerate`.
    """

    iqi: float
    mim: float
    ff: float
    fs: float
    fi: float
    rmse: float
    psnr: float
    entropy: float
    cc: float
    sf: float
    i_af: float
    i_bf: float
    reference: str = "input_a"
    psnr_formula: str = "standard"
    degenerate: tuple = ()

    def column_values(self) -> tuple:
        """The ten indices in fixed table order."""
        return tuple(getattr(self, key) for key, _ in TABLE_COLUMNS)

    def to_dict(self) -> dict:
        doc = {key: getattr(self, key) for key, _ in TABLE_COLUMNS}
        doc["i_af"] = self.i_af
        doc["i_bf"] = self.i_bf
        doc["reference"] = self.reference
        doc["psnr_formula"] = self.psnr_formula
        doc["degenerate"] = list(self.degenerate)
        return doc


def evaluate_all(a, b, f, reference=None, psnr_formula: str = "standard") -> MetricsReport:
    """Compute the full report for a fused image and its two sources.

    Inputs are cropped to their common top-left window first. The
    reference for IQI/RMSE/PSNR/CC defaults to input A; the choice is
    recorded in the report. Degenerate metrics come back as NaN fields
    plus a flag instead of an error.
    """
    arrays = [_as_float(img) for img in (a, b, f)]
    named_ref = reference is not None
    if named_ref:
        arrays.append(_as_float(reference))
    rows = min(arr.shape[0] for arr in arrays)
    cols = min(arr.shape[1] for arr in arrays)
    arrays = [arr[:rows, :cols] for arr in arrays]
    a_arr, b_arr, f_arr = arrays[:3]
    ref_arr = arrays[3] if named_ref else a_arr

    i_af = mutual_information(a_arr, f_arr)
    i_bf = mutual_information(b_arr, f_arr)
    flags = []

    def guarded(name, fn, *args):
        try:
            return fn(*args)
        except (DegenerateInputError, ZeroDivisionError):
            flags.append(name)
            return math.nan

    return MetricsReport(
        iqi=guarded("iqi", image_quality_index, ref_arr, f_arr),
        mim=i_af,
        ff=i_af + i_bf,
        fs=guarded("fs", fusion_symmetry, i_af, i_bf),
        fi=guarded("fi", fusion_index, i_af, i_bf),
        rmse=rmse(ref_arr, f_arr),
        psnr=psnr(ref_arr, f_arr, formula=psnr_formula),
        entropy=entropy(f_arr),
        cc=guarded("cc", correlation_coefficient, ref_arr, f_arr),
        sf=spatial_frequency(f_arr),
        i_af=i_af,
        i_bf=i_bf,
        reference="reference" if named_ref else "input_a",
        psnr_formula=psnr_formula,
        degenerate=tuple(flags),
    )
