"""Pixel-domain full-reference metrics.

PSNR, Gaussian-windowed SSIM, multi-scale SSIM (weighted product over dyadic
scales), patch-mean SSIM (mean of single-window SSIM over non-overlapping
tiles), pixel-domain VIF, histogram entropy, and histogram correlation.
All functions are pure and symmetric where the underlying formula is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateInputError
from .image import GrayImage, Histogram, gray_histogram

__all__ = [
    "SsimParams",
    "MsSsimParams",
    "PSNR_SENTINEL_DB",
    "psnr",
    "ssim",
    "ms_ssim",
    "ssim_patch_mean",
    "vif",
    "entropy",
    "hist_correlation",
]

# Finite stand-in for infinite PSNR in serialized reports; the API itself
# returns math.inf for identical images.
PSNR_SENTINEL_DB = 1000.0

# Published multi-scale SSIM weights sum to 1.0001; they are normalized here
# so the stored weights satisfy the sum-to-1 invariant exactly.
_RAW_MSSSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
_MSSSIM_WEIGHTS = tuple(w / sum(_RAW_MSSSIM_WEIGHTS) for w in _RAW_MSSSIM_WEIGHTS)

_SCALE_FLOOR = 1e-6  # per-scale SSIM floor before fractional exponentiation


@dataclass(frozen=True)
class SsimParams:
    """Gaussian window and stabilizer settings for SSIM."""

    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("window must be odd and >= 3")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


@dataclass(frozen=True)
class MsSsimParams:
    """Scale count and per-scale exponents for multi-scale SSIM."""

    scales: int = 5
    weights: tuple[float, ...] = _MSSSIM_WEIGHTS

    def __post_init__(self):
        if self.scales < 1:
            raise ValueError("scales must be >= 1")
        w = tuple(float(x) for x in self.weights)
        if len(w) != self.scales:
            raise ValueError("weights length must equal scales")
        if abs(sum(w) - 1.0) > 1e-6:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", w)


def _check_same_dims(ref: GrayImage, test: GrayImage) -> None:
    if (ref.width, ref.height) != (test.width, test.height):
        raise ValueError(
            f"dimension mismatch: {ref.width}x{ref.height} vs {test.width}x{test.height}"
        )


def psnr(ref: GrayImage, test: GrayImage, max_value: float = 255.0) -> float:
    """Peak signal-to-noise ratio in decibels: 10*log10(MAX^2 / MSE).

    Identical images return ``math.inf``; serialized reports replace that
    with :data:`PSNR_SENTINEL_DB`.
    """
    _check_same_dims(ref, test)
    mse = float(np.mean((ref.data - test.data) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(max_value * max_value / mse)


def _gaussian_kernel1d(window: int, sigma: float) -> np.ndarray:
    half = (window - 1) / 2.0
    x = np.arange(window, dtype=np.float64) - half
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _filter_valid(a: np.ndarray, kernel1d: np.ndarray) -> np.ndarray:
    # Separable correlation; the border region contaminated by padding is
    # cropped away, leaving the exact valid-mode result.
    r = len(kernel1d) // 2
    out = ndimage.correlate1d(a, kernel1d, axis=0, mode="nearest")
    out = ndimage.correlate1d(out, kernel1d, axis=1, mode="nearest")
    return out[r:-r, r:-r]


def _ssim_map(a: np.ndarray, b: np.ndarray, p: SsimParams) -> np.ndarray:
    k = _gaussian_kernel1d(p.window, p.sigma)
    mu_a = _filter_valid(a, k)
    mu_b = _filter_valid(b, k)
    var_a = _filter_valid(a * a, k) - mu_a * mu_a
    var_b = _filter_valid(b * b, k) - mu_b * mu_b
    cov = _filter_valid(a * b, k) - mu_a * mu_b
    c1, c2 = p.c1, p.c2
    return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )


def ssim(ref: GrayImage, test: GrayImage, params: SsimParams | None = None) -> float:
    """Mean of the local SSIM map under a Gaussian window (valid region,
    no padding)."""
    p = params or SsimParams()
    _check_same_dims(ref, test)
    if min(ref.width, ref.height) < p.window:
        raise ValueError(f"image smaller than the {p.window}x{p.window} window")
    return float(np.mean(_ssim_map(ref.data, test.data, p)))


def _mean_pool2(a: np.ndarray) -> np.ndarray:
    h2, w2 = a.shape[0] // 2, a.shape[1] // 2
    return a[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2).mean(axis=(1, 3))


def _max_feasible_scales(min_dim: int, window: int) -> int:
    m, size = 0, min_dim
    while size >= window:
        m += 1
        size //= 2
    return m


def ms_ssim(
    ref: GrayImage,
    test: GrayImage,
    params: MsSsimParams | None = None,
    ssim_params: SsimParams | None = None,
) -> float:
    """Product over scales of SSIM_j ** weight_j.

    Each coarser scale is a 2x2 mean-pool of the previous one.  Per-scale
    values below 1e-6 are floored there to keep fractional powers real.
    """
    mp = params or MsSsimParams()
    sp = ssim_params or SsimParams()
    _check_same_dims(ref, test)
    feasible = _max_feasible_scales(min(ref.width, ref.height), sp.window)
    if feasible < mp.scales:
        raise ValueError(
            f"image too small for {mp.scales} scales; at most M={feasible} feasible"
        )
    a, b = ref.data, test.data
    result = 1.0
    for j in range(mp.scales):
        if j > 0:
            a, b = _mean_pool2(a), _mean_pool2(b)
        s = float(np.mean(_ssim_map(a, b, sp)))
        result *= max(s, _SCALE_FLOOR) ** mp.weights[j]
    return float(result)


def _uniform_ssim(a: np.ndarray, b: np.ndarray, c1: float, c2: float) -> float:
    # Single-window SSIM: uniform weights over the whole patch.
    mu_a, mu_b = a.mean(), b.mean()
    da, db = a - mu_a, b - mu_b
    var_a = (da * da).mean()
    var_b = (db * db).mean()
    cov = (da * db).mean()
    return float(
        ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
        / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
    )


def ssim_patch_mean(
    ref: GrayImage,
    test: GrayImage,
    patch_sizes,
    params: SsimParams | None = None,
) -> float:
    """Mean single-window SSIM over non-overlapping aligned square patches,
    pooled across every size in ``patch_sizes``."""
    p = params or SsimParams()
    _check_same_dims(ref, test)
    sizes = [int(s) for s in patch_sizes]
    if not sizes:
        raise ValueError("patch_sizes must not be empty")
    min_dim = min(ref.width, ref.height)
    for s in sizes:
        if s < 1 or s > min_dim:
            raise ValueError(f"patch size {s} outside [1, {min_dim}]")
    a, b = ref.data, test.data
    vals = []
    for s in sizes:
        for py in range(ref.height // s):
            for px in range(ref.width // s):
                sl = np.s_[py * s : (py + 1) * s, px * s : (px + 1) * s]
                vals.append(_uniform_ssim(a[sl], b[sl], p.c1, p.c2))
    return float(np.mean(vals))


_VIF_EPS = 1e-10
_VIF_MIN_DIM = 41


def vif(ref: GrayImage, test: GrayImage, noise_var: float = 2.0) -> float:
    """Pixel-domain multi-scale visual information fidelity.

    Four dyadic scales with Gaussian local statistics feed the scalar
    information ratio; the result is the summed numerator over the summed
    denominator.  Zero-variance windows contribute 0 to both sums, so a
    constant image pair returns 0.
    """
    _check_same_dims(ref, test)
    if min(ref.width, ref.height) < _VIF_MIN_DIM:
        raise ValueError(f"vif requires at least {_VIF_MIN_DIM}x{_VIF_MIN_DIM} images")
    r, d = ref.data, test.data
    num = 0.0
    den = 0.0
    for scale in range(4):
        size = 2 ** (4 - scale) + 1
        k = _gaussian_kernel1d(size, size / 5.0)
        if scale > 0:
            r = _filter_valid(r, k)[::2, ::2]
            d = _filter_valid(d, k)[::2, ::2]
        mu_r = _filter_valid(r, k)
        mu_d = _filter_valid(d, k)
        sigma_r = np.maximum(_filter_valid(r * r, k) - mu_r * mu_r, 0.0)
        sigma_d = np.maximum(_filter_valid(d * d, k) - mu_d * mu_d, 0.0)
        sigma_rd = _filter_valid(r * d, k) - mu_r * mu_d

        g = sigma_rd / (sigma_r + _VIF_EPS)
        sv = sigma_d - g * sigma_rd

        flat_r = sigma_r < _VIF_EPS
        g[flat_r] = 0.0
        sv[flat_r] = sigma_d[flat_r]
        sigma_r = np.where(flat_r, 0.0, sigma_r)

        flat_d = sigma_d < _VIF_EPS
        g[flat_d] = 0.0
        sv[flat_d] = 0.0

        neg_g = g < 0.0
        sv[neg_g] = sigma_d[neg_g]
        g[neg_g] = 0.0
        sv = np.maximum(sv, _VIF_EPS)

        num += float(np.sum(np.log10(1.0 + g * g * sigma_r / (sv + noise_var))))
        den += float(np.sum(np.log10(1.0 + sigma_r / noise_var)))
    if den == 0.0:
        return 0.0
    return num / den


def entropy(img: GrayImage, eps: float = 1e-10, bins: int = 256) -> float:
    """Histogram entropy in bits: -sum_i p_i * log2(p_i + eps), summed over
    all bins including empty ones."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = gray_histogram(img, bins).normalized
    return float(-np.sum(p * np.log2(p + eps)))


def hist_correlation(a: Histogram, b: Histogram) -> float:
    """Pearson correlation between two histograms over matching bins."""
    if a.bins != b.bins:
        raise ValueError(f"bin count mismatch: {a.bins} vs {b.bins}")
    da = a.normalized - a.normalized.mean()
    db = b.normalized - b.normalized.mean()
    ssa = float((da * da).sum())
    ssb = float((db * db).sum())
    if ssa == 0.0 or ssb == 0.0:
        raise DegenerateInputError("constant histogram: correlation undefined")
    return float((da * db).sum() / math.sqrt(ssa * ssb))
