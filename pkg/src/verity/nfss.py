"""Composite similarity score blending structure, perception, and colour.

The score combines patch-mean SSIM, a feature-space perceptual distance,
histogram correlation, and reference entropy through a sigmoid weight:

    alpha = 1 / (1 + exp(-H + (S - Dp)) * exp(-Hc))
    score = alpha * S + (1 - alpha) * Dp + 0.1 * Hc

Dp enters the weighted sum verbatim as a distance; it is scale-dependent
on the feature provider, so scores are only comparable within a provider.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .features import (
    BUILTIN_SOURCE,
    FeatureMatrix,
    builtin_feature_provider,
    perceptual_distance,
)
from .image import Histogram, ImageBuffer, gray_histogram, resize_bilinear, to_gray
from .pixel_metrics import SsimParams, entropy, hist_correlation, ssim_patch_mean

__all__ = [
    "NfssConfig",
    "NfssComponents",
    "default_patch_sizes",
    "nfss_alpha",
    "nfss_score",
    "nfss_evaluate",
]

_EPS = sys.float_info.epsilon
COLOR_WEIGHT = 0.1


@dataclass(frozen=True)
class NfssConfig:
    """Pipeline knobs for :func:`nfss_evaluate`.

    ``patch_sizes`` of None selects {min_dim//2, min_dim//4}, floored at 8.
    ``entropy_source`` picks which image feeds the entropy term (ref by
    default; the defining equations leave it open).  ``normalize_dp``
    substitutes 1/(1+Dp) for the raw distance; off by default because the
    weighted sum is defined on the distance itself.
    """

    resize: tuple[int, int] = (299, 299)
    patch_sizes: tuple[int, ...] | None = None
    histogram_bins: int = 256
    entropy_source: str = "ref"  # ref | test | mean
    entropy_eps: float = 1e-10
    normalize_dp: bool = False
    histogram_mode: str = "gray"  # gray | rgb
    feature_provider: Callable[[ImageBuffer], FeatureMatrix] | None = None
    provider_label: str = BUILTIN_SOURCE
    ssim_params: SsimParams = SsimParams()

    def __post_init__(self):
        if self.entropy_source not in ("ref", "test", "mean"):
            raise ValueError(f"entropy_source must be ref|test|mean, got {self.entropy_source!r}")
        if self.histogram_mode not in ("gray", "rgb"):
            raise ValueError(f"histogram_mode must be gray|rgb, got {self.histogram_mode!r}")
        if self.histogram_bins < 1:
            raise ValueError("histogram_bins must be >= 1")


@dataclass(frozen=True)
class NfssComponents:
    """All intermediates of one evaluation, for auditability."""

    ssim_ms: float
    dp: float
    hc: float
    h: float
    alpha: float
    nfss: float
    provider: str = BUILTIN_SOURCE

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha!r}")
        if not -1.0 - 1e-9 <= self.ssim_ms <= 1.0 + 1e-9:
            raise ValueError(f"ssim_ms outside [-1, 1]: {self.ssim_ms!r}")
        if not -1.0 - 1e-9 <= self.hc <= 1.0 + 1e-9:
            raise ValueError(f"hc outside [-1, 1]: {self.hc!r}")
        if self.dp < 0.0:
            raise ValueError(f"dp must be nonnegative, got {self.dp!r}")
        # The epsilon inside the entropy log can land a constant image a few
        # 1e-10 below zero; anything beyond that is a real violation.
        if self.h < -1e-9:
            raise ValueError(f"h must be nonnegative, got {self.h!r}")


def default_patch_sizes(min_dim: int) -> tuple[int, ...]:
    """Default tiling schedule: halves and quarters of the short side,
    never smaller than 8."""
    sizes = []
    for div in (2, 4):
        s = max(8, min_dim // div)
        if s not in sizes:
            sizes.append(s)
    return tuple(sizes)


def nfss_alpha(h: float, ssim_ms: float, dp: float, hc: float) -> float:
    """Dynamic weight 1 / (1 + exp(-h + (ssim_ms - dp)) * exp(-hc)).

    Evaluated as a guarded logistic on the summed exponent and clamped
    away from exact 0/1 by machine epsilon.
    """
    for name, v in (("h", h), ("ssim_ms", ssim_ms), ("dp", dp), ("hc", hc)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    t = (-h + (ssim_ms - dp)) - hc
    if t > 0:
        e = math.exp(-t)
        alpha = e / (1.0 + e)
    else:
        alpha = 1.0 / (1.0 + math.exp(t))
    return min(max(alpha, _EPS), 1.0 - _EPS)


def nfss_score(ssim_ms: float, dp: float, hc: float, alpha: float) -> float:
    """Weighted sum alpha*ssim_ms + (1-alpha)*dp + 0.1*hc."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha!r}")
    return alpha * ssim_ms + (1.0 - alpha) * dp + COLOR_WEIGHT * hc


def _pair_histogram(img: ImageBuffer, gray, cfg: NfssConfig) -> Histogram:
    if cfg.histogram_mode == "gray" or img.channels == 1:
        return gray_histogram(gray, cfg.histogram_bins)
    # Concatenated per-channel histograms on the same binning rule.
    counts = []
    for ch in range(img.channels):
        plane = img.data[:, :, ch].astype(np.float64)
        idx = np.clip(
            np.floor(plane * (cfg.histogram_bins / 256.0)).astype(np.int64),
            0,
            cfg.histogram_bins - 1,
        )
        counts.append(np.bincount(idx.ravel(), minlength=cfg.histogram_bins))
    return Histogram.from_counts(np.concatenate(counts))


def nfss_evaluate(
    ref: ImageBuffer, test: ImageBuffer, cfg: NfssConfig | None = None
) -> NfssComponents:
    """Full pipeline over an image pair.

    Both images are resized to the canonical target, grayscaled, and fed
    through patch-mean SSIM, the provider's perceptual distance, histogram
    correlation, and entropy of the configured source image; the weight and
    final score follow.  Every intermediate is returned.
    """
    cfg = cfg or NfssConfig()
    w, h = cfg.resize
    ref_r = resize_bilinear(ref, w, h)
    test_r = resize_bilinear(test, w, h)
    gray_ref = to_gray(ref_r)
    gray_test = to_gray(test_r)

    sizes = cfg.patch_sizes or default_patch_sizes(min(w, h))
    ssim_ms = ssim_patch_mean(gray_ref, gray_test, sizes, cfg.ssim_params)

    provider = cfg.feature_provider or builtin_feature_provider
    dp = perceptual_distance(provider(ref_r), provider(test_r))
    if cfg.normalize_dp:
        dp = 1.0 / (1.0 + dp)

    hc = hist_correlation(
        _pair_histogram(ref_r, gray_ref, cfg), _pair_histogram(test_r, gray_test, cfg)
    )

    if cfg.entropy_source == "ref":
        h_bits = entropy(gray_ref, cfg.entropy_eps, cfg.histogram_bins)
    elif cfg.entropy_source == "test":
        h_bits = entropy(gray_test, cfg.entropy_eps, cfg.histogram_bins)
    else:
        h_bits = 0.5 * (
            entropy(gray_ref, cfg.entropy_eps, cfg.histogram_bins)
            + entropy(gray_test, cfg.entropy_eps, cfg.histogram_bins)
        )

    alpha = nfss_alpha(h_bits, ssim_ms, dp, hc)
    score = nfss_score(ssim_ms, dp, hc, alpha)
    return NfssComponents(
        ssim_ms=ssim_ms,
        dp=dp,
        hc=hc,
        h=h_bits,
        alpha=alpha,
        nfss=score,
        provider=cfg.provider_label,
    )
