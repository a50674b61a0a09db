from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import ndimage

from conftest import random_gray
from verity.errors import DegenerateInputError
from verity.image import GrayImage, Histogram
from verity.pixel_metrics import (
    MsSsimParams,
    SsimParams,
    _gaussian_kernel1d,
    entropy,
    hist_correlation,
    ms_ssim,
    psnr,
    ssim,
    ssim_patch_mean,
    vif,
)


def _const(h, w, value):
    return GrayImage.from_array(np.full((h, w), float(value)))


class TestPsnr:
    def test_identical_images_infinite(self, rng):
        x = random_gray(rng, 16, 16)
        assert math.isinf(psnr(x, x))

    def test_uniform_error_of_one(self):
        a = _const(8, 8, 100.0)
        b = _const(8, 8, 101.0)
        assert psnr(a, b) == pytest.approx(48.13, abs=0.01)

    def test_uniform_error_of_sixteen(self):
        a = _const(8, 8, 100.0)
        b = _const(8, 8, 116.0)
        assert psnr(a, b) == pytest.approx(24.05, abs=0.01)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="mismatch"):
            psnr(random_gray(rng, 8, 8), random_gray(rng, 8, 9))

    def test_strictly_decreasing_in_noise_amplitude(self, rng):
        base = rng.uniform(60, 200, size=(64, 64))
        values = []
        for amp in (4.0, 16.0, 64.0):
            noisy = np.clip(base + rng.uniform(-amp, amp, size=base.shape), 0, 255)
            values.append(psnr(GrayImage.from_array(base), GrayImage.from_array(noisy)))
        assert values[0] > values[1] > values[2]


class TestSsim:
    def test_self_similarity_is_one(self, rng):
        for _ in range(5):
            x = random_gray(rng, 24, 31)
            assert ssim(x, x) == pytest.approx(1.0, abs=1e-9)

    def test_constant_black_vs_white_closed_form(self):
        p = SsimParams()
        expected = p.c1 / (255.0**2 + p.c1)
        got = ssim(_const(16, 16, 0.0), _const(16, 16, 255.0))
        assert got == pytest.approx(expected, abs=1e-6)
        assert got == pytest.approx(1.0e-4, abs=1e-6)

    def test_symmetry(self, rng):
        for _ in range(10):
            x = random_gray(rng, 20, 20)
            y = random_gray(rng, 20, 20)
            assert ssim(x, y) == ssim(y, x)

    def test_too_small_image_rejected(self, rng):
        with pytest.raises(ValueError, match="window"):
            ssim(random_gray(rng, 8, 8), random_gray(rng, 8, 8))

    def test_map_within_unit_interval(self, rng):
        from verity.pixel_metrics import _ssim_map

        for _ in range(10):
            a = rng.uniform(0, 255, size=(24, 24))
            b = rng.uniform(0, 255, size=(24, 24))
            m = _ssim_map(a, b, SsimParams())
            assert m.max() <= 1.0 + 1e-9
            assert m.min() >= -1.0 - 1e-9


def _reference_ms_ssim(a, b, weights, p):
    """Independent evaluation: direct 2-D convolution per scale, no shared
    helpers with the implementation under test."""
    total = 1.0
    k1d = _gaussian_kernel1d(p.window, p.sigma)
    kern = np.outer(k1d, k1d)
    for j, w in enumerate(weights):
        if j > 0:
            h2, w2 = a.shape[0] // 2, a.shape[1] // 2
            a = a[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2).mean(axis=(1, 3))
            b = b[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2).mean(axis=(1, 3))
        vals = []
        hh, ww = a.shape
        r = p.window
        for y in range(hh - r + 1):
            for x in range(ww - r + 1):
                pa = a[y : y + r, x : x + r]
                pb = b[y : y + r, x : x + r]
                mu_a = (pa * kern).sum()
                mu_b = (pb * kern).sum()
                va = (pa * pa * kern).sum() - mu_a**2
                vb = (pb * pb * kern).sum() - mu_b**2
                cab = (pa * pb * kern).sum() - mu_a * mu_b
                vals.append(
                    ((2 * mu_a * mu_b + p.c1) * (2 * cab + p.c2))
                    / ((mu_a**2 + mu_b**2 + p.c1) * (va + vb + p.c2))
                )
        total *= max(np.mean(vals), 1e-6) ** w
    return total


class TestMsSsim:
    def test_self_similarity_is_one(self, rng):
        x = random_gray(rng, 176, 176)
        assert ms_ssim(x, x) == pytest.approx(1.0, abs=1e-9)

    def test_single_scale_reduces_to_ssim(self, rng):
        # Correlated pair: the reduction claim lives above the 1e-6 floor
        # applied to negative per-scale values.
        x = random_gray(rng, 32, 32)
        y = GrayImage.from_array(np.clip(x.data + rng.normal(0, 20, size=(32, 32)), 0, 255))
        assert ssim(x, y) > 0
        p1 = MsSsimParams(scales=1, weights=(1.0,))
        assert ms_ssim(x, y, p1) == pytest.approx(ssim(x, y), abs=1e-9)

    def test_matches_independent_reference(self, rng):
        x = random_gray(rng, 64, 64)
        y = GrayImage.from_array(
            np.clip(x.data + rng.normal(0, 12, size=(64, 64)), 0, 255)
        )
        weights = (0.2, 0.3, 0.5)
        p = MsSsimParams(scales=3, weights=weights)
        expected = _reference_ms_ssim(x.data, y.data, weights, SsimParams())
        assert ms_ssim(x, y, p) == pytest.approx(expected, abs=1e-6)

    def test_too_small_image_names_feasible_scale_count(self, rng):
        x = random_gray(rng, 64, 64)
        with pytest.raises(ValueError, match="M=3"):
            ms_ssim(x, x)

    def test_symmetry(self, rng):
        x = random_gray(rng, 176, 176)
        y = random_gray(rng, 176, 176)
        assert ms_ssim(x, y) == ms_ssim(y, x)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            MsSsimParams(scales=2, weights=(0.5, 0.6))


class TestSsimPatchMean:
    def test_identical_images(self, rng):
        x = random_gray(rng, 32, 32)
        assert ssim_patch_mean(x, x, [16, 8]) == pytest.approx(1.0, abs=1e-9)

    def test_single_whole_image_patch_is_global_ssim(self, rng):
        x = random_gray(rng, 16, 16)
        y = random_gray(rng, 16, 16)
        p = SsimParams()
        a, b = x.data, y.data
        mu_a, mu_b = a.mean(), b.mean()
        va = ((a - mu_a) ** 2).mean()
        vb = ((b - mu_b) ** 2).mean()
        cab = ((a - mu_a) * (b - mu_b)).mean()
        expected = ((2 * mu_a * mu_b + p.c1) * (2 * cab + p.c2)) / (
            (mu_a**2 + mu_b**2 + p.c1) * (va + vb + p.c2)
        )
        assert ssim_patch_mean(x, y, [16]) == pytest.approx(expected, abs=1e-12)

    def test_two_by_two_patches_brute_force(self, rng):
        x = random_gray(rng, 4, 4)
        y = random_gray(rng, 4, 4)
        p = SsimParams()
        vals = []
        for py in range(2):
            for px in range(2):
                a = x.data[2 * py : 2 * py + 2, 2 * px : 2 * px + 2]
                b = y.data[2 * py : 2 * py + 2, 2 * px : 2 * px + 2]
                mu_a, mu_b = a.mean(), b.mean()
                va = ((a - mu_a) ** 2).mean()
                vb = ((b - mu_b) ** 2).mean()
                cab = ((a - mu_a) * (b - mu_b)).mean()
                vals.append(
                    ((2 * mu_a * mu_b + p.c1) * (2 * cab + p.c2))
                    / ((mu_a**2 + mu_b**2 + p.c1) * (va + vb + p.c2))
                )
        assert ssim_patch_mean(x, y, [2]) == pytest.approx(float(np.mean(vals)), abs=1e-12)

    def test_empty_schedule_rejected(self, rng):
        x = random_gray(rng, 8, 8)
        with pytest.raises(ValueError, match="empty"):
            ssim_patch_mean(x, x, [])

    def test_oversize_patch_rejected(self, rng):
        x = random_gray(rng, 8, 8)
        with pytest.raises(ValueError, match="patch size"):
            ssim_patch_mean(x, x, [16])

    def test_symmetry(self, rng):
        x = random_gray(rng, 24, 24)
        y = random_gray(rng, 24, 24)
        assert ssim_patch_mean(x, y, [12, 6]) == ssim_patch_mean(y, x, [12, 6])


class TestVif:
    def test_self_fidelity_is_one(self, rng):
        x = random_gray(rng, 64, 64)
        assert vif(x, x) == pytest.approx(1.0, abs=1e-6)

    def test_blur_loses_information(self, rng):
        x = random_gray(rng, 96, 96)
        blurred = GrayImage.from_array(
            np.clip(ndimage.gaussian_filter(x.data, 3.0), 0, 255)
        )
        assert vif(x, blurred) < 1.0

    def test_constant_pair_defined_as_zero(self):
        c = _const(48, 48, 77.0)
        assert vif(c, c) == 0.0

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="mismatch"):
            vif(random_gray(rng, 64, 64), random_gray(rng, 64, 65))

    def test_too_small_rejected(self, rng):
        with pytest.raises(ValueError, match="41"):
            vif(random_gray(rng, 32, 32), random_gray(rng, 32, 32))


class TestEntropy:
    def test_constant_image_near_zero(self):
        assert abs(entropy(_const(16, 16, 42.0))) < 1e-7

    def test_two_level_image_one_bit(self):
        g = GrayImage.from_array(np.concatenate([np.zeros((8, 16)), np.full((8, 16), 255.0)]))
        assert entropy(g) == pytest.approx(1.0, abs=1e-6)

    def test_uniform_256_levels_eight_bits(self):
        g = GrayImage.from_array(np.tile(np.arange(256.0), (4, 1)))
        assert entropy(g) == pytest.approx(8.0, abs=1e-5)

    def test_range_property(self, rng):
        for bins in (16, 256):
            for _ in range(5):
                x = random_gray(rng, 20, 20)
                e = entropy(x, bins=bins)
                assert -1e-9 <= e <= math.log2(bins) + 1e-6


class TestHistCorrelation:
    def test_self_correlation(self):
        h = Histogram.from_counts([3, 1, 4, 1, 5])
        assert hist_correlation(h, h) == pytest.approx(1.0, abs=1e-9)

    def test_reversed_complement_anticorrelates(self):
        a = Histogram.from_counts([1, 2, 3, 4])
        b = Histogram.from_counts([4, 3, 2, 1])
        assert hist_correlation(a, b) == pytest.approx(-1.0, abs=1e-9)

    def test_affine_invariance(self):
        a = Histogram.from_counts([1, 2, 3, 4])
        b = Histogram.from_counts([2, 4, 6, 8])
        assert hist_correlation(a, b) == pytest.approx(1.0, abs=1e-9)

    def test_constant_histogram_degenerate(self):
        a = Histogram.from_counts([2, 2, 2, 2])
        b = Histogram.from_counts([1, 2, 3, 4])
        with pytest.raises(DegenerateInputError):
            hist_correlation(a, b)

    def test_bin_mismatch(self):
        a = Histogram.from_counts([1, 2, 3])
        b = Histogram.from_counts([1, 2, 3, 4])
        with pytest.raises(ValueError, match="mismatch"):
            hist_correlation(a, b)

    def test_symmetry_and_range(self, rng):
        for _ in range(10):
            a = Histogram.from_counts(rng.integers(0, 50, size=12))
            b = Histogram.from_counts(rng.integers(0, 50, size=12))
            try:
                r1 = hist_correlation(a, b)
            except DegenerateInputError:
                continue
            assert r1 == hist_correlation(b, a)
            assert -1.0 - 1e-12 <= r1 <= 1.0 + 1e-12
