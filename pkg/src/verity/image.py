"""Image decoding, resizing, and colour-space conversions.

Every metric in the toolkit consumes one of the canonical representations
built here: 8-bit ``ImageBuffer`` rasters, float ``GrayImage`` luminance
planes, and ``Histogram`` tallies of a gray plane.  All types are immutable
after construction and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DecodeError

__all__ = [
    "ImageBuffer",
    "GrayImage",
    "Histogram",
    "load_image",
    "resize_bilinear",
    "to_gray",
    "to_hsv",
    "gray_histogram",
]

# BT.601 luma coefficients; applied in floating point, never re-quantized.
_LUMA_R, _LUMA_G, _LUMA_B = 0.299, 0.587, 0.114


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ImageBuffer:
    """Decoded 8-bit raster, shape (height, width, channels), uint8."""

    width: int
    height: int
    channels: int
    bit_depth: int
    max_value: int
    data: np.ndarray

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if self.bit_depth != 8 or self.max_value != 255:
            raise ValueError("only 8-bit images with max_value 255 are supported")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        arr = np.asarray(self.data, dtype=np.uint8)
        if arr.shape != (self.height, self.width, self.channels):
            raise ValueError(
                f"data shape {arr.shape} does not match "
                f"{self.height}x{self.width}x{self.channels}"
            )
        object.__setattr__(self, "data", _readonly(arr))

    @classmethod
    def from_array(cls, arr) -> "ImageBuffer":
        """Build a buffer from a (h, w) or (h, w, c) uint8-compatible array."""
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D array, got ndim={arr.ndim}")
        h, w, c = arr.shape
        return cls(width=w, height=h, channels=c, bit_depth=8, max_value=255, data=arr)


@dataclass(frozen=True)
class GrayImage:
    """Floating-point luminance plane with values in [0, 255]."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.shape != (self.height, self.width):
            raise ValueError(f"data shape {arr.shape} does not match {self.height}x{self.width}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("gray values must be finite")
        if arr.min() < 0.0 or arr.max() > 255.0:
            raise ValueError("gray values must lie in [0, 255]")
        object.__setattr__(self, "data", _readonly(arr))

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected 2-D array, got ndim={arr.ndim}")
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)


@dataclass(frozen=True)
class Histogram:
    """Per-bin tallies of a gray plane plus their normalized probabilities."""

    bins: int
    counts: np.ndarray
    normalized: np.ndarray

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        counts = np.asarray(self.counts, dtype=np.int64)
        norm = np.asarray(self.normalized, dtype=np.float64)
        if counts.shape != (self.bins,) or norm.shape != (self.bins,):
            raise ValueError("counts/normalized length must equal bins")
        if counts.min(initial=0) < 0:
            raise ValueError("counts must be nonnegative")
        total = counts.sum()
        if total > 0 and abs(norm.sum() - 1.0) > 1e-9:
            raise ValueError("normalized probabilities must sum to 1")
        object.__setattr__(self, "counts", _readonly(counts))
        object.__setattr__(self, "normalized", _readonly(norm))

    @classmethod
    def from_counts(cls, counts) -> "Histogram":
        counts = np.asarray(counts, dtype=np.int64)
        total = counts.sum()
        norm = counts / total if total > 0 else np.zeros_like(counts, dtype=np.float64)
        return cls(bins=counts.shape[0], counts=counts, normalized=norm)


def load_image(path) -> ImageBuffer:
    """Decode a PNG or JPEG file into an 8-bit buffer.

    Color inputs decode to 3 channels, grayscale inputs to 1 channel.
    Raises :class:`DecodeError` naming the path for unreadable files,
    non-PNG/JPEG formats, or bit depths other than 8.
    """
    p = Path(path)
    try:
        with Image.open(p) as im:
            if im.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{p}: unsupported format {im.format!r} (PNG/JPEG only)")
            if im.mode in ("I", "I;16", "I;16B", "I;16L", "F"):
                raise DecodeError(f"{p}: unsupported bit depth (mode {im.mode!r})")
            if im.mode in ("1", "L", "LA"):
                converted = im.convert("L")
                arr = np.asarray(converted, dtype=np.uint8)[:, :, None]
            else:
                converted = im.convert("RGB")
                arr = np.asarray(converted, dtype=np.uint8)
    except DecodeError:
        raise
    except (OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{p}: cannot decode image ({exc})") from exc
    return ImageBuffer.from_array(arr)


def resize_bilinear(img: ImageBuffer, w: int, h: int) -> ImageBuffer:
    """Resize with bilinear sampling on half-pixel-centered coordinates.

    Source coordinates follow (dst + 0.5) * scale - 0.5 with edge clamping;
    samples are re-quantized with round-half-up.  A same-size resize
    reproduces the input samples exactly.
    """
    if w < 1 or h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {w}x{h}")
    src = img.data.astype(np.float64)
    xs = (np.arange(w, dtype=np.float64) + 0.5) * (img.width / w) - 0.5
    ys = (np.arange(h, dtype=np.float64) + 0.5) * (img.height / h) - 0.5
    x0f = np.floor(xs)
    y0f = np.floor(ys)
    wx = (xs - x0f)[None, :, None]
    wy = (ys - y0f)[:, None, None]
    x0 = np.clip(x0f.astype(np.int64), 0, img.width - 1)
    x1 = np.clip(x0f.astype(np.int64) + 1, 0, img.width - 1)
    y0 = np.clip(y0f.astype(np.int64), 0, img.height - 1)
    y1 = np.clip(y0f.astype(np.int64) + 1, 0, img.height - 1)

    row0 = src[y0]
    row1 = src[y1]
    top = row0[:, x0] * (1.0 - wx) + row0[:, x1] * wx
    bot = row1[:, x0] * (1.0 - wx) + row1[:, x1] * wx
    out = top * (1.0 - wy) + bot * wy

    out = np.clip(np.floor(out + 0.5), 0, img.max_value).astype(np.uint8)
    return ImageBuffer.from_array(out)


def to_gray(img: ImageBuffer) -> GrayImage:
    """BT.601 luma for 3-channel input; plain copy for 1-channel input."""
    if img.channels == 1:
        vals = img.data[:, :, 0].astype(np.float64)
    else:
        rgb = img.data.astype(np.float64)
        vals = _LUMA_R * rgb[:, :, 0] + _LUMA_G * rgb[:, :, 1] + _LUMA_B * rgb[:, :, 2]
    return GrayImage(width=img.width, height=img.height, data=vals)


def to_hsv(img: ImageBuffer) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pixel HSV planes with H in [0, 180) (half-degree convention) and
    S, V in [0, 255].

    This scaling matches 8-bit HSV practice; a grayscale input raises
    ``ValueError``.
    """
    if img.channels != 3:
        raise ValueError("to_hsv requires a 3-channel image")
    rgb = img.data.astype(np.float64)
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = v - mn

    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(v > 0, 255.0 * delta / v, 0.0)
        hdeg = np.select(
            [delta == 0, v == r, v == g],
            [
                np.zeros_like(v),
                60.0 * (g - b) / delta,
                60.0 * (2.0 + (b - r) / delta),
            ],
            default=60.0 * (4.0 + (r - g) / delta),
        )
    hdeg = np.mod(hdeg, 360.0)
    return hdeg / 2.0, s, v


def gray_histogram(img: GrayImage, bins: int = 256) -> Histogram:
    """Histogram of a gray plane: values binned by floor(v * bins / 256),
    clamped into [0, bins - 1]."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    idx = np.floor(img.data * (bins / 256.0)).astype(np.int64)
    idx = np.clip(idx, 0, bins - 1)
    counts = np.bincount(idx.ravel(), minlength=bins)
    return Histogram.from_counts(counts)
