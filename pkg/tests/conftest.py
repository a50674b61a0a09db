from __future__ import annotations

import numpy as np
import pytest

from verity.image import GrayImage, ImageBuffer


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_gray(rng: np.random.Generator, h: int, w: int) -> GrayImage:
    return GrayImage.from_array(rng.uniform(0.0, 255.0, size=(h, w)))


def random_image(rng: np.random.Generator, h: int, w: int, channels: int = 3) -> ImageBuffer:
    shape = (h, w, channels) if channels > 1 else (h, w)
    return ImageBuffer.from_array(rng.integers(0, 256, size=shape, dtype=np.uint8))


def solid_image(h: int, w: int, rgb) -> ImageBuffer:
    return ImageBuffer.from_array(np.full((h, w, 3), rgb, dtype=np.uint8))
