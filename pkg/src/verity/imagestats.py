"""Per-image and per-model objective colour/complexity properties:
hue, saturation, brightness, vibrancy, and entropy."""

from __future__ import annotations

from dataclasses import dataclass

from .image import ImageBuffer, to_gray, to_hsv
from .pixel_metrics import entropy

__all__ = ["ImageStats", "image_stats", "aggregate_stats"]


@dataclass(frozen=True)
class ImageStats:
    """Plane means on the 8-bit HSV scales plus grayscale entropy.

    Vibrancy is the per-pixel mean of V + S (0-510); this definition is a
    documented choice, the property itself has no canonical formula.
    """

    hue_mean: float
    sat_mean: float
    bright_mean: float
    vibrancy: float
    entropy_bits: float


def image_stats(img: ImageBuffer) -> ImageStats:
    """Objective properties of one 3-channel image."""
    if img.channels != 3:
        raise ValueError("image_stats requires a 3-channel image")
    h, s, v = to_hsv(img)
    bits = entropy(to_gray(img))
    return ImageStats(
        hue_mean=float(h.mean()),
        sat_mean=float(s.mean()),
        bright_mean=float(v.mean()),
        vibrancy=float((v + s).mean()),
        # The epsilon inside the entropy log can push a constant image a few
        # 1e-10 below zero; report it on the nominal [0, 8] scale.
        entropy_bits=max(0.0, bits),
    )


def aggregate_stats(rows) -> list[tuple[str, ImageStats]]:
    """Arithmetic mean of each field grouped by model label.

    ``rows`` is an iterable of (model, ImageStats); output rows are sorted
    by label for stable ordering.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("aggregate_stats needs at least one row")
    by_model: dict[str, list[ImageStats]] = {}
    for model, stats in rows:
        by_model.setdefault(model, []).append(stats)
    out = []
    for model in sorted(by_model):
        group = by_model[model]
        n = len(group)
        out.append(
            (
                model,
                ImageStats(
                    hue_mean=sum(g.hue_mean for g in group) / n,
                    sat_mean=sum(g.sat_mean for g in group) / n,
                    bright_mean=sum(g.bright_mean for g in group) / n,
                    vibrancy=sum(g.vibrancy for g in group) / n,
                    entropy_bits=sum(g.entropy_bits for g in group) / n,
                ),
            )
        )
    return out
