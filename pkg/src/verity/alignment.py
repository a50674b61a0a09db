"""Human-vs-metric alignment: MAD, MAPE, cosine alignment, and the
model x metric comparison table mirroring the benchmark report layout."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, IngestionError, PairResolutionError
from .features import FeatureMatrix
from .ibs import IbsTable, ibs_scale, likert_of_score

__all__ = [
    "DIMENSIONS",
    "MosRecord",
    "AlignmentRow",
    "mad",
    "mape",
    "cosine_alignment",
    "build_comparison_table",
    "read_mos_csv",
    "read_metric_csv",
]

DIMENSIONS = ("photorealism", "image_quality", "text_image_alignment")


@dataclass(frozen=True)
class MosRecord:
    """Mean human opinion score for one model on one dimension."""

    model: str
    dimension: str
    mean_score: float

    def __post_init__(self):
        if not self.model:
            raise ValueError("model label must be nonempty")
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {self.dimension!r}")
        if not 0.0 <= self.mean_score <= 5.0:
            raise ValueError(f"mean_score must lie in [0, 5], got {self.mean_score!r}")


@dataclass(frozen=True)
class AlignmentRow:
    """One comparison-table row: raw value, scaled score, human score,
    both Likert categories, and the per-pair MAD/MAPE."""

    model: str
    metric: str
    raw: float
    scaled: float
    human: float
    category_metric: str
    category_human: str
    mad: float
    mape: float
    scaled_source: str = "ibs"  # ibs | override


def mad(human, metric) -> float:
    """Mean absolute difference between two equally long score lists."""
    x = np.asarray(list(human), dtype=np.float64)
    y = np.asarray(list(metric), dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.size == 0:
        raise ValueError("inputs must be nonempty")
    return float(np.mean(np.abs(x - y)))


def mape(human, metric) -> float:
    """Mean absolute percentage error, with the human score as denominator."""
    x = np.asarray(list(human), dtype=np.float64)
    y = np.asarray(list(metric), dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.size == 0:
        raise ValueError("inputs must be nonempty")
    zero = np.nonzero(x == 0.0)[0]
    if zero.size:
        raise DegenerateInputError(
            f"human score at index {int(zero[0])} is zero; relative error undefined"
        )
    return float(100.0 * np.mean(np.abs(x - y) / x))


def cosine_alignment(a: FeatureMatrix, b: FeatureMatrix) -> float:
    """Cosine similarity between two 1 x D embedding vectors."""
    if a.samples != 1 or b.samples != 1:
        raise ValueError("cosine_alignment expects single-sample feature matrices")
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    va, vb = a.values[0], b.values[0]
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("zero vector: cosine similarity undefined")
    return float(va @ vb / (na * nb))


def build_comparison_table(
    metrics,
    tables: dict[str, IbsTable],
    mos,
    dimension: str,
    model_order=None,
    metric_order=None,
) -> list[AlignmentRow]:
    """Assemble comparison rows for one dimension.

    ``metrics`` rows are (model, metric, raw) or (model, metric, raw,
    scaled_override); an override bypasses the bin tables, which is the
    route for metrics whose published bins are unknown.  Missing MOS
    records or bin tables are collected and reported together.  Rows come
    back ordered by (metric, model); ``model_order``/``metric_order`` pin
    a custom order.
    """
    mos_by_model = {
        (r.model, r.dimension): r.mean_score for r in mos if r.dimension == dimension
    }
    missing = []
    rows: list[AlignmentRow] = []
    for entry in metrics:
        if len(entry) == 3:
            model, metric, raw = entry
            override = None
        else:
            model, metric, raw, override = entry
        raw = float(raw)
        human = mos_by_model.get((model, dimension))
        if human is None:
            missing.append(f"no MOS record for ({model}, {dimension})")
            continue
        if override is None:
            table = tables.get(metric.lower())
            if table is None:
                missing.append(f"no bin table for metric {metric!r} (model {model})")
                continue
            scaled = ibs_scale(table, raw)
            source = "ibs"
        else:
            scaled = float(override)
            source = "override"
        if human == 0.0:
            raise DegenerateInputError(
                f"human score for ({model}, {dimension}) is zero; relative error undefined"
            )
        diff = abs(scaled - human)
        rows.append(
            AlignmentRow(
                model=model,
                metric=metric,
                raw=raw,
                scaled=scaled,
                human=human,
                category_metric=likert_of_score(scaled),
                category_human=likert_of_score(human),
                mad=diff,
                mape=100.0 * diff / human,
                scaled_source=source,
            )
        )
    if missing:
        raise PairResolutionError(missing)

    def rank(seq, value):
        # Lexicographic by default; a configured order pins ranks, with
        # unknown names after the known ones.
        if seq is None:
            return (0, value)
        seq = list(seq)
        return (seq.index(value) if value in seq else len(seq), value)

    rows.sort(key=lambda r: (rank(metric_order, r.metric), rank(model_order, r.model)))
    return rows


def read_mos_csv(path) -> list[MosRecord]:
    """Read MOS records from a CSV with columns model,dimension,mean_score."""
    p = Path(path)
    records = []
    try:
        with p.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            fields = set(reader.fieldnames or ())
            if not {"model", "dimension", "mean_score"} <= fields:
                raise IngestionError(
                    f"{p}: expected columns model,dimension,mean_score, got {sorted(fields)}"
                )
            for i, row in enumerate(reader):
                try:
                    records.append(
                        MosRecord(
                            model=row["model"].strip(),
                            dimension=row["dimension"].strip(),
                            mean_score=float(row["mean_score"]),
                        )
                    )
                except (ValueError, AttributeError) as exc:
                    raise IngestionError(f"{p}: row {i + 1}: {exc}") from exc
    except OSError as exc:
        raise IngestionError(f"{p}: cannot read ({exc})") from exc
    if not records:
        raise IngestionError(f"{p}: no MOS records")
    return records


def read_metric_csv(path, use_scaled: bool = False) -> list[tuple]:
    """Read metric rows from a CSV with columns model,metric,raw[,scaled].

    With ``use_scaled`` the optional scaled column becomes a per-row
    override; otherwise it is ignored.
    """
    p = Path(path)
    rows = []
    try:
        with p.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            fields = set(reader.fieldnames or ())
            if not {"model", "metric", "raw"} <= fields:
                raise IngestionError(
                    f"{p}: expected columns model,metric,raw[,scaled], got {sorted(fields)}"
                )
            for i, row in enumerate(reader):
                try:
                    model = row["model"].strip()
                    metric = row["metric"].strip()
                    raw = float(row["raw"])
                    scaled = row.get("scaled")
                    if use_scaled and scaled not in (None, ""):
                        rows.append((model, metric, raw, float(scaled)))
                    else:
                        rows.append((model, metric, raw))
                except (ValueError, AttributeError) as exc:
                    raise IngestionError(f"{p}: row {i + 1}: {exc}") from exc
    except OSError as exc:
        raise IngestionError(f"{p}: cannot read ({exc})") from exc
    if not rows:
        raise IngestionError(f"{p}: no metric rows")
    return rows
