from __future__ import annotations

import numpy as np
import pytest

from verity.alignment import (
    AlignmentRow,
    MosRecord,
    build_comparison_table,
    cosine_alignment,
    mad,
    mape,
    read_metric_csv,
    read_mos_csv,
)
from verity.errors import DegenerateInputError, IngestionError, PairResolutionError
from verity.features import FeatureMatrix
from verity.ibs import builtin_tables


def _fm(vec):
    return FeatureMatrix.from_array(np.asarray([vec], dtype=np.float64))


class TestMad:
    def test_paper_fid_row(self):
        assert mad([4.52], [3.30]) == pytest.approx(1.22, abs=1e-9)

    def test_equal_lists(self):
        assert mad([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_mean_of_absolute_differences(self):
        assert mad([1.0, 3.0], [2.0, 2.0]) == pytest.approx(1.0)

    def test_symmetry(self, rng):
        x = rng.uniform(0, 5, size=10)
        y = rng.uniform(0, 5, size=10)
        assert mad(x, y) == mad(y, x)

    def test_zero_iff_equal(self, rng):
        x = rng.uniform(0, 5, size=6)
        assert mad(x, x) == 0.0
        assert mad(x, x + 0.01) > 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            mad([1.0], [1.0, 2.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            mad([], [])


class TestMape:
    def test_paper_fid_row(self):
        assert mape([3.30], [4.52]) == pytest.approx(36.97, abs=0.05)

    def test_paper_lpips_glide_row(self):
        assert mape([2.04], [2.65]) == pytest.approx(29.90, abs=0.05)

    def test_equal_lists(self):
        assert mape([2.0, 3.0], [2.0, 3.0]) == 0.0

    def test_not_symmetric_counterexample(self):
        assert mape([2.0], [4.0]) == pytest.approx(100.0)
        assert mape([4.0], [2.0]) == pytest.approx(50.0)

    def test_zero_human_guard(self):
        with pytest.raises(DegenerateInputError, match="index 1"):
            mape([2.0, 0.0], [1.0, 1.0])


class TestCosineAlignment:
    def test_identical(self):
        assert cosine_alignment(_fm([1.0, 2.0]), _fm([1.0, 2.0])) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_alignment(_fm([1.0, 0.0]), _fm([0.0, 1.0])) == 0.0

    def test_scale_invariance(self):
        assert cosine_alignment(_fm([1.0, 1.0]), _fm([2.0, 2.0])) == pytest.approx(1.0)

    def test_zero_vector_degenerate(self):
        with pytest.raises(DegenerateInputError, match="zero"):
            cosine_alignment(_fm([0.0, 0.0]), _fm([1.0, 0.0]))

    def test_range(self, rng):
        for _ in range(20):
            a, b = rng.normal(size=(2, 8))
            got = cosine_alignment(_fm(a), _fm(b))
            assert -1.0 - 1e-12 <= got <= 1.0 + 1e-12


MOS = [
    MosRecord("Stable Diffusion", "photorealism", 3.30),
    MosRecord("DALLE2", "photorealism", 3.63),
    MosRecord("GLIDE", "photorealism", 2.04),
    MosRecord("DALLE3", "photorealism", 2.75),
]


class TestBuildComparisonTable:
    def test_paper_fid_row_with_override(self):
        rows = build_comparison_table(
            [("Stable Diffusion", "FID", 28.83, 4.52)],
            builtin_tables(),
            MOS,
            "photorealism",
        )
        (row,) = rows
        assert row.mad == pytest.approx(1.22, abs=1e-9)
        assert row.mape == pytest.approx(36.97, abs=0.05)
        assert row.category_metric == "Strongly Agree"
        assert row.category_human == "Somewhat Agree"
        assert row.scaled_source == "override"

    def test_lpips_glide_row(self):
        rows = build_comparison_table(
            [("GLIDE", "LPIPS", 0.67, 2.65)], builtin_tables(), MOS, "photorealism"
        )
        (row,) = rows
        assert row.mad == pytest.approx(0.61, abs=0.02)
        assert row.mape == pytest.approx(29.90, abs=0.1)
        assert row.category_metric == "Neutral"

    def test_self_consistent_row(self):
        rows = build_comparison_table(
            [("GLIDE", "SSIM", 0.45, 2.04)], builtin_tables(), MOS, "photorealism"
        )
        assert rows[0].mad == 0.0
        assert rows[0].mape == 0.0
        assert rows[0].category_metric == rows[0].category_human

    def test_ibs_route_uses_tables(self):
        rows = build_comparison_table(
            [("GLIDE", "ssim", 0.45)], builtin_tables(), MOS, "photorealism"
        )
        assert rows[0].scaled == pytest.approx(3.55, abs=1e-12)
        assert rows[0].scaled_source == "ibs"

    def test_missing_pairs_collected(self):
        with pytest.raises(PairResolutionError) as exc:
            build_comparison_table(
                [
                    ("Stable Diffusion", "clip", 0.5),
                    ("NoSuchModel", "ssim", 0.5),
                ],
                builtin_tables(),
                MOS,
                "photorealism",
            )
        text = str(exc.value)
        assert "clip" in text
        assert "NoSuchModel" in text
        assert len(exc.value.missing) == 2

    def test_deterministic_ordering(self):
        entries = [
            ("GLIDE", "ssim", 0.1),
            ("DALLE2", "ssim", 0.2),
            ("GLIDE", "fid", 20.0),
        ]
        rows1 = build_comparison_table(entries, builtin_tables(), MOS, "photorealism")
        rows2 = build_comparison_table(list(reversed(entries)), builtin_tables(), MOS, "photorealism")
        assert [(r.metric, r.model) for r in rows1] == [(r.metric, r.model) for r in rows2]
        assert [(r.metric, r.model) for r in rows1] == [
            ("fid", "GLIDE"),
            ("ssim", "DALLE2"),
            ("ssim", "GLIDE"),
        ]

    def test_model_order_configurable(self):
        entries = [("GLIDE", "ssim", 0.1), ("DALLE2", "ssim", 0.2), ("Stable Diffusion", "ssim", 0.3)]
        rows = build_comparison_table(
            entries,
            builtin_tables(),
            MOS,
            "photorealism",
            model_order=["Stable Diffusion", "DALLE2", "GLIDE"],
        )
        assert [r.model for r in rows] == ["Stable Diffusion", "DALLE2", "GLIDE"]

    def test_row_internal_consistency(self):
        rows = build_comparison_table(
            [("DALLE2", "ssim", 0.33), ("GLIDE", "fid", 55.0)],
            builtin_tables(),
            MOS,
            "photorealism",
        )
        for r in rows:
            assert r.mad == pytest.approx(abs(r.scaled - r.human), abs=1e-9)
            assert r.mape == pytest.approx(100.0 * r.mad / r.human, abs=1e-6)


class TestCsvReaders:
    def test_mos_round_trip(self, tmp_path):
        p = tmp_path / "mos.csv"
        p.write_text("model,dimension,mean_score\nA,photorealism,3.5\n")
        records = read_mos_csv(p)
        assert records == [MosRecord("A", "photorealism", 3.5)]

    def test_mos_bad_dimension(self, tmp_path):
        p = tmp_path / "mos.csv"
        p.write_text("model,dimension,mean_score\nA,goodness,3.5\n")
        with pytest.raises(IngestionError, match="row 1"):
            read_mos_csv(p)

    def test_mos_score_out_of_range(self, tmp_path):
        p = tmp_path / "mos.csv"
        p.write_text("model,dimension,mean_score\nA,photorealism,5.5\n")
        with pytest.raises(IngestionError):
            read_mos_csv(p)

    def test_metric_csv_with_override_column(self, tmp_path):
        p = tmp_path / "metrics.csv"
        p.write_text("model,metric,raw,scaled\nA,fid,28.83,4.52\nB,ssim,0.45,\n")
        rows = read_metric_csv(p, use_scaled=True)
        assert rows[0] == ("A", "fid", 28.83, 4.52)
        assert rows[1] == ("B", "ssim", 0.45)

    def test_metric_csv_ignores_override_without_flag(self, tmp_path):
        p = tmp_path / "metrics.csv"
        p.write_text("model,metric,raw,scaled\nA,fid,28.83,4.52\n")
        rows = read_metric_csv(p)
        assert rows == [("A", "fid", 28.83)]

    def test_metric_csv_missing_columns(self, tmp_path):
        p = tmp_path / "metrics.csv"
        p.write_text("model,value\nA,1\n")
        with pytest.raises(IngestionError, match="columns"):
            read_metric_csv(p)


def test_alignment_row_is_plain_record():
    row = AlignmentRow(
        model="A",
        metric="ssim",
        raw=0.45,
        scaled=3.55,
        human=3.30,
        category_metric="Somewhat Agree",
        category_human="Somewhat Agree",
        mad=0.25,
        mape=7.58,
    )
    assert row.scaled_source == "ibs"
