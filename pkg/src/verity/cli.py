"""Command-line surface: batch metric runs over manifests, raw-to-Likert
scaling, objective stats, human-alignment reports, and a single-pair
convenience command.

Exit codes: 0 success, 1 data error (bad rows, unresolved pairs), 2
usage/config error.  Reports are deterministic: identical inputs and
config produce byte-identical output regardless of the worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import (
    DIMENSIONS,
    build_comparison_table,
    read_metric_csv,
    read_mos_csv,
)
from .errors import ConfigError, IngestionError, PairResolutionError, VerityError
from .features import (
    FeatureMatrix,
    KernelParams,
    ProbMatrix,
    builtin_feature_provider,
    extract_features_builtin,
    fid,
    inception_score,
    kid,
    load_features,
    load_probabilities,
    lpips_distance,
    perceptual_distance,
)
from .ibs import builtin_tables, ibs_scale, likert_of_score, load_ibs_tables
from .image import load_image, resize_bilinear, to_gray, gray_histogram
from .imagestats import aggregate_stats, image_stats
from .nfss import NfssConfig, default_patch_sizes, nfss_evaluate
from .pixel_metrics import (
    MsSsimParams,
    PSNR_SENTINEL_DB,
    SsimParams,
    entropy,
    hist_correlation,
    ms_ssim,
    psnr,
    ssim,
    ssim_patch_mean,
    vif,
)

__all__ = ["main", "entrypoint"]

JOBS_ENV_VAR = "VERITY_JOBS"

REF_METRICS = ("psnr", "ssim", "ms_ssim", "ssim_patches", "vif", "hist_corr", "lpips", "dp", "nfss")
SOLO_METRICS = ("entropy",)
MODEL_METRICS = ("fid", "kid", "is")
ALL_METRICS = REF_METRICS + SOLO_METRICS + MODEL_METRICS
_METRIC_RANK = {name: i for i, name in enumerate(ALL_METRICS)}

_FEATURE_METRICS = {"lpips", "dp", "nfss", "fid", "kid"}
_MIN_BUILTIN_SIZE = 16


@dataclass
class RunConfig:
    """Resolved run settings for the metrics/stats/nfss commands."""

    resize: tuple[int, int] = (299, 299)
    metrics: tuple[str, ...] = ("psnr", "ssim", "ms_ssim", "nfss")
    out_format: str = "csv"
    jobs: int = 1
    features: str = "builtin"  # builtin | files
    ibs_tables_path: str | None = None
    ssim_params: SsimParams = field(default_factory=SsimParams)
    ms_ssim_params: MsSsimParams = field(default_factory=MsSsimParams)
    patch_sizes: tuple[int, ...] | None = None
    histogram_bins: int = 256
    entropy_source: str = "ref"
    normalize_dp: bool = False
    histogram_mode: str = "gray"
    kid_params: KernelParams = field(default_factory=KernelParams)
    kid_unbiased: bool = True

    def validate(self) -> None:
        if self.out_format not in ("csv", "json", "md"):
            raise ConfigError(f"unknown output format {self.out_format!r}")
        if self.features not in ("builtin", "files"):
            raise ConfigError(f"feature provider must be builtin|files, got {self.features!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        unknown = [m for m in self.metrics if m not in ALL_METRICS]
        if unknown:
            raise ConfigError(f"unknown metrics: {', '.join(unknown)}")
        needs_builtin = self.features == "builtin" and bool(
            _FEATURE_METRICS.intersection(self.metrics)
        )
        if needs_builtin and min(self.resize) < _MIN_BUILTIN_SIZE:
            raise ConfigError(
                f"resize target must be at least {_MIN_BUILTIN_SIZE}x{_MIN_BUILTIN_SIZE} "
                "when builtin features are selected"
            )

    def nfss_config(self) -> NfssConfig:
        return NfssConfig(
            resize=self.resize,
            patch_sizes=self.patch_sizes,
            histogram_bins=self.histogram_bins,
            entropy_source=self.entropy_source,
            normalize_dp=self.normalize_dp,
            histogram_mode=self.histogram_mode,
            ssim_params=self.ssim_params,
        )


def _config_from_file(path) -> RunConfig:
    p = Path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{p}: cannot parse config ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{p}: config must be a JSON object")
    cfg = RunConfig()
    known = {
        "resize",
        "metrics",
        "format",
        "jobs",
        "features",
        "ibs_tables",
        "ssim",
        "ms_ssim",
        "nfss",
        "kid",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{p}: unknown config keys: {', '.join(sorted(unknown))}")
    try:
        if "resize" in raw:
            w, h = raw["resize"]
            cfg.resize = (int(w), int(h))
        if "metrics" in raw:
            cfg.metrics = tuple(str(m) for m in raw["metrics"])
        if "format" in raw:
            cfg.out_format = str(raw["format"])
        if "jobs" in raw:
            cfg.jobs = int(raw["jobs"])
        if "features" in raw:
            cfg.features = str(raw["features"])
        if "ibs_tables" in raw and raw["ibs_tables"] is not None:
            cfg.ibs_tables_path = str(raw["ibs_tables"])
        if "ssim" in raw:
            cfg.ssim_params = SsimParams(**raw["ssim"])
        if "ms_ssim" in raw:
            ms = dict(raw["ms_ssim"])
            if "weights" in ms:
                ms["weights"] = tuple(ms["weights"])
            cfg.ms_ssim_params = MsSsimParams(**ms)
        if "nfss" in raw:
            nf = dict(raw["nfss"])
            if "patch_sizes" in nf and nf["patch_sizes"] is not None:
                cfg.patch_sizes = tuple(int(s) for s in nf["patch_sizes"])
            cfg.histogram_bins = int(nf.get("histogram_bins", cfg.histogram_bins))
            cfg.entropy_source = str(nf.get("entropy_source", cfg.entropy_source))
            cfg.normalize_dp = bool(nf.get("normalize_dp", cfg.normalize_dp))
            cfg.histogram_mode = str(nf.get("histogram_mode", cfg.histogram_mode))
        if "kid" in raw:
            kd = dict(raw["kid"])
            cfg.kid_unbiased = bool(kd.pop("unbiased", cfg.kid_unbiased))
            cfg.kid_params = KernelParams(**kd)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{p}: invalid config value ({exc})") from exc
    return cfg


@dataclass
class ManifestRow:
    index: int
    test_path: Path
    model: str
    test_label: str
    ref_path: Path | None = None
    features_path: Path | None = None
    ref_features_path: Path | None = None
    probs_path: Path | None = None
    caption_id: str | None = None


def read_manifest(path) -> list[ManifestRow]:
    """Parse and validate a manifest CSV.

    Relative paths resolve against the manifest's own directory.  Every
    referenced path must exist; an empty manifest is a usage error.
    """
    p = Path(path)
    base = p.parent
    try:
        with p.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            fields = set(reader.fieldnames or ())
            if not {"test_path", "model"} <= fields:
                raise IngestionError(
                    f"{p}: manifest needs at least test_path and model columns, "
                    f"got {sorted(fields)}"
                )
            raw_rows = list(reader)
    except OSError as exc:
        raise IngestionError(f"{p}: cannot read manifest ({exc})") from exc
    if not raw_rows:
        raise ConfigError(f"{p}: manifest has no rows")

    def resolve(cell):
        if cell is None or not cell.strip():
            return None
        q = Path(cell.strip())
        return q if q.is_absolute() else base / q

    rows = []
    problems = []
    for i, raw in enumerate(raw_rows):
        model = (raw.get("model") or "").strip()
        test_label = (raw.get("test_path") or "").strip()
        test = resolve(raw.get("test_path"))
        if test is None:
            problems.append(f"row {i + 1}: missing test_path")
            continue
        if not model:
            problems.append(f"row {i + 1}: empty model label")
        row = ManifestRow(
            index=i,
            test_path=test,
            model=model,
            test_label=test_label,
            ref_path=resolve(raw.get("ref_path")),
            features_path=resolve(raw.get("features_path")),
            ref_features_path=resolve(raw.get("ref_features_path")),
            probs_path=resolve(raw.get("probs_path")),
            caption_id=(raw.get("caption_id") or "").strip() or None,
        )
        for label, q in (
            ("test_path", row.test_path),
            ("ref_path", row.ref_path),
            ("features_path", row.features_path),
            ("ref_features_path", row.ref_features_path),
            ("probs_path", row.probs_path),
        ):
            if q is not None and not q.is_file():
                problems.append(f"row {i + 1}: {label} does not exist: {q}")
        rows.append(row)
    if problems:
        raise IngestionError("manifest validation failed: " + "; ".join(problems))
    return rows


@dataclass
class _RowOutcome:
    row: ManifestRow
    values: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    test_feat: FeatureMatrix | None = None
    ref_feat: FeatureMatrix | None = None
    probs: ProbMatrix | None = None


def _load_row_features(row: ManifestRow, cfg: RunConfig, test_img, ref_img):
    """Feature matrices for the pooled/distance metrics, per provider."""
    if cfg.features == "files":
        test_feat = load_features(row.features_path) if row.features_path else None
        ref_feat = load_features(row.ref_features_path) if row.ref_features_path else None
        return test_feat, ref_feat
    test_feat = builtin_feature_provider(test_img)
    ref_feat = builtin_feature_provider(ref_img) if ref_img is not None else None
    return test_feat, ref_feat


def _row_work(row: ManifestRow, cfg: RunConfig) -> _RowOutcome:
    out = _RowOutcome(row=row)
    w, h = cfg.resize
    try:
        test_img = resize_bilinear(load_image(row.test_path), w, h)
    except VerityError as exc:
        for m in cfg.metrics:
            out.errors[m] = str(exc)
        return out
    gray_test = to_gray(test_img)

    ref_img = None
    gray_ref = None
    ref_error = None
    wants_ref = any(m in cfg.metrics for m in REF_METRICS) or any(
        m in cfg.metrics for m in ("fid", "kid")
    )
    if row.ref_path is not None and wants_ref:
        try:
            ref_img = resize_bilinear(load_image(row.ref_path), w, h)
            gray_ref = to_gray(ref_img)
        except VerityError as exc:
            ref_error = str(exc)

    selected = [m for m in cfg.metrics if m in REF_METRICS or m in SOLO_METRICS]
    for metric in selected:
        if metric in REF_METRICS:
            if ref_error is not None:
                out.errors[metric] = ref_error
                continue
            if ref_img is None:
                out.errors[metric] = f"{metric} requires ref_path"
                continue
        try:
            if metric == "psnr":
                value = psnr(gray_ref, gray_test)
                if math.isinf(value):
                    out.values[metric] = PSNR_SENTINEL_DB
                    out.notes[metric] = "infinite psnr replaced by sentinel"
                else:
                    out.values[metric] = value
            elif metric == "ssim":
                out.values[metric] = ssim(gray_ref, gray_test, cfg.ssim_params)
            elif metric == "ms_ssim":
                out.values[metric] = ms_ssim(
                    gray_ref, gray_test, cfg.ms_ssim_params, cfg.ssim_params
                )
            elif metric == "ssim_patches":
                sizes = cfg.patch_sizes or default_patch_sizes(min(w, h))
                out.values[metric] = ssim_patch_mean(gray_ref, gray_test, sizes, cfg.ssim_params)
            elif metric == "vif":
                out.values[metric] = vif(gray_ref, gray_test)
            elif metric == "hist_corr":
                out.values[metric] = hist_correlation(
                    gray_histogram(gray_ref, cfg.histogram_bins),
                    gray_histogram(gray_test, cfg.histogram_bins),
                )
            elif metric == "lpips":
                # Layered maps only exist for the builtin extractor.
                _, layers_ref = extract_features_builtin(ref_img)
                _, layers_test = extract_features_builtin(test_img)
                out.values[metric] = lpips_distance(layers_ref, layers_test)
                out.notes[metric] = "provider=builtin"
            elif metric == "dp":
                tf, rf = _load_row_features(row, cfg, test_img, ref_img)
                if tf is None or rf is None:
                    out.errors[metric] = "dp requires features for both sides"
                    continue
                out.values[metric] = perceptual_distance(rf, tf)
                out.notes[metric] = f"provider={cfg.features}"
            elif metric == "nfss":
                comp = nfss_evaluate(ref_img, test_img, cfg.nfss_config())
                out.values[metric] = comp.nfss
                out.notes[metric] = f"provider={comp.provider}"
            elif metric == "entropy":
                out.values[metric] = entropy(gray_test, bins=cfg.histogram_bins)
        except (VerityError, ValueError) as exc:
            out.errors[metric] = str(exc)

    if "fid" in cfg.metrics or "kid" in cfg.metrics:
        try:
            tf, rf = _load_row_features(row, cfg, test_img, ref_img if ref_error is None else None)
            out.test_feat = tf
            out.ref_feat = rf
            pool_metrics = [m for m in ("fid", "kid") if m in cfg.metrics]
            if tf is None:
                for m in pool_metrics:
                    out.errors[m] = f"{m} requires test features"
            if rf is None:
                for m in pool_metrics:
                    out.errors[m] = ref_error or f"{m} requires reference features"
        except VerityError as exc:
            for m in ("fid", "kid"):
                if m in cfg.metrics:
                    out.errors[m] = str(exc)

    if "is" in cfg.metrics:
        if row.probs_path is None:
            out.errors["is"] = "inception_score requires probability file"
        else:
            try:
                out.probs = load_probabilities(row.probs_path)
            except VerityError as exc:
                out.errors["is"] = str(exc)
    return out


def _pool_feature_rows(parts: list[FeatureMatrix], source: str) -> FeatureMatrix | None:
    if not parts:
        return None
    values = np.concatenate([p.values for p in parts], axis=0)
    return FeatureMatrix(values.shape[0], values.shape[1], values, source=source)


def _model_metric_rows(outcomes: list[_RowOutcome], cfg: RunConfig) -> list[dict]:
    """Per-model rows: pooled fid/kid/is plus means of the per-image metrics."""
    models = sorted({o.row.model for o in outcomes})
    rows: list[dict] = []
    for metric in cfg.metrics:
        for model in models:
            group = [o for o in outcomes if o.row.model == model]
            if metric in MODEL_METRICS:
                value, note, error = None, "", None
                if metric in ("fid", "kid"):
                    gens = [o.test_feat for o in group if o.test_feat is not None]
                    refs = [o.ref_feat for o in group if o.ref_feat is not None]
                    gen = _pool_feature_rows(gens, cfg.features)
                    ref = _pool_feature_rows(refs, cfg.features)
                    if gen is None or ref is None:
                        error = f"{metric}: no pooled features for model {model!r}"
                    else:
                        try:
                            if metric == "fid":
                                value = fid(ref, gen)
                            else:
                                value = kid(ref, gen, cfg.kid_params, cfg.kid_unbiased)
                            note = f"provider={cfg.features}; n_ref={ref.samples}; n_gen={gen.samples}"
                        except (VerityError, ValueError) as exc:
                            error = str(exc)
                else:  # is
                    mats = [o.probs for o in group if o.probs is not None]
                    if not mats:
                        continue  # per-row errors already recorded
                    try:
                        pooled = np.concatenate([m.rows for m in mats], axis=0)
                        value = inception_score(
                            ProbMatrix(pooled.shape[0], pooled.shape[1], pooled)
                        )
                        note = f"n={pooled.shape[0]}"
                    except (VerityError, ValueError) as exc:
                        error = str(exc)
                rows.append(
                    {
                        "scope": "model",
                        "model": model,
                        "metric": metric,
                        "item": "",
                        "value": value,
                        "note": note if error is None else f"error: {error}",
                        "error": error is not None,
                    }
                )
            else:
                values = [o.values[metric] for o in group if metric in o.values]
                if not values:
                    continue
                rows.append(
                    {
                        "scope": "model",
                        "model": model,
                        "metric": metric,
                        "item": "",
                        "value": float(np.mean(values)),
                        "note": f"mean of {len(values)} images",
                        "error": False,
                    }
                )
    rows.sort(key=lambda r: (_METRIC_RANK[r["metric"]], r["model"]))
    return rows


def _run_rows(rows: list[ManifestRow], cfg: RunConfig) -> list[_RowOutcome]:
    if cfg.jobs == 1:
        return [_row_work(r, cfg) for r in rows]
    results: dict[int, _RowOutcome] = {}
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        futures = {pool.submit(_row_work, r, cfg): r.index for r in rows}
        for fut, idx in futures.items():
            results[idx] = fut.result()
    return [results[r.index] for r in rows]


def _cell(value, fmt: str) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.2f}" if fmt == "md" else repr(value)
    return str(value)


def _write_report(rows: list[dict], columns: list[str], fmt: str, out_path) -> None:
    if fmt == "json":
        payload = [{c: r.get(c) for c in columns} for r in rows]
        text = json.dumps({"rows": payload}, indent=2) + "\n"
    elif fmt == "md":
        lines = ["| " + " | ".join(columns) + " |", "| " + " | ".join("---" for _ in columns) + " |"]
        for r in rows:
            lines.append("| " + " | ".join(_cell(r.get(c), "md") for c in columns) + " |")
        text = "\n".join(lines) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_cell(r.get(c), "csv") for c in columns])
        text = buf.getvalue()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _resolve_config(args) -> RunConfig:
    cfg = _config_from_file(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "metrics", None):
        cfg.metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    cfg.metrics = tuple(dict.fromkeys(cfg.metrics))
    if getattr(args, "format", None):
        cfg.out_format = args.format
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    elif os.environ.get(JOBS_ENV_VAR):
        try:
            cfg.jobs = int(os.environ[JOBS_ENV_VAR])
        except ValueError as exc:
            raise ConfigError(f"{JOBS_ENV_VAR} must be an integer") from exc
    if getattr(args, "ibs_tables", None):
        cfg.ibs_tables_path = args.ibs_tables
    cfg.validate()
    return cfg


def _cmd_metrics(args) -> int:
    cfg = _resolve_config(args)
    rows = read_manifest(args.manifest)
    outcomes = _run_rows(rows, cfg)

    report: list[dict] = []
    had_error = False
    per_image = [m for m in cfg.metrics if m in REF_METRICS or m in SOLO_METRICS]
    per_row_model = [m for m in cfg.metrics if m in MODEL_METRICS]
    for o in outcomes:
        for metric in sorted(per_image, key=_METRIC_RANK.get):
            if metric in o.values:
                report.append(
                    {
                        "scope": "image",
                        "model": o.row.model,
                        "metric": metric,
                        "item": o.row.test_label,
                        "value": o.values[metric],
                        "note": o.notes.get(metric, ""),
                        "error": False,
                    }
                )
            elif metric in o.errors:
                had_error = True
                report.append(
                    {
                        "scope": "image",
                        "model": o.row.model,
                        "metric": metric,
                        "item": o.row.test_label,
                        "value": None,
                        "note": f"error: {o.errors[metric]}",
                        "error": True,
                    }
                )
        for metric in per_row_model:
            if metric in o.errors:
                had_error = True
                report.append(
                    {
                        "scope": "image",
                        "model": o.row.model,
                        "metric": metric,
                        "item": o.row.test_label,
                        "value": None,
                        "note": f"error: {o.errors[metric]}",
                        "error": True,
                    }
                )

    model_rows = _model_metric_rows(outcomes, cfg)
    had_error = had_error or any(r["error"] for r in model_rows)
    report.extend(model_rows)
    _write_report(report, ["scope", "model", "metric", "item", "value", "note"], cfg.out_format, args.out)
    return 1 if had_error else 0


def _cmd_stats(args) -> int:
    cfg = _resolve_config(args)
    rows = read_manifest(args.manifest)
    report: list[dict] = []
    had_error = False
    stats_rows = []
    for row in rows:
        try:
            stats = image_stats(load_image(row.test_path))
            stats_rows.append((row.model, stats))
            report.append(
                {
                    "scope": "image",
                    "model": row.model,
                    "item": row.test_label,
                    "hue": stats.hue_mean,
                    "saturation": stats.sat_mean,
                    "brightness": stats.bright_mean,
                    "vibrancy": stats.vibrancy,
                    "entropy": stats.entropy_bits,
                    "note": "",
                }
            )
        except (VerityError, ValueError) as exc:
            had_error = True
            report.append(
                {
                    "scope": "image",
                    "model": row.model,
                    "item": row.test_label,
                    "note": f"error: {exc}",
                }
            )
    if stats_rows:
        for model, agg in aggregate_stats(stats_rows):
            report.append(
                {
                    "scope": "model",
                    "model": model,
                    "item": "",
                    "hue": agg.hue_mean,
                    "saturation": agg.sat_mean,
                    "brightness": agg.bright_mean,
                    "vibrancy": agg.vibrancy,
                    "entropy": agg.entropy_bits,
                    "note": "",
                }
            )
    columns = ["scope", "model", "item", "hue", "saturation", "brightness", "vibrancy", "entropy", "note"]
    _write_report(report, columns, cfg.out_format, args.out)
    return 1 if had_error else 0


def _load_tables(path_arg):
    tables = builtin_tables()
    if path_arg:
        tables.update(load_ibs_tables(path_arg))
    return tables


def _cmd_ibs(args) -> int:
    tables = _load_tables(args.ibs_tables)
    metric = args.metric.lower()
    table = tables.get(metric)
    if table is None:
        print(
            f"error: no bin table for metric {args.metric!r}; "
            f"available: {', '.join(sorted(tables))}",
            file=sys.stderr,
        )
        return 2
    scaled = ibs_scale(table, args.value)
    print(f"{args.value:g} {scaled:.2f} {likert_of_score(scaled)}")
    return 0


def _cmd_compare(args) -> int:
    tables = _load_tables(args.ibs_tables)
    metric_rows = read_metric_csv(args.metrics_csv, use_scaled=args.scaled_override)
    mos = read_mos_csv(args.mos_csv)
    if args.dimension not in DIMENSIONS:
        raise ConfigError(
            f"unknown dimension {args.dimension!r}; expected one of {', '.join(DIMENSIONS)}"
        )
    try:
        rows = build_comparison_table(metric_rows, tables, mos, args.dimension)
    except PairResolutionError as exc:
        for item in exc.missing:
            print(f"error: {item}", file=sys.stderr)
        return 1
    report = [
        {
            "model": r.model,
            "metric": r.metric,
            "raw": r.raw,
            "scaled": r.scaled,
            "human": r.human,
            "category_metric": r.category_metric,
            "category_human": r.category_human,
            "mad": r.mad,
            "mape": r.mape,
            "scaled_source": r.scaled_source,
        }
        for r in rows
    ]
    columns = [
        "model",
        "metric",
        "raw",
        "scaled",
        "human",
        "category_metric",
        "category_human",
        "mad",
        "mape",
        "scaled_source",
    ]
    fmt = args.format or "csv"
    _write_report(report, columns, fmt, args.out)
    return 0


def _cmd_nfss(args) -> int:
    cfg = _resolve_config(args)
    comp = nfss_evaluate(
        load_image(args.ref), load_image(args.test), cfg.nfss_config()
    )
    if cfg.out_format == "json":
        print(
            json.dumps(
                {
                    "ssim_ms": comp.ssim_ms,
                    "dp": comp.dp,
                    "hc": comp.hc,
                    "h": comp.h,
                    "alpha": comp.alpha,
                    "nfss": comp.nfss,
                    "provider": comp.provider,
                },
                indent=2,
            )
        )
    else:
        for name in ("ssim_ms", "dp", "hc", "h", "alpha", "nfss"):
            print(f"{name} {getattr(comp, name)!r}")
        print(f"provider {comp.provider}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verity",
        description="Image quality, photorealism and alignment metrics with "
        "Likert-scale rescaling and human-MOS comparison reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", help="JSON run-config file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv", "json", "md"], help="output format")
        p.add_argument("--jobs", type=int, help=f"worker threads (default ${JOBS_ENV_VAR} or 1)")
        p.add_argument("--ibs-tables", help="bin-table file overriding/extending the builtins")

    p_metrics = sub.add_parser("metrics", help="compute metrics over a manifest")
    p_metrics.add_argument("--manifest", required=True)
    p_metrics.add_argument("--metrics", help="comma-separated metric list")
    add_common(p_metrics)
    p_metrics.set_defaults(func=_cmd_metrics)

    p_ibs = sub.add_parser("ibs", help="scale one raw metric value onto 0-5")
    p_ibs.add_argument("metric")
    p_ibs.add_argument("value", type=float)
    p_ibs.add_argument("--ibs-tables", help="bin-table file overriding/extending the builtins")
    p_ibs.set_defaults(func=_cmd_ibs)

    p_stats = sub.add_parser("stats", help="objective image properties over a manifest")
    p_stats.add_argument("--manifest", required=True)
    add_common(p_stats)
    p_stats.set_defaults(func=_cmd_stats)

    p_cmp = sub.add_parser("compare", help="metric-vs-human alignment report")
    p_cmp.add_argument("--metrics-csv", required=True, dest="metrics_csv")
    p_cmp.add_argument("--mos-csv", required=True, dest="mos_csv")
    p_cmp.add_argument("--dimension", required=True)
    p_cmp.add_argument(
        "--scaled-override",
        action="store_true",
        help="use the scaled column of the metrics CSV instead of the bin tables",
    )
    p_cmp.add_argument("--out")
    p_cmp.add_argument("--format", choices=["csv", "json", "md"])
    p_cmp.add_argument("--ibs-tables")
    p_cmp.set_defaults(func=_cmd_compare)

    p_nfss = sub.add_parser("nfss", help="composite score for a single image pair")
    p_nfss.add_argument("--ref", required=True)
    p_nfss.add_argument("--test", required=True)
    add_common(p_nfss)
    p_nfss.set_defaults(func=_cmd_nfss)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VerityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
