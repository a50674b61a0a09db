"""Distribution- and feature-space metrics over pluggable feature providers.

The Fréchet distance, kernel MMD, layered perceptual distance and the
exponentiated-KL diversity score all operate on feature or probability
matrices.  Matrices come either from the deterministic built-in extractor
(a pyramid of cell-gridded gradient-orientation histograms) or from files
produced by external networks; no neural inference happens in-process.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IngestionError
from .image import ImageBuffer, to_gray

__all__ = [
    "FeatureMatrix",
    "FeatureLayer",
    "LayeredFeatures",
    "KernelParams",
    "ProbMatrix",
    "extract_features_builtin",
    "builtin_feature_provider",
    "load_features",
    "load_probabilities",
    "matrix_sqrt_psd",
    "fid",
    "kid",
    "lpips_distance",
    "perceptual_distance",
    "inception_score",
]

BUILTIN_SOURCE = "builtin"

_LEVELS = 3
_GRID = 4
_ORIENT_BINS = 8
_BUILTIN_DIMS = _LEVELS * _GRID * _GRID * _ORIENT_BINS  # 384
_MIN_EXTRACT_SIZE = 16


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FeatureMatrix:
    """N x D matrix of per-sample feature vectors."""

    samples: int
    dims: int
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if self.samples < 1 or self.dims < 1:
            raise ValueError("samples and dims must be >= 1")
        if arr.shape != (self.samples, self.dims):
            raise ValueError(f"values shape {arr.shape} != ({self.samples}, {self.dims})")
        if not np.all(np.isfinite(arr)):
            raise ValueError("feature values must be finite")
        object.__setattr__(self, "values", _readonly(arr))

    @classmethod
    def from_array(cls, arr, source: str = "") -> "FeatureMatrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
        return cls(samples=arr.shape[0], dims=arr.shape[1], values=arr, source=source)


@dataclass(frozen=True)
class FeatureLayer:
    """One feature map: height x width spatial grid of channel vectors."""

    height: int
    width: int
    channels: int
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.shape != (self.height, self.width, self.channels):
            raise ValueError(
                f"layer shape {arr.shape} != ({self.height}, {self.width}, {self.channels})"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("layer values must be finite")
        object.__setattr__(self, "values", _readonly(arr))


@dataclass(frozen=True)
class LayeredFeatures:
    """Ordered per-layer feature maps."""

    layers: tuple[FeatureLayer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))


@dataclass(frozen=True)
class KernelParams:
    """Kernel for the MMD estimator.

    ``alpha`` and ``gamma`` default to 1/D at evaluation time when left as
    None.  Polynomial: (alpha * x.y + c)^d; rbf: exp(-gamma*|x-y|^2);
    exponential: exp(-gamma*|x-y|).
    """

    kind: str = "polynomial"
    alpha: float | None = None
    c: float = 1.0
    d: int = 3
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("polynomial", "rbf", "exponential"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "polynomial" and self.d < 1:
            raise ValueError("polynomial degree must be >= 1")
        if self.kind in ("rbf", "exponential") and self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class ProbMatrix:
    """N x K matrix of per-sample class probabilities (rows on the simplex)."""

    samples: int
    classes: int
    rows: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=np.float64)
        if arr.shape != (self.samples, self.classes):
            raise ValueError(f"rows shape {arr.shape} != ({self.samples}, {self.classes})")
        if not np.all(np.isfinite(arr)):
            raise ValueError("probabilities must be finite")
        if arr.min(initial=0.0) < 0.0:
            raise ValueError("probabilities must be nonnegative")
        sums = arr.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > 1e-6)[0]
        if bad.size:
            raise ValueError(f"row {bad[0]} does not sum to 1 (sum={sums[bad[0]]!r})")
        object.__setattr__(self, "rows", _readonly(arr))

    @classmethod
    def from_array(cls, arr) -> "ProbMatrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
        return cls(samples=arr.shape[0], classes=arr.shape[1], rows=arr)


def _mean_pool2(a: np.ndarray) -> np.ndarray:
    h2, w2 = a.shape[0] // 2, a.shape[1] // 2
    return a[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2).mean(axis=(1, 3))


def _orientation_grid(a: np.ndarray) -> np.ndarray:
    """4x4 cell grid of magnitude-weighted 8-bin gradient-orientation
    histograms for one pyramid level."""
    h, w = a.shape
    gx = np.zeros_like(a)
    gy = np.zeros_like(a)
    gx[:, 1:-1] = 0.5 * (a[:, 2:] - a[:, :-2])
    gy[1:-1, :] = 0.5 * (a[2:, :] - a[:-2, :])
    mag = np.hypot(gx, gy)
    ang = np.mod(np.arctan2(gy, gx), 2.0 * np.pi)
    bins = np.minimum((ang * (_ORIENT_BINS / (2.0 * np.pi))).astype(np.int64), _ORIENT_BINS - 1)

    ys = [h * i // _GRID for i in range(_GRID + 1)]
    xs = [w * i // _GRID for i in range(_GRID + 1)]
    grid = np.zeros((_GRID, _GRID, _ORIENT_BINS))
    for cy in range(_GRID):
        for cx in range(_GRID):
            sl = np.s_[ys[cy] : ys[cy + 1], xs[cx] : xs[cx + 1]]
            grid[cy, cx] = np.bincount(
                bins[sl].ravel(), weights=mag[sl].ravel(), minlength=_ORIENT_BINS
            )
    return grid


def extract_features_builtin(img: ImageBuffer) -> tuple[FeatureMatrix, LayeredFeatures]:
    """Deterministic hand-crafted descriptor.

    The grayscale image forms a 3-level dyadic pyramid (2x2 mean-pool);
    each level is split into a 4x4 cell grid with an 8-orientation
    gradient-magnitude histogram per cell, L2-normalized per level.  The
    concatenation is a 1x384 feature vector; the per-level grids double as
    layered 4x4x8 feature maps.  A zero-gradient level normalizes to the
    zero vector.
    """
    if img.width < _MIN_EXTRACT_SIZE or img.height < _MIN_EXTRACT_SIZE:
        raise ValueError(
            f"builtin extractor requires at least {_MIN_EXTRACT_SIZE}x{_MIN_EXTRACT_SIZE} images"
        )
    level = to_gray(img).data
    grids = []
    for i in range(_LEVELS):
        if i > 0:
            level = _mean_pool2(level)
        grid = _orientation_grid(level)
        norm = float(np.linalg.norm(grid))
        if norm > 0.0:
            grid = grid / norm
        grids.append(grid)
    vec = np.concatenate([g.ravel() for g in grids])
    matrix = FeatureMatrix(1, _BUILTIN_DIMS, vec[None, :], source=BUILTIN_SOURCE)
    layered = LayeredFeatures(
        tuple(FeatureLayer(_GRID, _GRID, _ORIENT_BINS, g) for g in grids)
    )
    return matrix, layered


def builtin_feature_provider(img: ImageBuffer) -> FeatureMatrix:
    """Feature-provider callable backed by the built-in extractor."""
    return extract_features_builtin(img)[0]


def _parse_matrix_file(path, tag: str):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"{p}: cannot read ({exc})") from exc
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith(f"#{tag}"):
        raise IngestionError(f"{p}: missing '#{tag} N D ...' header line")
    head = lines[0].split()
    if len(head) < 3:
        raise IngestionError(f"{p}: malformed header {lines[0]!r}")
    try:
        n, d = int(head[1]), int(head[2])
    except ValueError as exc:
        raise IngestionError(f"{p}: non-integer dimensions in header") from exc
    if n < 1 or d < 1:
        raise IngestionError(f"{p}: dimensions must be >= 1, got {n}x{d}")
    source = " ".join(head[3:])
    body = lines[1:]
    if len(body) != n:
        raise IngestionError(f"{p}: header declares {n} rows, found {len(body)}")
    out = np.empty((n, d), dtype=np.float64)
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != d:
            raise IngestionError(f"{p}: row {i}: expected {d} values, got {len(toks)}")
        for j, tok in enumerate(toks):
            try:
                v = float(tok)
            except ValueError as exc:
                raise IngestionError(f"{p}: row {i}, column {j}: not a number: {tok!r}") from exc
            if not np.isfinite(v):
                raise IngestionError(f"{p}: row {i}, column {j}: non-finite value {tok!r}")
            out[i, j] = v
    return out, source


def load_features(path) -> FeatureMatrix:
    """Read a feature-matrix file: ``#features N D source`` then N rows of
    D space-separated decimals."""
    arr, source = _parse_matrix_file(path, "features")
    return FeatureMatrix(arr.shape[0], arr.shape[1], arr, source=source)


def load_probabilities(path) -> ProbMatrix:
    """Read a probability-matrix file: ``#probs N K`` then N simplex rows."""
    arr, _ = _parse_matrix_file(path, "probs")
    if arr.min(initial=0.0) < 0.0:
        i = int(np.argwhere(arr < 0)[0][0])
        raise IngestionError(f"{path}: row {i}: negative probability")
    sums = arr.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > 1e-6)[0]
    if bad.size:
        raise IngestionError(f"{path}: row {int(bad[0])}: probabilities sum to {sums[bad[0]]!r}")
    return ProbMatrix(arr.shape[0], arr.shape[1], arr)


def matrix_sqrt_psd(m) -> np.ndarray:
    """Principal square root of a symmetric PSD matrix.

    Eigenvalues are clamped at zero before square-rooting, so slightly
    indefinite inputs (round-off) are handled; the result R satisfies
    R @ R ~= m.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    vals, vecs = np.linalg.eigh(a)
    vals = np.sqrt(np.maximum(vals, 0.0))
    root = (vecs * vals) @ vecs.T
    return 0.5 * (root + root.T)


def _mean_and_cov(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = x.mean(axis=0)
    xc = x - mu
    return mu, xc.T @ xc / (x.shape[0] - 1)


def fid(real: FeatureMatrix, gen: FeatureMatrix) -> float:
    """Fréchet distance between Gaussian fits of two feature sets.

    The covariance cross term uses the symmetric similarity form
    (Sr^1/2 Sg Sr^1/2)^1/2, equal in trace to the plain product form but
    numerically stable.  Covariances use the unbiased (N-1) estimator.
    Round-off negatives clamp to 0.
    """
    if real.dims != gen.dims:
        raise ValueError(f"dimension mismatch: {real.dims} vs {gen.dims}")
    if real.samples < 2 or gen.samples < 2:
        raise ValueError("fid requires at least 2 samples per side")
    mu_r, cov_r = _mean_and_cov(real.values)
    mu_g, cov_g = _mean_and_cov(gen.values)
    root_r = matrix_sqrt_psd(cov_r)
    cross = matrix_sqrt_psd(root_r @ cov_g @ root_r)
    diff = mu_r - mu_g
    value = float(diff @ diff + np.trace(cov_r) + np.trace(cov_g) - 2.0 * np.trace(cross))
    return max(value, 0.0)


def _kernel_matrix(x: np.ndarray, y: np.ndarray, p: KernelParams) -> np.ndarray:
    d = x.shape[1]
    if p.kind == "polynomial":
        alpha = p.alpha if p.alpha is not None else 1.0 / d
        return (alpha * (x @ y.T) + p.c) ** p.d
    gamma = p.gamma if p.gamma is not None else 1.0 / d
    sq = np.maximum(
        (x * x).sum(axis=1)[:, None] + (y * y).sum(axis=1)[None, :] - 2.0 * (x @ y.T),
        0.0,
    )
    if p.kind == "rbf":
        return np.exp(-gamma * sq)
    return np.exp(-gamma * np.sqrt(sq))


def kid(
    real: FeatureMatrix,
    gen: FeatureMatrix,
    params: KernelParams | None = None,
    unbiased: bool = True,
) -> float:
    """Squared maximum mean discrepancy between two feature sets.

    The default unbiased estimator drops the diagonal of the within-set
    kernel sums and may go slightly negative; the biased estimator is the
    plain mean-embedding difference and is nonnegative up to round-off.
    """
    p = params or KernelParams()
    if real.dims != gen.dims:
        raise ValueError(f"dimension mismatch: {real.dims} vs {gen.dims}")
    n, m = real.samples, gen.samples
    if n < 2 or m < 2:
        raise ValueError("kid requires at least 2 samples per side")
    x, y = real.values, gen.values
    kxx = _kernel_matrix(x, x, p)
    kyy = _kernel_matrix(y, y, p)
    kxy = _kernel_matrix(x, y, p)
    if unbiased:
        term_x = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
        term_y = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    else:
        term_x = kxx.mean()
        term_y = kyy.mean()
    return float(term_x + term_y - 2.0 * kxy.mean())


def lpips_distance(a: LayeredFeatures, b: LayeredFeatures) -> float:
    """Layered feature distance: squared channel-vector differences averaged
    over each layer's spatial grid, summed across layers (no learned
    channel weights)."""
    if len(a.layers) != len(b.layers):
        raise ValueError(f"layer count mismatch: {len(a.layers)} vs {len(b.layers)}")
    total = 0.0
    for i, (la, lb) in enumerate(zip(a.layers, b.layers)):
        if (la.height, la.width, la.channels) != (lb.height, lb.width, lb.channels):
            raise ValueError(f"layer {i} shape mismatch")
        diff = la.values - lb.values
        total += float((diff * diff).sum()) / (la.height * la.width)
    return total


def perceptual_distance(fa: FeatureMatrix, fb: FeatureMatrix) -> float:
    """Unsquared Euclidean distance between two 1 x D feature vectors."""
    if fa.samples != 1 or fb.samples != 1:
        raise ValueError("perceptual_distance expects single-sample feature matrices")
    if fa.dims != fb.dims:
        raise ValueError(f"dimension mismatch: {fa.dims} vs {fb.dims}")
    return float(np.linalg.norm(fa.values[0] - fb.values[0]))


def inception_score(p: ProbMatrix) -> float:
    """exp(mean KL(p(y|x) || p(y))) with p(y) the column-wise mean.

    Zero conditional probabilities contribute nothing to the KL terms.
    """
    rows = p.rows
    marginal = rows.mean(axis=0)
    safe_rows = np.where(rows > 0.0, rows, 1.0)
    safe_marg = np.where(marginal > 0.0, marginal, 1.0)
    terms = np.where(rows > 0.0, rows * (np.log(safe_rows) - np.log(safe_marg)), 0.0)
    return float(np.exp(terms.sum(axis=1).mean()))
