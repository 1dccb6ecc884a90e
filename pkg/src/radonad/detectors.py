"""Series-level and point-level anomaly scorers.

A fitted detector carries the whole feature pipeline (window config,
directions, grid, optional sphering) plus the training bank of CR features.
Scoring recomputes the query's CR features through the exact same primitives
used at fit time, so a bank member rescored against its own bank is at zero
distance.

Point scoring comes in two flavors matching the two anomaly families:

* a collective scorer that slides a context window over the series and
  scores each window as a standalone series against a window-trained bank;
* a causal regressor that predicts each point from the CR features of the
  trailing context window and scores the absolute residual.

Windows are treated as standalone series everywhere (their features are
clamped at the window edges, not at the parent series edges): the regressor
must not peek past the prediction target, and the collective scorer mirrors
that reading for consistency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from radonad.data import TimeSeries
from radonad.distances import DISTANCE_KINDS, pairwise_to_bank
from radonad.eigen import eigh_symmetric
from radonad.parallel import ordered_map
from radonad.radon import (
    CRFeatures,
    DirectionSet,
    HistogramGrid,
    RadonConfig,
    _cdf_from_indices,
    bin_indices,
    fit_grid,
    project,
    sample_directions,
)
from radonad.sphering import SpheringModel, fit_sphering, sphere_many
from radonad.windows import WindowConfig, extract_point_features

SCORERS = ("mean_dist", "knn")
SPACES = ("raw", "sphered")


@dataclass(frozen=True)
class DetectorConfig:
    scorer: str = "mean_dist"
    distance: str = "l2"
    k: int = 2
    space: str = "sphered"

    def __post_init__(self):
        if self.scorer not in SCORERS:
            raise ValueError(f"scorer must be one of {SCORERS}, got {self.scorer!r}")
        if self.distance not in DISTANCE_KINDS:
            raise ValueError(f"distance must be one of {DISTANCE_KINDS}, got {self.distance!r}")
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}, got {self.space!r}")
        if self.distance in ("swd1", "swd2") and self.space != "raw":
            raise ValueError("SWD distances are defined on raw CR features only")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class FittedDetector:
    window: WindowConfig
    directions: DirectionSet
    grid: HistogramGrid
    sphering: SpheringModel | None
    bank_cr: np.ndarray        # (n_train, n_projections, n_bins)
    bank_sphered: np.ndarray | None
    bank_ids: tuple[str, ...]
    config: DetectorConfig
    n_channels: int

    @property
    def n_train(self) -> int:
        return self.bank_cr.shape[0]


def _check_train(train: Sequence[TimeSeries]) -> int:
    if len(train) < 2:
        raise ValueError(f"need at least 2 training series, got {len(train)}")
    widths = {s.n_channels for s in train}
    if len(widths) != 1:
        raise ValueError(f"training series have mixed channel counts {sorted(widths)}")
    return widths.pop()


def fit_detector(
    train: Sequence[TimeSeries],
    window: WindowConfig | None = None,
    radon: RadonConfig | None = None,
    config: DetectorConfig | None = None,
    epsilon: Union[float, str] = "auto",
) -> FittedDetector:
    """Fit the feature pipeline and training bank on normal series."""
    window = window or WindowConfig()
    radon = radon or RadonConfig()
    config = config or DetectorConfig()
    train = list(train)
    d = _check_train(train)
    if config.scorer == "knn" and config.k > len(train):
        raise ValueError(f"k={config.k} exceeds the training bank size {len(train)}")
    resolved = window.resolve(min(s.length for s in train))
    feats = [extract_point_features(s, resolved) for s in train]
    pooled = np.concatenate(feats, axis=0) if radon.scheme == "pca" else None
    directions = sample_directions(
        resolved.feature_dim(d), radon.n_projections, radon.scheme, radon.seed, pooled
    )
    projections = [project(f, directions) for f in feats]
    grid = fit_grid(np.concatenate(projections, axis=1), radon.n_bins, radon.pad)
    bank_cr = np.stack(
        [_cdf_from_indices(bin_indices(grid, p), radon.n_bins) for p in projections]
    )
    sphering = None
    bank_sphered = None
    if config.space == "sphered":
        sphering = fit_sphering(bank_cr.reshape(len(train), -1), epsilon=epsilon)
        bank_sphered = sphere_many(sphering, bank_cr.reshape(len(train), -1))
    return FittedDetector(
        window=resolved,
        directions=directions,
        grid=grid,
        sphering=sphering,
        bank_cr=bank_cr,
        bank_sphered=bank_sphered,
        bank_ids=tuple(s.series_id for s in train),
        config=config,
        n_channels=d,
    )


def series_cr(det: FittedDetector, series: TimeSeries) -> CRFeatures:
    """CR features of a series under the detector's fitted pipeline."""
    if series.n_channels != det.n_channels:
        raise ValueError(
            f"series has {series.n_channels} channels, detector expects {det.n_channels}"
        )
    feats = extract_point_features(series, det.window)
    proj = project(feats, det.directions)
    return CRFeatures(values=_cdf_from_indices(bin_indices(det.grid, proj), det.grid.n_bins))


def _score_cr_stack(det: FittedDetector, stack: np.ndarray) -> np.ndarray:
    """Score a stack of CR matrices, shape (n, n_projections, n_bins)."""
    cfg = det.config
    n = stack.shape[0]
    flat = stack.reshape(n, -1)
    if cfg.space == "sphered":
        queries = sphere_many(det.sphering, flat)
        bank = det.bank_sphered
        grid = None
    elif cfg.distance in ("swd1", "swd2"):
        queries = stack
        bank = det.bank_cr
        grid = det.grid
    else:
        queries = flat
        bank = det.bank_cr.reshape(det.n_train, -1)
        grid = None
    if cfg.scorer == "mean_dist":
        target = bank.mean(axis=0)
        return np.asarray(
            [pairwise_to_bank(q, target[None, ...], cfg.distance, grid)[0] for q in queries]
        )
    scores = np.empty(n)
    for i, q in enumerate(queries):
        dists = pairwise_to_bank(q, bank, cfg.distance, grid)
        smallest = np.partition(dists, cfg.k - 1)[: cfg.k]
        scores[i] = smallest.mean()
    return scores


def score_series(det: FittedDetector, series: TimeSeries) -> float:
    """Anomaly score of one series: higher = more anomalous."""
    cr = series_cr(det, series)
    return float(_score_cr_stack(det, cr.values[None, ...])[0])


def score_many(
    det: FittedDetector, series: Sequence[TimeSeries], threads: int = 1
) -> np.ndarray:
    """Scores for a collection of series, in input order."""
    return np.asarray(ordered_map(lambda s: score_series(det, s), series, threads))


def slice_windows(
    series: Sequence[TimeSeries], length: int, stride: int = 1
) -> list[TimeSeries]:
    """Cut every series into standalone windows of the given length."""
    if length < 1:
        raise ValueError(f"window length must be >= 1, got {length}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    out = []
    for s in series:
        if s.length < length:
            raise ValueError(f"series length {s.length} is shorter than the window {length}")
        for start in range(0, s.length - length + 1, stride):
            out.append(
                TimeSeries(
                    s.values[start : start + length],
                    series_id=f"{s.series_id}[{start}:{start + length}]",
                )
            )
    return out


def _window_cr_stack(
    series: TimeSeries,
    starts: np.ndarray,
    length: int,
    window: WindowConfig,
    directions: DirectionSet,
    grid: HistogramGrid,
) -> np.ndarray:
    """CR matrices of standalone windows taken at the given starts.

    Projections run through the same per-window primitives as
    ``cumulative_radon``; only the histogram counting is batched (counting
    is integer-exact, so batching cannot change results).
    """
    n = len(starts)
    n_proj = directions.n_projections
    n_bins = grid.n_bins
    projections = np.empty((n, n_proj, length))
    values = series.values
    for i, start in enumerate(starts):
        window_series = TimeSeries(values[start : start + length])
        projections[i] = project(extract_point_features(window_series, window), directions)
    counts = np.empty((n, n_proj, n_bins), dtype=np.int64)
    offsets = (np.arange(n)[:, None] * n_bins).ravel()
    for p in range(n_proj):
        edges = grid.edges[p]
        vals = np.clip(projections[:, p, :], edges[0], edges[-1])
        idx = np.clip(np.searchsorted(edges, vals.ravel(), side="left") - 1, 0, n_bins - 1)
        idx = idx.reshape(n, length)
        flat = (np.arange(n)[:, None] * n_bins + idx).ravel()
        counts[:, p, :] = np.bincount(flat, minlength=n * n_bins).reshape(n, n_bins)
    return counts.cumsum(axis=2) / length


def score_points_collective(
    det: FittedDetector, series: TimeSeries, context_len: int = 20
) -> np.ndarray:
    """Per-point scores from centered context windows.

    The detector must have been fitted on comparable windows (see
    ``slice_windows``).  Each point inherits the score of the window
    centered on it, clamped at the series boundaries.
    """
    if context_len < 1:
        raise ValueError(f"context_len must be >= 1, got {context_len}")
    if series.length < context_len:
        raise ValueError(
            f"series length {series.length} is shorter than the context {context_len}"
        )
    t = np.arange(series.length)
    starts = np.clip(t - context_len // 2, 0, series.length - context_len)
    unique_starts, inverse = np.unique(starts, return_inverse=True)
    stack = _window_cr_stack(
        series, unique_starts, context_len, det.window, det.directions, det.grid
    )
    window_scores = _score_cr_stack(det, stack)
    return window_scores[inverse]


@dataclass(frozen=True)
class PointRegressor:
    """Ridge model predicting a point from its trailing context window."""

    window: WindowConfig
    directions: DirectionSet
    grid: HistogramGrid
    weights: np.ndarray  # (D + 1,), intercept last
    ridge_lambda: float
    context_len: int

    def __post_init__(self):
        expected = self.directions.n_projections * self.grid.n_bins + 1
        if self.weights.shape != (expected,):
            raise ValueError(f"weights must have shape ({expected},), got {self.weights.shape}")


def _ridge_solve(x: np.ndarray, y: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    # Normal equations with an unpenalized intercept, handled by centering.
    # Both routes share the symmetric eigensolver; the dual (Gram) route is
    # algebraically identical and cheaper when rows are scarce.
    n, d = x.shape
    x_mean = x.mean(axis=0)
    y_mean = float(y.mean())
    xc = x - x_mean
    yc = y - y_mean
    if n >= d:
        h = xc.T @ xc
        h = 0.5 * (h + h.T)
        h[np.diag_indices(d)] += lam
        vals, vecs = eigh_symmetric(h)
        coef = vecs @ ((vecs.T @ (xc.T @ yc)) / vals)
    else:
        g = xc @ xc.T
        g = 0.5 * (g + g.T)
        g[np.diag_indices(n)] += lam
        vals, vecs = eigh_symmetric(g)
        coef = xc.T @ (vecs @ ((vecs.T @ yc) / vals))
    intercept = y_mean - float(x_mean @ coef)
    return coef, intercept


def fit_point_regressor(
    train: Sequence[TimeSeries],
    window: WindowConfig | None = None,
    radon: RadonConfig | None = None,
    context_len: int = 20,
    ridge_lambda: Union[float, str] = "auto",
) -> PointRegressor:
    """Fit the trailing-window ridge regressor on univariate normal series.

    The design matrix holds one row per (window, next point) pair pooled
    over all training series.  The auto penalty is 1e-3 * trace of the
    design Gram diagonal / D.
    """
    window = window or WindowConfig()
    radon = radon or RadonConfig()
    train = list(train)
    if not train:
        raise ValueError("need at least one training series")
    if any(s.n_channels != 1 for s in train):
        raise ValueError("the point regressor requires univariate series")
    if context_len < 1:
        raise ValueError(f"context_len must be >= 1, got {context_len}")
    if any(s.length <= context_len for s in train):
        raise ValueError(f"every training series must be longer than context_len={context_len}")
    resolved = window.resolve(context_len)
    d_f = resolved.feature_dim(1)
    window_series: list[TimeSeries] = []
    targets: list[float] = []
    for s in train:
        for start in range(s.length - context_len):
            window_series.append(TimeSeries(s.values[start : start + context_len]))
            targets.append(float(s.values[start + context_len, 0]))
    feats = [extract_point_features(ws, resolved) for ws in window_series]
    pooled = np.concatenate(feats, axis=0) if radon.scheme == "pca" else None
    directions = sample_directions(d_f, radon.n_projections, radon.scheme, radon.seed, pooled)
    projections = [project(f, directions) for f in feats]
    grid = fit_grid(np.concatenate(projections, axis=1), radon.n_bins, radon.pad)
    x = np.stack(
        [_cdf_from_indices(bin_indices(grid, p), radon.n_bins).reshape(-1) for p in projections]
    )
    y = np.asarray(targets)
    dim = x.shape[1]
    if isinstance(ridge_lambda, str):
        if ridge_lambda != "auto":
            raise ValueError(f"ridge_lambda must be a float or 'auto', got {ridge_lambda!r}")
        lam = max(1e-3 * float((x * x).sum()) / dim, 1e-12)
    else:
        lam = float(ridge_lambda)
        if lam <= 0:
            raise ValueError(f"ridge_lambda must be > 0, got {lam}")
    coef, intercept = _ridge_solve(x, y, lam)
    return PointRegressor(
        window=resolved,
        directions=directions,
        grid=grid,
        weights=np.concatenate([coef, [intercept]]),
        ridge_lambda=lam,
        context_len=context_len,
    )


def predict_points(reg: PointRegressor, series: TimeSeries) -> np.ndarray:
    """Predictions for points t >= context_len (one per trailing window)."""
    if series.n_channels != 1:
        raise ValueError("the point regressor requires univariate series")
    n = series.length - reg.context_len
    if n <= 0:
        return np.empty(0)
    starts = np.arange(n)
    stack = _window_cr_stack(
        series, starts, reg.context_len, reg.window, reg.directions, reg.grid
    )
    flat = stack.reshape(n, -1)
    return flat @ reg.weights[:-1] + reg.weights[-1]


def score_points(reg: PointRegressor, series: TimeSeries) -> np.ndarray:
    """Absolute prediction residual per point; the unscored prefix gets 0."""
    scores = np.zeros(series.length)
    preds = predict_points(reg, series)
    if preds.size:
        actual = series.values[reg.context_len :, 0]
        scores[reg.context_len :] = np.abs(preds - actual)
    return scores
