"""Sliced distribution features.

A series' point features form an empirical distribution in R^{d_f}.  That
distribution is projected onto a fixed set of unit directions; per direction
the projected sample is summarized by the CDF of a uniform histogram fitted
on training data.  The resulting (n_projections, n_bins) matrix is the
feature object everything downstream consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radonad.eigen import eigh_symmetric

SCHEMES = ("gaussian", "marginals", "pca")


@dataclass(frozen=True)
class RadonConfig:
    """Knobs for the projection/histogram stage."""

    n_projections: int = 100
    n_bins: int = 20
    scheme: str = "gaussian"
    seed: int = 0
    pad: float = 0.05

    def __post_init__(self):
        if self.n_projections < 1:
            raise ValueError(f"n_projections must be >= 1, got {self.n_projections}")
        if self.n_bins < 2:
            raise ValueError(f"n_bins must be >= 2, got {self.n_bins}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0.0 <= self.pad:
            raise ValueError(f"pad must be >= 0, got {self.pad}")


@dataclass(frozen=True)
class DirectionSet:
    """Unit projection directions, one per row."""

    directions: np.ndarray  # (n_projections, d_f)
    scheme: str
    seed: int

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=np.float64)
        if dirs.ndim != 2 or dirs.shape[0] < 1:
            raise ValueError(f"directions must be a non-empty 2-d array, got shape {dirs.shape}")
        norms = np.sqrt((dirs * dirs).sum(axis=1))
        if not np.allclose(norms, 1.0, rtol=0, atol=1e-9):
            raise ValueError("direction rows must have unit norm")
        if self.scheme == "marginals":
            one_hot = (dirs == 1.0).sum(axis=1) == 1
            zeros = (dirs == 0.0).sum(axis=1) == dirs.shape[1] - 1
            if not np.all(one_hot & zeros):
                raise ValueError("marginal directions must be one-hot rows")
        dirs.flags.writeable = False
        object.__setattr__(self, "directions", dirs)

    @property
    def n_projections(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


@dataclass(frozen=True)
class HistogramGrid:
    """Per-direction uniform bin edges, shape (n_projections, n_bins + 1)."""

    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.float64)
        if edges.ndim != 2 or edges.shape[1] < 2:
            raise ValueError(f"edges must have shape (n_projections, n_bins + 1), got {edges.shape}")
        if not np.all(np.diff(edges, axis=1) > 0):
            raise ValueError("bin edges must be strictly increasing per direction")
        edges.flags.writeable = False
        object.__setattr__(self, "edges", edges)

    @property
    def n_projections(self) -> int:
        return self.edges.shape[0]

    @property
    def n_bins(self) -> int:
        return self.edges.shape[1] - 1

    @property
    def bin_widths(self) -> np.ndarray:
        """Per-direction width; uniform within a direction by construction."""
        return (self.edges[:, -1] - self.edges[:, 0]) / self.n_bins


@dataclass(frozen=True)
class CRFeatures:
    """Per-direction histogram CDFs, shape (n_projections, n_bins).

    Entry (p, b) is the fraction of the series' points whose projection
    along direction p falls at or below bin b's right edge.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"CR features must be 2-d, got shape {values.shape}")
        if np.any(values < -1e-9) or np.any(values > 1 + 1e-9):
            raise ValueError("CDF entries must lie in [0, 1]")
        if np.any(np.diff(values, axis=1) < -1e-12):
            raise ValueError("CDF rows must be non-decreasing")
        if np.any(np.abs(values[:, -1] - 1.0) > 1e-9):
            raise ValueError("each CDF row must end at 1")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def vector(self) -> np.ndarray:
        """Row-major flattening, length n_projections * n_bins."""
        return self.values.reshape(-1)


def sample_directions(
    dim: int,
    n_projections: int,
    scheme: str = "gaussian",
    seed: int = 0,
    training_features: np.ndarray | None = None,
) -> DirectionSet:
    """Draw the projection direction set.

    gaussian: rows of iid standard normals, normalized (seeded PCG64).
    marginals: the first n_projections coordinate axes; requires
        n_projections <= dim.
    pca: top eigenvectors of the covariance of pooled training feature
        rows; requires training_features.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if scheme == "gaussian":
        rng = np.random.Generator(np.random.PCG64(seed))
        mat = rng.standard_normal((n_projections, dim))
        norms = np.sqrt((mat * mat).sum(axis=1, keepdims=True))
        if np.any(norms == 0):
            raise ValueError("drew a zero direction; change the seed")
        mat = mat / norms
    elif scheme == "marginals":
        if n_projections > dim:
            raise ValueError(
                f"marginals scheme needs n_projections <= dim, got {n_projections} > {dim}"
            )
        mat = np.eye(dim)[:n_projections]
    elif scheme == "pca":
        if training_features is None:
            raise ValueError("pca scheme requires training features")
        feats = np.asarray(training_features, dtype=np.float64)
        if feats.ndim != 2 or feats.shape[1] != dim:
            raise ValueError(f"training features must have shape (n, {dim}), got {feats.shape}")
        if n_projections > dim:
            raise ValueError(f"pca scheme needs n_projections <= dim, got {n_projections} > {dim}")
        if feats.shape[0] < 2:
            raise ValueError("pca scheme needs at least two training rows")
        centered = feats - feats.mean(axis=0)
        cov = centered.T @ centered / (feats.shape[0] - 1)
        cov = 0.5 * (cov + cov.T)
        eigvals, eigvecs = eigh_symmetric(cov)
        top = eigvecs[:, ::-1][:, :n_projections].T.copy()
        # fix an arbitrary sign: largest-magnitude component positive
        lead = top[np.arange(top.shape[0]), np.argmax(np.abs(top), axis=1)]
        top *= np.where(lead < 0, -1.0, 1.0)[:, None]
        norms = np.sqrt((top * top).sum(axis=1, keepdims=True))
        mat = top / norms
    else:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    return DirectionSet(directions=mat, scheme=scheme, seed=seed)


def project(features: np.ndarray, directions: DirectionSet) -> np.ndarray:
    """Project point features onto every direction: (n_projections, T)."""
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2:
        raise ValueError(f"features must be 2-d, got shape {feats.shape}")
    if feats.shape[1] != directions.dim:
        raise ValueError(
            f"feature dim {feats.shape[1]} does not match direction dim {directions.dim}"
        )
    return directions.directions @ feats.T


def fit_grid(projections: np.ndarray, n_bins: int = 20, pad: float = 0.05) -> HistogramGrid:
    """Uniform per-direction edges covering the training projections.

    The span [min, max] is widened by pad * range on both sides.  A
    zero-range direction degenerates to a width-2*eps interval around the
    single value, eps = max(1e-9, 1e-9 * |value|).
    """
    proj = np.asarray(projections, dtype=np.float64)
    if proj.ndim != 2 or proj.shape[1] < 1:
        raise ValueError(f"projections must be (n_projections, n_values), got {proj.shape}")
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    if pad < 0:
        raise ValueError(f"pad must be >= 0, got {pad}")
    lo = proj.min(axis=1)
    hi = proj.max(axis=1)
    span = hi - lo
    eps = np.maximum(1e-9, 1e-9 * np.abs(lo))
    degenerate = span == 0
    lo = np.where(degenerate, lo - eps, lo - pad * span)
    hi = np.where(degenerate, hi + eps, hi + pad * span)
    steps = np.linspace(0.0, 1.0, n_bins + 1)
    edges = lo[:, None] + (hi - lo)[:, None] * steps[None, :]
    edges[:, 0] = lo
    edges[:, -1] = hi
    return HistogramGrid(edges=edges)


def bin_indices(grid: HistogramGrid, projections: np.ndarray) -> np.ndarray:
    """Map projection values to bin indices per direction.

    Values are clamped into the grid span.  A value belongs to bin b when it
    is at most b's right edge and above its left edge; values at or below the
    grid minimum count into bin 0.  This makes the CDF entry at bin b exactly
    the fraction of values <= that bin's right edge.
    """
    proj = np.asarray(projections, dtype=np.float64)
    if proj.shape[0] != grid.n_projections:
        raise ValueError(
            f"projection rows {proj.shape[0]} do not match grid directions {grid.n_projections}"
        )
    idx = np.empty(proj.shape, dtype=np.int64)
    n_bins = grid.n_bins
    for p in range(grid.n_projections):
        row = np.clip(proj[p], grid.edges[p, 0], grid.edges[p, -1])
        idx[p] = np.clip(np.searchsorted(grid.edges[p], row, side="left") - 1, 0, n_bins - 1)
    return idx


def _cdf_from_indices(idx: np.ndarray, n_bins: int) -> np.ndarray:
    n_proj, n_vals = idx.shape
    flat = (np.arange(n_proj)[:, None] * n_bins + idx).reshape(-1)
    counts = np.bincount(flat, minlength=n_proj * n_bins).reshape(n_proj, n_bins)
    return counts.cumsum(axis=1) / n_vals


def cumulative_radon(
    features: np.ndarray, directions: DirectionSet, grid: HistogramGrid
) -> CRFeatures:
    """CR features of one series' point features."""
    if grid.n_projections != directions.n_projections:
        raise ValueError("grid and direction set disagree on n_projections")
    feats = np.asarray(features, dtype=np.float64)
    if feats.shape[0] < 1:
        raise ValueError("need at least one feature row")
    proj = project(feats, directions)
    return CRFeatures(values=_cdf_from_indices(bin_indices(grid, proj), grid.n_bins))
