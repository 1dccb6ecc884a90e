"""Covariance sphering (ZCA) of flattened CR feature vectors.

The whitener W = (Sigma + eps I)^(-1/2) is applied through its retained
eigenpairs, never materialized as a D x D matrix, so wide grids (large
N_P * N_B) stay cheap.  Euclidean distance in the sphered space is the
(regularized) Mahalanobis distance in the raw space.

When there are fewer training vectors than dimensions the decomposition is
done on the N x N Gram matrix instead of the D x D covariance; both routes
yield the same W because 1/sqrt(lambda + eps) is constant on the null space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from radonad.eigen import eigh_symmetric
from radonad.radon import CRFeatures

_MACHINE_EPS = float(np.finfo(np.float64).eps)
# floor for the auto epsilon so an all-identical training bank (Sigma = 0)
# still yields a finite whitener
_EPSILON_FLOOR = 1e-12


@dataclass(frozen=True)
class SpheringModel:
    """Frozen sphering transform.

    eigvals/eigvecs hold the retained (non-null) eigenpairs of the training
    covariance, eigenvalues descending, one eigenvector per eigvecs row.
    complete is True when they span the whole space (N >= D fit).
    """

    mean: np.ndarray          # (D,)
    eigvals: np.ndarray       # (r,) descending, >= 0
    eigvecs: np.ndarray       # (r, D) orthonormal rows
    epsilon: float
    complete: bool

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        d = self.mean.shape[0]
        if self.eigvecs.shape != (self.eigvals.shape[0], d):
            raise ValueError("eigenpair shapes are inconsistent")
        if np.any(self.eigvals < 0):
            raise ValueError("eigenvalues must be non-negative")
        if self.epsilon == 0.0 and (
            not self.complete or self.eigvals.size == 0 or self.eigvals[-1] <= 0.0
        ):
            raise ValueError("epsilon = 0 requires a full-rank covariance")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def whitener(self) -> np.ndarray:
        """Dense (D, D) whitener; O(D^2) memory, intended for small D."""
        return _build_whitener(
            self.eigvals, self.eigvecs, self.epsilon, self.dim, self.complete
        )

    def covariance(self) -> np.ndarray:
        """Training covariance implied by the retained eigenpairs."""
        return (self.eigvecs.T * self.eigvals) @ self.eigvecs

    @classmethod
    def from_spectrum(
        cls,
        mean: np.ndarray,
        eigvals: np.ndarray,
        eigvecs: np.ndarray,
        epsilon: float,
        complete: bool,
    ) -> "SpheringModel":
        """Rebuild a model from stored eigenpairs."""
        return cls(
            mean=np.asarray(mean, dtype=np.float64),
            eigvals=np.asarray(eigvals, dtype=np.float64),
            eigvecs=np.asarray(eigvecs, dtype=np.float64),
            epsilon=float(epsilon),
            complete=complete,
        )


FeatureBank = Union[np.ndarray, Sequence[CRFeatures]]


def _as_matrix(train: FeatureBank) -> np.ndarray:
    if isinstance(train, np.ndarray):
        mat = np.asarray(train, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError(f"training features must be 2-d, got shape {mat.shape}")
        return mat
    rows = [f.vector if isinstance(f, CRFeatures) else np.asarray(f, dtype=np.float64).reshape(-1) for f in train]
    if not rows:
        raise ValueError("empty training collection")
    widths = {r.shape[0] for r in rows}
    if len(widths) != 1:
        raise ValueError(f"training vectors have mixed lengths {sorted(widths)}")
    return np.asarray(rows, dtype=np.float64)


def resolve_epsilon(eigvals: np.ndarray, dim: int, epsilon: Union[float, str]) -> float:
    """Resolve the Tikhonov floor: 'auto' means 1e-6 * trace / D."""
    if isinstance(epsilon, str):
        if epsilon != "auto":
            raise ValueError(f"epsilon must be a float or 'auto', got {epsilon!r}")
        trace = float(np.sum(eigvals))
        return max(1e-6 * trace / dim, _EPSILON_FLOOR)
    eps = float(epsilon)
    if eps < 0:
        raise ValueError(f"epsilon must be >= 0, got {eps}")
    return eps


def fit_sphering(train: FeatureBank, epsilon: Union[float, str] = "auto") -> SpheringModel:
    """Fit mean and covariance eigenpairs on training vectors.

    Requires at least two training vectors.  epsilon = 0 is allowed only
    when the covariance is numerically full rank.
    """
    x = _as_matrix(train)
    n, d = x.shape
    if n < 2:
        raise ValueError(f"sphering needs at least 2 training vectors, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("training features contain non-finite values")
    mean = x.mean(axis=0)
    centered = x - mean
    if n >= d:
        cov = centered.T @ centered / (n - 1)
        asym = np.abs(cov - cov.T).max()
        scale = max(np.abs(cov).max(), 1.0)
        if asym > 1e-9 * scale:
            raise ValueError(f"covariance asymmetry {asym} exceeds tolerance")
        cov = 0.5 * (cov + cov.T)
        raw_vals, raw_vecs = eigh_symmetric(cov)
        eigvals = np.maximum(raw_vals[::-1], 0.0)
        eigvecs = raw_vecs[:, ::-1].T.copy()
        complete = True
    else:
        gram = centered @ centered.T / (n - 1)
        gram = 0.5 * (gram + gram.T)
        raw_vals, raw_vecs = eigh_symmetric(gram)
        raw_vals = raw_vals[::-1]
        raw_vecs = raw_vecs[:, ::-1]
        top = max(raw_vals[0], 0.0)
        keep = raw_vals > top * max(n, d) * _MACHINE_EPS
        eigvals = raw_vals[keep]
        dual = raw_vecs[:, keep]
        eigvecs = (centered.T @ dual / np.sqrt(eigvals * (n - 1))).T
        # re-normalize rows; dual-route scaling is exact only in exact arithmetic
        eigvecs /= np.sqrt((eigvecs * eigvecs).sum(axis=1, keepdims=True))
        complete = False
    eps = resolve_epsilon(eigvals, d, epsilon)
    return SpheringModel(
        mean=mean,
        eigvals=eigvals,
        eigvecs=eigvecs,
        epsilon=eps,
        complete=complete,
    )


def _build_whitener(
    eigvals: np.ndarray, eigvecs: np.ndarray, eps: float, dim: int, complete: bool
) -> np.ndarray:
    inv_sqrt = 1.0 / np.sqrt(eigvals + eps)
    if complete:
        w = (eigvecs.T * inv_sqrt) @ eigvecs
    else:
        base = 1.0 / np.sqrt(eps)
        w = (eigvecs.T * (inv_sqrt - base)) @ eigvecs
        w[np.diag_indices(dim)] += base
    return 0.5 * (w + w.T)


def _apply_factored(model: SpheringModel, centered: np.ndarray) -> np.ndarray:
    # W x through the eigenpairs: rows of centered, rows of the result
    inv_sqrt = 1.0 / np.sqrt(model.eigvals + model.epsilon)
    coords = centered @ model.eigvecs.T
    if model.complete:
        return (coords * inv_sqrt) @ model.eigvecs
    base = 1.0 / np.sqrt(model.epsilon)
    return (coords * (inv_sqrt - base)) @ model.eigvecs + base * centered


def sphere(model: SpheringModel, features: Union[CRFeatures, np.ndarray]) -> np.ndarray:
    """Apply the whitener to one feature vector: W (x - mean)."""
    vec = features.vector if isinstance(features, CRFeatures) else np.asarray(features, dtype=np.float64).reshape(-1)
    if vec.shape[0] != model.dim:
        raise ValueError(f"feature length {vec.shape[0]} does not match model dim {model.dim}")
    return _apply_factored(model, (vec - model.mean)[None, :])[0]


def sphere_many(model: SpheringModel, features: FeatureBank) -> np.ndarray:
    """Apply the whitener to a stack of feature vectors, one per row."""
    mat = _as_matrix(features)
    if mat.shape[1] != model.dim:
        raise ValueError(f"feature length {mat.shape[1]} does not match model dim {model.dim}")
    return _apply_factored(model, mat - model.mean)
