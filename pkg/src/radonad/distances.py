"""Distances between feature summaries.

L1/L2 act on flat vectors (raw CR features or sphered features).  The two
sliced-Wasserstein surrogates act on the (n_projections, n_bins) CDF
matrices directly and need the histogram grid that produced them:

* swd1 integrates |CDF_a - CDF_b| over each direction's support (a Riemann
  sum with the direction's bin width) and sums over directions.
* swd2 matches quantiles: per direction it integrates the squared gap
  between the two piecewise-linear inverse CDFs over the level axis,
  exactly (both inverses are linear between knots), then takes the root
  of the sum over directions.  This is the W2 distance between the
  binned distributions, so it sits within two bin widths of the exact
  sample W2 whatever the samples look like.

Both SWD forms are defined on raw CR features only; sphered vectors have no
distributional reading.
"""

from __future__ import annotations

import math

import numpy as np

from radonad.radon import CRFeatures, HistogramGrid

DISTANCE_KINDS = ("l1", "l2", "swd1", "swd2")


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    av = a.vector if isinstance(a, CRFeatures) else np.asarray(a, dtype=np.float64).reshape(-1)
    bv = b.vector if isinstance(b, CRFeatures) else np.asarray(b, dtype=np.float64).reshape(-1)
    if av.shape != bv.shape:
        raise ValueError(f"length mismatch: {av.shape} vs {bv.shape}")
    return av, bv


def dist_l1(a, b) -> float:
    av, bv = _pair(a, b)
    return float(np.abs(av - bv).sum())


def dist_l2(a, b, squared: bool = False) -> float:
    av, bv = _pair(a, b)
    diff = av - bv
    total = float(diff @ diff)
    return total if squared else math.sqrt(total)


def _cdf_pair(a, b, grid: HistogramGrid) -> tuple[np.ndarray, np.ndarray]:
    av = a.values if isinstance(a, CRFeatures) else np.asarray(a, dtype=np.float64)
    bv = b.values if isinstance(b, CRFeatures) else np.asarray(b, dtype=np.float64)
    expected = (grid.n_projections, grid.n_bins)
    if av.shape != expected or bv.shape != expected:
        raise ValueError(
            f"CDF shapes {av.shape}/{bv.shape} do not match the grid shape {expected}"
        )
    return av, bv


def dist_swd1(a, b, grid: HistogramGrid) -> float:
    """Sum over directions of the bin-width-weighted L1 gap between CDFs.

    Both arguments must have been built on the given grid.
    """
    av, bv = _cdf_pair(a, b, grid)
    per_direction = np.abs(av - bv).sum(axis=1) * grid.bin_widths
    return float(per_direction.sum())


def _inverse_one_sided(cdf: np.ndarray, edges: np.ndarray, levels: np.ndarray, side: str) -> np.ndarray:
    """Piecewise-linear inverse of one direction's CDF, one-sided at knots.

    side="right" gives the limit from above a knot level (the left edge of
    the first bin with mass beyond it), side="left" the limit from below
    (the right edge of the last contributing bin, i.e. the left edge of
    the flat run that follows).
    """
    idx = np.minimum(np.searchsorted(cdf, levels, side=side), cdf.size - 1)
    lo_q = np.concatenate(([0.0], cdf))[idx]
    gap = cdf[idx] - lo_q
    frac = np.where(gap > 0.0, (levels - lo_q) / np.where(gap > 0.0, gap, 1.0), 0.0)
    return edges[idx] + frac * (edges[idx + 1] - edges[idx])


def _quantile_gap_sq(cdf_a: np.ndarray, cdf_b: np.ndarray, edges: np.ndarray) -> float:
    # Exact integral of the squared inverse-CDF gap over levels: both
    # inverses are linear between consecutive knots of the union, so each
    # interval contributes span * (d0^2 + d0*d1 + d1^2) / 3.
    knots = np.union1d(cdf_a, cdf_b)
    if knots[0] > 0.0:
        knots = np.concatenate(([0.0], knots))
    lo, hi = knots[:-1], knots[1:]
    d_lo = _inverse_one_sided(cdf_a, edges, lo, "right") - _inverse_one_sided(cdf_b, edges, lo, "right")
    d_hi = _inverse_one_sided(cdf_a, edges, hi, "left") - _inverse_one_sided(cdf_b, edges, hi, "left")
    return float(((hi - lo) * (d_lo * d_lo + d_lo * d_hi + d_hi * d_hi)).sum() / 3.0)


def dist_swd2(a, b, grid: HistogramGrid) -> float:
    """Quantile-matching sliced distance: W2 between the binned CDFs."""
    av, bv = _cdf_pair(a, b, grid)
    total = 0.0
    for row_a, row_b, edges in zip(av, bv, grid.edges):
        total += _quantile_gap_sq(row_a, row_b, edges)
    return math.sqrt(total) if total > 0.0 else 0.0


def pairwise_to_bank(query, bank, kind: str, grid: HistogramGrid | None = None) -> np.ndarray:
    """Distances from one query to every bank entry.

    query/bank are flat vectors (and a 2-d bank matrix) for l1/l2, or CDF
    matrices (and a 3-d bank stack) plus the grid for the SWD kinds.
    """
    if kind in ("l1", "l2"):
        qv = query.vector if isinstance(query, CRFeatures) else np.asarray(query, dtype=np.float64).reshape(-1)
        diff = np.asarray(bank, dtype=np.float64) - qv
        if kind == "l1":
            return np.abs(diff).sum(axis=1)
        return np.sqrt((diff * diff).sum(axis=1))
    if kind in ("swd1", "swd2"):
        if grid is None:
            raise ValueError("SWD distances need the histogram grid")
        fn = dist_swd1 if kind == "swd1" else dist_swd2
        return np.asarray([fn(query, member, grid) for member in np.asarray(bank)])
    raise ValueError(f"kind must be one of {DISTANCE_KINDS}, got {kind!r}")
