"""Per-point window features.

Every time step is described by the raw values of a symmetric window around
it, repeated at dyadic strides so coarser resolutions see a wider context.
The feature vector layout is channel-major: for each channel, for each
resolution, the 2w+1 window values in time order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radonad.data import TimeSeries

BOUNDARY_MODES = ("clamp", "reflect")


@dataclass(frozen=True)
class WindowConfig:
    half_window: int = 4
    n_resolutions: int | str = 1  # positive int or "auto"
    boundary: str = "clamp"
    normalize_channels: bool = False

    def __post_init__(self):
        if self.half_window < 0:
            raise ValueError(f"half_window must be >= 0, got {self.half_window}")
        if isinstance(self.n_resolutions, str):
            if self.n_resolutions != "auto":
                raise ValueError(f"n_resolutions must be a positive int or 'auto', got {self.n_resolutions!r}")
        elif self.n_resolutions < 1:
            raise ValueError(f"n_resolutions must be >= 1, got {self.n_resolutions}")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"boundary must be one of {BOUNDARY_MODES}, got {self.boundary!r}")

    def resolve(self, length: int) -> "WindowConfig":
        """Fix n_resolutions to a concrete value for series of this length."""
        if self.n_resolutions != "auto":
            return self
        return WindowConfig(
            half_window=self.half_window,
            n_resolutions=auto_resolutions(self.half_window, length),
            boundary=self.boundary,
            normalize_channels=self.normalize_channels,
        )

    def feature_dim(self, n_channels: int) -> int:
        if self.n_resolutions == "auto":
            raise ValueError("resolve n_resolutions before asking for the feature dimension")
        return (2 * self.half_window + 1) * int(self.n_resolutions) * n_channels


def auto_resolutions(half_window: int, length: int) -> int:
    """Largest n >= 1 whose coarsest window span 2*w*2**(n-1) + 1 still fits in length."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if half_window == 0:
        return 1
    n = 1
    while 2 * half_window * 2**n + 1 <= length:
        n += 1
    return n


def _window_index(t: np.ndarray, offsets: np.ndarray, length: int, boundary: str) -> np.ndarray:
    idx = t[:, None] + offsets[None, :]
    if boundary == "clamp":
        return np.clip(idx, 0, length - 1)
    # reflect about the end points without repeating them: -1 -> 1, T -> T-2
    if length == 1:
        return np.zeros_like(idx)
    period = 2 * (length - 1)
    idx = np.abs(idx) % period
    return np.where(idx >= length, period - idx, idx)


def extract_point_features(series: TimeSeries, config: WindowConfig) -> np.ndarray:
    """Feature matrix of shape (T, d_f) with d_f = (2w+1) * n_resolutions * d.

    With n_resolutions = "auto" the count is resolved against this series'
    own length; pipelines that must share a feature dimension resolve the
    config once up front instead.
    """
    config = config.resolve(series.length)
    w = config.half_window
    n_res = int(config.n_resolutions)
    values = series.values
    if config.normalize_channels:
        mean = values.mean(axis=0)
        std = values.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        values = (values - mean) / std
    length, d = values.shape
    t = np.arange(length)
    blocks = []
    for c in range(d):
        channel = values[:, c]
        for r in range(n_res):
            offsets = np.arange(-w, w + 1) * 2**r
            blocks.append(channel[_window_index(t, offsets, length, config.boundary)])
    return np.concatenate(blocks, axis=1)
