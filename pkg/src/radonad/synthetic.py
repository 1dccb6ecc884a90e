"""Seeded synthetic anomaly benchmark.

Base signal: a noisy sine wave.  Five injection scenarios cover the classic
anomaly families: three collective ones that rewrite a whole segment
(shapelet replacement, additive linear trend, period change) and two point
ones (out-of-range spikes, in-range but locally inconsistent values).

Everything is generated from per-series seeds (seed XOR series index), with
injection decisions drawn from a second stream so that the same seed with
ratio 0 reproduces the clean baseline bit for bit.  Anomalies never touch
the first or last edge_margin points, segments never overlap, and point
anomalies are never adjacent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from radonad.data import PointLabeledSeries, TimeSeries, format_csv_series

SCENARIOS = ("shapelet", "trend", "seasonal", "point_global", "point_contextual")
_GROUP_SCENARIOS = ("shapelet", "trend", "seasonal")


@dataclass(frozen=True)
class SynthConfig:
    scenario: str = "shapelet"
    ratio: float = 0.1
    length: int = 200
    amplitude: float = 1.0
    period: float = 25.0
    noise: float = 0.05
    segment_len: int = 20
    edge_margin: int = 20
    trend_slope: float = 0.05
    seasonal_factor: float = 0.5
    contextual_shift: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if not 0.0 <= self.ratio < 1.0:
            raise ValueError(f"ratio must be in [0, 1), got {self.ratio}")
        if self.length < 2:
            raise ValueError(f"length must be >= 2, got {self.length}")
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")
        if self.period <= 1:
            raise ValueError(f"period must be > 1, got {self.period}")
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")
        if self.segment_len < 5:
            raise ValueError(f"segment_len must be >= 5, got {self.segment_len}")
        if self.edge_margin < 0:
            raise ValueError(f"edge_margin must be >= 0, got {self.edge_margin}")
        if self.seasonal_factor <= 0 or self.seasonal_factor == 1.0:
            raise ValueError("seasonal_factor must be positive and != 1")
        if self.contextual_shift <= 0:
            raise ValueError(f"contextual_shift must be > 0, got {self.contextual_shift}")


def _clean_signal(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(cfg.length)
    base = cfg.amplitude * np.sin(2.0 * math.pi * t / cfg.period)
    if cfg.noise > 0:
        base = base + rng.normal(0.0, cfg.noise, cfg.length)
    return base


def _place_segments(cfg: SynthConfig, rng: np.random.Generator) -> list[int]:
    target = round(cfg.ratio * cfg.length)
    if target == 0:
        return []
    lo = cfg.edge_margin
    hi = cfg.length - cfg.edge_margin - cfg.segment_len
    if hi < lo:
        raise ValueError("series too short for one segment inside the edge margins")
    candidates = list(rng.permutation(np.arange(lo, hi + 1)))
    chosen: list[int] = []
    labeled = 0
    while labeled < target:
        pick = None
        for idx, start in enumerate(candidates):
            # keep a 1-point gap so runs stay distinct
            if all(abs(start - c) > cfg.segment_len for c in chosen):
                pick = idx
                break
        if pick is None:
            raise ValueError(
                f"cannot reach ratio {cfg.ratio} with non-overlapping segments of "
                f"length {cfg.segment_len} in length {cfg.length}"
            )
        chosen.append(candidates.pop(pick))
        labeled += cfg.segment_len
    return sorted(int(c) for c in chosen)


def _place_points(cfg: SynthConfig, rng: np.random.Generator) -> list[int]:
    count = round(cfg.ratio * cfg.length)
    if count == 0:
        return []
    lo = cfg.edge_margin
    hi = cfg.length - cfg.edge_margin - 1
    if hi < lo:
        raise ValueError("series too short for point anomalies inside the edge margins")
    candidates = list(rng.permutation(np.arange(lo, hi + 1)))
    chosen: list[int] = []
    for pos in candidates:
        if all(abs(pos - c) > 1 for c in chosen):
            chosen.append(int(pos))
            if len(chosen) == count:
                break
    if len(chosen) < count:
        raise ValueError(
            f"cannot place {count} isolated points in length {cfg.length} "
            f"with edge margin {cfg.edge_margin}"
        )
    return sorted(chosen)


def _inject(
    cfg: SynthConfig, values: np.ndarray, noise: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    labels = np.zeros(cfg.length, dtype=np.int8)
    a = cfg.amplitude
    if cfg.scenario in _GROUP_SCENARIOS:
        for start in _place_segments(cfg, rng):
            seg = np.arange(start, start + cfg.segment_len)
            if cfg.scenario == "shapelet":
                square = a * np.sign(np.sin(2.0 * math.pi * seg / cfg.period))
                square = np.where(square == 0, a, square)
                values[seg] = square + noise[seg]
            elif cfg.scenario == "trend":
                values[seg] += cfg.trend_slope * a * (seg - start + 1)
            else:  # seasonal: phase-continuous period change
                new_period = cfg.seasonal_factor * cfg.period
                phase = 2.0 * math.pi * start / cfg.period
                values[seg] = (
                    a * np.sin(phase + 2.0 * math.pi * (seg - start + 1) / new_period)
                    + noise[seg]
                )
            labels[seg] = 1
    else:
        positions = _place_points(cfg, rng)
        for pos in positions:
            if cfg.scenario == "point_global":
                sign = 1.0 if rng.random() < 0.5 else -1.0
                magnitude = a + 6.0 * cfg.noise + (0.25 + 0.75 * rng.random()) * a
                values[pos] = sign * magnitude
            else:  # point_contextual: jump toward the opposite side, stays in range
                clean = a * math.sin(2.0 * math.pi * pos / cfg.period)
                direction = -math.copysign(1.0, clean) if abs(clean) >= 0.2 * a else 1.0
                values[pos] = clean + direction * cfg.contextual_shift * a + noise[pos]
        labels[positions] = 1
    return labels


def generate(cfg: SynthConfig, n_series: int) -> list[PointLabeledSeries]:
    """Generate labeled series; series i uses seed cfg.seed XOR i."""
    if n_series < 1:
        raise ValueError(f"n_series must be >= 1, got {n_series}")
    out = []
    for i in range(n_series):
        series_seed = cfg.seed ^ i
        clean_rng = np.random.Generator(np.random.PCG64(series_seed))
        inject_rng = np.random.Generator(np.random.PCG64([series_seed, 1]))
        noise = (
            clean_rng.normal(0.0, cfg.noise, cfg.length)
            if cfg.noise > 0
            else np.zeros(cfg.length)
        )
        t = np.arange(cfg.length)
        values = cfg.amplitude * np.sin(2.0 * math.pi * t / cfg.period) + noise
        if cfg.ratio > 0:
            labels = _inject(cfg, values, noise, inject_rng)
        else:
            labels = np.zeros(cfg.length, dtype=np.int8)
        out.append(
            PointLabeledSeries(
                series=TimeSeries(values.reshape(-1, 1), series_id=f"{cfg.scenario}-{i}"),
                point_labels=labels,
            )
        )
    return out


def write_dataset(
    items: Sequence[PointLabeledSeries], directory: str | Path, cfg: SynthConfig | None = None
) -> None:
    """Write series as CSV files with sidecar JSON masks (plus a manifest)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, item in enumerate(items):
        stem = f"series_{i:04d}"
        (directory / f"{stem}.csv").write_text(format_csv_series(item.series))
        mask = {"series_id": item.series.series_id or stem, "point_labels": item.point_labels.tolist()}
        (directory / f"{stem}.mask.json").write_text(json.dumps(mask) + "\n")
    if cfg is not None:
        manifest = {"scenario": cfg.scenario, "config": _config_dict(cfg), "n_series": len(items)}
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_dataset(directory: str | Path) -> list[PointLabeledSeries]:
    """Read back a directory written by ``write_dataset``."""
    from radonad.data import parse_csv_series

    directory = Path(directory)
    items = []
    for csv_path in sorted(directory.glob("series_*.csv")):
        mask_path = csv_path.parent / (csv_path.stem + ".mask.json")
        if not mask_path.exists():
            raise FileNotFoundError(f"missing mask file for {csv_path.name}")
        mask = json.loads(mask_path.read_text())
        series = parse_csv_series(csv_path.read_text(), series_id=mask.get("series_id", csv_path.stem))
        items.append(PointLabeledSeries(series=series, point_labels=np.asarray(mask["point_labels"])))
    if not items:
        raise FileNotFoundError(f"no series_*.csv files under {directory}")
    return items


def _config_dict(cfg: SynthConfig) -> dict:
    return {
        "scenario": cfg.scenario,
        "ratio": cfg.ratio,
        "length": cfg.length,
        "amplitude": cfg.amplitude,
        "period": cfg.period,
        "noise": cfg.noise,
        "segment_len": cfg.segment_len,
        "edge_margin": cfg.edge_margin,
        "trend_slope": cfg.trend_slope,
        "seasonal_factor": cfg.seasonal_factor,
        "contextual_shift": cfg.contextual_shift,
        "seed": cfg.seed,
    }


def clean_variant(cfg: SynthConfig) -> SynthConfig:
    """The same configuration with injection turned off."""
    return replace(cfg, ratio=0.0)
