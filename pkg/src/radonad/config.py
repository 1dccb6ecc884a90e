"""Flat run configuration shared by the CLI and the evaluation drivers.

One JSON object with flat keys covers the whole pipeline; any key can be
overridden on the command line with --key=value, and flags win over the
file.  Derived views (window/radon/detector configs) are built on demand.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Union

from radonad.detectors import DetectorConfig
from radonad.radon import RadonConfig
from radonad.windows import WindowConfig


@dataclass(frozen=True)
class RunConfig:
    # point features
    half_window: int = 4
    n_resolutions: Union[int, str] = 1  # positive int or "auto"
    boundary: str = "clamp"
    normalize_channels: bool = False
    # projections and histograms
    n_projections: int = 100
    n_bins: int = 20
    scheme: str = "gaussian"
    seed: int = 0
    pad: float = 0.05
    # sphering
    epsilon: Union[float, str] = "auto"
    # detector
    scorer: str = "mean_dist"
    distance: str = "l2"
    k: int = 2
    space: str = "sphered"
    # point scoring
    context_len: int = 20
    ridge_lambda: Union[float, str] = "auto"
    # dataset handling
    min_length: Union[int, None] = None
    max_length: Union[int, None] = None

    def window(self) -> WindowConfig:
        return WindowConfig(
            half_window=self.half_window,
            n_resolutions=self.n_resolutions,
            boundary=self.boundary,
            normalize_channels=self.normalize_channels,
        )

    def radon(self) -> RadonConfig:
        return RadonConfig(
            n_projections=self.n_projections,
            n_bins=self.n_bins,
            scheme=self.scheme,
            seed=self.seed,
            pad=self.pad,
        )

    def detector(self) -> DetectorConfig:
        return DetectorConfig(
            scorer=self.scorer, distance=self.distance, k=self.k, space=self.space
        )

    def validate(self) -> "RunConfig":
        """Build every derived view so bad combinations fail loudly."""
        self.window()
        self.radon()
        self.detector()
        if isinstance(self.epsilon, str) and self.epsilon != "auto":
            raise ValueError(f"epsilon must be a float or 'auto', got {self.epsilon!r}")
        if isinstance(self.epsilon, float) and self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if isinstance(self.ridge_lambda, str) and self.ridge_lambda != "auto":
            raise ValueError(f"ridge_lambda must be a float or 'auto', got {self.ridge_lambda!r}")
        if self.context_len < 1:
            raise ValueError(f"context_len must be >= 1, got {self.context_len}")
        for key in ("min_length", "max_length"):
            value = getattr(self, key)
            if value is not None and value < 1:
                raise ValueError(f"{key} must be >= 1 or null, got {value}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


_INT_OR_AUTO = ("n_resolutions",)
_FLOAT_OR_AUTO = ("epsilon", "ridge_lambda")
_OPTIONAL_INT = ("min_length", "max_length")
_BOOL_KEYS = ("normalize_channels",)


def _coerce(name: str, value: object) -> object:
    """Coerce a JSON or command-line value to the field's type."""
    field_types = {f.name: f.type for f in fields(RunConfig)}
    if name not in field_types:
        raise ValueError(f"unknown config key {name!r}")
    if name in _INT_OR_AUTO:
        if value == "auto":
            return "auto"
        return int(value)
    if name in _FLOAT_OR_AUTO:
        if value == "auto":
            return "auto"
        return float(value)
    if name in _OPTIONAL_INT:
        if value is None or value == "none" or value == "null":
            return None
        return int(value)
    if name in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        text = str(value).lower()
        if text in ("true", "1", "yes"):
            return True
        if text in ("false", "0", "no"):
            return False
        raise ValueError(f"{name} must be a boolean, got {value!r}")
    default = getattr(RunConfig(), name)
    if isinstance(default, bool):
        raise AssertionError(name)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return str(value)


def load_config(
    path: Union[str, Path, None] = None, overrides: dict | None = None
) -> RunConfig:
    """Load a config file, apply overrides (flags win), validate."""
    data: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text())
        if not isinstance(raw, dict):
            raise ValueError("config file must hold a JSON object")
        data.update(raw)
    if overrides:
        data.update(overrides)
    kwargs = {name: _coerce(name, value) for name, value in data.items()}
    return RunConfig(**kwargs).validate()


def config_hash(cfg: RunConfig) -> str:
    """Stable digest of the configuration for report provenance."""
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def with_overrides(cfg: RunConfig, **kwargs) -> RunConfig:
    coerced = {name: _coerce(name, value) for name, value in kwargs.items()}
    return replace(cfg, **coerced).validate()
