"""Versioned JSON persistence for fitted detectors and regressors.

The document stores the training artifacts verbatim: directions, grid
edges, sphering eigenpairs and the window bank.  The sphered bank is
rebuilt on load from those, keeping files at O(bank) rather than
O(D^2).  Floats are written with Python's shortest
round-trip repr, so a load followed by a save is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Union

import numpy as np

from radonad.detectors import DetectorConfig, FittedDetector, PointRegressor
from radonad.radon import DirectionSet, HistogramGrid
from radonad.sphering import SpheringModel, sphere_many
from radonad.windows import WindowConfig

SCHEMA_VERSION = 1

Model = Union[FittedDetector, PointRegressor]


class ModelFormatError(ValueError):
    """Document is not a model file this version can load."""


def model_to_dict(model: Model, run_config=None) -> dict:
    """Serializable document for a fitted model.

    run_config, when given, is stored as provenance and is what lets the
    CLI score points with a detector model later.
    """
    doc = {
        "schema_version": SCHEMA_VERSION,
        "window": asdict(model.window),
        "directions": {
            "rows": model.directions.directions.tolist(),
            "scheme": model.directions.scheme,
            "seed": model.directions.seed,
        },
        "grid_edges": model.grid.edges.tolist(),
        "config": _config_snapshot(run_config),
    }
    if isinstance(model, FittedDetector):
        doc["kind"] = "detector"
        doc["n_channels"] = model.n_channels
        doc["detector"] = asdict(model.config)
        doc["sphering"] = _sphering_block(model.sphering)
        doc["bank"] = {
            "ids": list(model.bank_ids),
            "cr": model.bank_cr.reshape(model.bank_cr.shape[0], -1).tolist(),
        }
    elif isinstance(model, PointRegressor):
        doc["kind"] = "regressor"
        doc["weights"] = model.weights.tolist()
        doc["ridge_lambda"] = model.ridge_lambda
        doc["context_len"] = model.context_len
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def _config_snapshot(run_config) -> dict | None:
    if run_config is None:
        return None
    return run_config if isinstance(run_config, dict) else run_config.to_dict()


def _sphering_block(sp: SpheringModel | None) -> dict | None:
    if sp is None:
        return None
    return {
        "mean": sp.mean.tolist(),
        "eigvals": sp.eigvals.tolist(),
        "eigvecs": sp.eigvecs.tolist(),
        "epsilon": sp.epsilon,
        "complete": sp.complete,
    }


def model_from_dict(doc: dict) -> Model:
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ModelFormatError("not a model document: missing schema_version")
    version = doc["schema_version"]
    if version != SCHEMA_VERSION:
        raise ModelFormatError(
            f"unsupported model schema version {version!r}; this build reads {SCHEMA_VERSION}"
        )
    kind = doc.get("kind")
    window = WindowConfig(**doc["window"])
    dir_doc = doc["directions"]
    directions = DirectionSet(
        np.asarray(dir_doc["rows"], dtype=np.float64),
        scheme=dir_doc["scheme"],
        seed=int(dir_doc["seed"]),
    )
    grid = HistogramGrid(np.asarray(doc["grid_edges"], dtype=np.float64))
    if kind == "detector":
        sp_doc = doc["sphering"]
        sphering = None
        if sp_doc is not None:
            sphering = SpheringModel.from_spectrum(
                mean=sp_doc["mean"],
                eigvals=sp_doc["eigvals"],
                eigvecs=sp_doc["eigvecs"],
                epsilon=sp_doc["epsilon"],
                complete=sp_doc["complete"],
            )
        ids = tuple(doc["bank"]["ids"])
        flat = np.asarray(doc["bank"]["cr"], dtype=np.float64)
        bank_cr = flat.reshape(len(ids), grid.n_projections, grid.n_bins)
        bank_sphered = None
        if sphering is not None:
            bank_sphered = sphere_many(sphering, flat)
        return FittedDetector(
            window=window,
            directions=directions,
            grid=grid,
            sphering=sphering,
            bank_cr=bank_cr,
            bank_sphered=bank_sphered,
            bank_ids=ids,
            config=DetectorConfig(**doc["detector"]),
            n_channels=int(doc["n_channels"]),
        )
    if kind == "regressor":
        return PointRegressor(
            window=window,
            directions=directions,
            grid=grid,
            weights=np.asarray(doc["weights"], dtype=np.float64),
            ridge_lambda=float(doc["ridge_lambda"]),
            context_len=int(doc["context_len"]),
        )
    raise ModelFormatError(f"unknown model kind {kind!r}")


def dumps_model(model: Model, run_config=None) -> str:
    return (
        json.dumps(model_to_dict(model, run_config), sort_keys=True, allow_nan=False)
        + "\n"
    )


def save_model(model: Model, path: str | Path, run_config=None) -> None:
    Path(path).write_text(dumps_model(model, run_config))


def load_model(path: str | Path) -> tuple[Model, dict]:
    """Load a model file; returns (model, raw document)."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(doc), doc
