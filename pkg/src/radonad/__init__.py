"""Distribution-based time series anomaly detection.

A series is summarized by the empirical distribution of its windowed point
features, sliced along random directions and reduced to per-direction
histogram CDFs.  Detectors score series (or individual points) by distances
between these summaries, optionally after covariance sphering.
"""

from radonad.data import (
    LabeledDataset,
    ParseError,
    PointLabeledSeries,
    TimeSeries,
    one_vs_rest_splits,
    parse_csv_series,
    parse_ts_file,
)
from radonad.detectors import (
    DetectorConfig,
    FittedDetector,
    PointRegressor,
    fit_detector,
    fit_point_regressor,
    score_many,
    score_points,
    score_points_collective,
    score_series,
)
from radonad.distances import dist_l1, dist_l2, dist_swd1, dist_swd2
from radonad.eigen import eigh_symmetric
from radonad.config import RunConfig, load_config
from radonad.evaluation import roc_auc, run_one_vs_rest, run_synthetic_suite
from radonad.modelfile import load_model, save_model
from radonad.radon import (
    CRFeatures,
    DirectionSet,
    HistogramGrid,
    RadonConfig,
    cumulative_radon,
    fit_grid,
    project,
    sample_directions,
)
from radonad.sphering import SpheringModel, fit_sphering, sphere, sphere_many
from radonad.synthetic import SCENARIOS, SynthConfig, generate
from radonad.windows import WindowConfig, extract_point_features

__version__ = "0.1.0"

__all__ = [
    "CRFeatures",
    "DetectorConfig",
    "DirectionSet",
    "FittedDetector",
    "HistogramGrid",
    "LabeledDataset",
    "ParseError",
    "PointLabeledSeries",
    "PointRegressor",
    "RadonConfig",
    "RunConfig",
    "SCENARIOS",
    "SpheringModel",
    "SynthConfig",
    "TimeSeries",
    "WindowConfig",
    "cumulative_radon",
    "dist_l1",
    "dist_l2",
    "dist_swd1",
    "dist_swd2",
    "eigh_symmetric",
    "extract_point_features",
    "fit_detector",
    "fit_grid",
    "fit_point_regressor",
    "fit_sphering",
    "generate",
    "load_config",
    "load_model",
    "one_vs_rest_splits",
    "parse_csv_series",
    "parse_ts_file",
    "project",
    "roc_auc",
    "run_one_vs_rest",
    "run_synthetic_suite",
    "sample_directions",
    "save_model",
    "score_many",
    "score_points",
    "score_points_collective",
    "score_series",
    "sphere",
    "sphere_many",
]
