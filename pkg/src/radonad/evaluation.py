"""Evaluation protocols and reports.

roc_auc is the rank statistic (Mann-Whitney with average ranks on ties), so
it is invariant under any strictly increasing transform of the scores.

Two drivers mirror the two benchmark styles: a one-vs-rest protocol over a
class-labeled dataset (train on one class, everything else is anomalous)
and a synthetic point-level suite over the generator's five scenarios.
Report dictionaries are fully deterministic for a fixed seed: timing goes
to stderr, never into the report.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from radonad.config import RunConfig, config_hash
from radonad.data import LabeledDataset, PointLabeledSeries, one_vs_rest_splits
from radonad.detectors import (
    fit_detector,
    fit_point_regressor,
    score_many,
    score_points,
    score_points_collective,
    slice_windows,
)
from radonad.parallel import ordered_map
from radonad.synthetic import SCENARIOS, SynthConfig, clean_variant, generate

DEFAULT_RATIOS = (0.05, 0.10, 0.15, 0.20)
_COLLECTIVE = ("shapelet", "trend", "seasonal")


@dataclass(frozen=True)
class ScoredSet:
    """Scores with binary labels (1 = anomalous)."""

    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int8)
        if scores.ndim != 1 or scores.shape != labels.shape:
            raise ValueError("scores and labels must be 1-d arrays of equal length")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores contain non-finite values")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    def auc(self) -> float:
        return roc_auc(self.scores, self.labels)


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """ROC-AUC via average ranks; ties between classes count one half.

    Raises on single-class inputs: the value would be undefined.
    """
    scored = ScoredSet(scores, labels) if not isinstance(scores, ScoredSet) else scores
    s = scored.scores
    y = scored.labels
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC needs both classes present")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(s.size, dtype=np.float64)
    sorted_scores = s[order]
    boundaries = np.flatnonzero(np.diff(sorted_scores) != 0) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [s.size]])
    for a, b in zip(starts, ends):
        ranks[order[a:b]] = 0.5 * (a + 1 + b)
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_curve(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) swept over descending score thresholds."""
    scored = ScoredSet(scores, labels)
    order = np.argsort(-scored.scores, kind="mergesort")
    y = scored.labels[order]
    s = scored.scores[order]
    tp = np.cumsum(y == 1)
    fp = np.cumsum(y == 0)
    last = np.concatenate([np.flatnonzero(np.diff(s) != 0), [y.size - 1]])
    n_pos = tp[-1]
    n_neg = fp[-1]
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC curve needs both classes present")
    tpr = np.concatenate([[0.0], tp[last] / n_pos])
    fpr = np.concatenate([[0.0], fp[last] / n_neg])
    return fpr, tpr


def _stderr(msg: str) -> None:
    print(msg, file=sys.stderr)


def run_one_vs_rest(dataset: LabeledDataset, cfg: RunConfig, threads: int = 1) -> dict:
    """Train one detector per class, score the shared test set, report AUCs."""
    cfg.validate()
    splits = one_vs_rest_splits(dataset)

    def evaluate(split):
        t0 = time.perf_counter()
        det = fit_detector(
            split.train, cfg.window(), cfg.radon(), cfg.detector(), epsilon=cfg.epsilon
        )
        scores = score_many(det, split.test)
        auc = roc_auc(scores, split.test_labels)
        seconds = time.perf_counter() - t0
        return split.normal_class, auc, len(split.train), seconds

    results = ordered_map(evaluate, splits, threads)
    per_class = []
    for name, auc, n_train, seconds in results:
        _stderr(f"[eval] class {name}: auc={auc:.4f} n_train={n_train} ({seconds:.2f}s)")
        per_class.append({"label": name, "auc": auc, "n_train": n_train})
    mean_auc = float(np.mean([r["auc"] for r in per_class]))
    trained = {r["label"] for r in per_class}
    universe = (
        set(dataset.subset_labels("train"))
        | set(dataset.declared_classes)
        | set(dataset.subset_labels("test"))
    )
    skipped = [c for c in sorted(universe) if c not in trained]
    return {
        "protocol": "one_vs_rest",
        "dataset": dataset.name,
        "per_class": per_class,
        "mean_auc": mean_auc,
        "skipped_classes": skipped,
        "n_test": len(dataset.subset("test")),
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "config_hash": config_hash(cfg),
    }


def fit_suite_models(
    cfg: RunConfig,
    base: SynthConfig,
    n_train: int = 6,
    train_window_stride: int = 2,
    need_detector: bool = True,
    need_regressor: bool = True,
):
    """Fit the point scorers once on clean training series.

    The clean training distribution does not depend on scenario or ratio, so
    one collective detector (fitted on context windows) and one regressor
    serve the whole grid.  Either fit can be skipped when the scenario set
    does not exercise it.
    """
    train_items = generate(clean_variant(base), n_train)
    train_series = [item.series for item in train_items]
    detector = None
    if need_detector:
        windows = slice_windows(train_series, cfg.context_len, stride=train_window_stride)
        detector = fit_detector(
            windows, cfg.window(), cfg.radon(), cfg.detector(), epsilon=cfg.epsilon
        )
    regressor = None
    if need_regressor:
        regressor = fit_point_regressor(
            train_series,
            cfg.window(),
            cfg.radon(),
            context_len=cfg.context_len,
            ridge_lambda=cfg.ridge_lambda,
        )
    return detector, regressor


def run_synthetic_suite(
    cfg: RunConfig,
    base: SynthConfig | None = None,
    scenarios: Sequence[str] = SCENARIOS,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    n_train: int = 6,
    n_test: int = 8,
    n_trials: int = 1,
    threads: int = 1,
    train_window_stride: int = 2,
) -> dict:
    """Point-level AUC over the scenario x ratio grid, averaged over trials.

    Collective scenarios use the window detector; point scenarios use the
    trailing-window regressor (its unscored prefix is excluded from the
    AUC).  Scores are pooled over all test points of a cell.
    """
    cfg.validate()
    base = base or SynthConfig()
    unknown = set(scenarios) - set(SCENARIOS)
    if unknown:
        raise ValueError(f"unknown scenarios {sorted(unknown)}")
    per_scenario: dict[str, list[float]] = {s: [] for s in scenarios}
    cells = []
    for trial in range(n_trials):
        trial_base = replace(base, seed=base.seed + 7919 * trial)
        t0 = time.perf_counter()
        detector, regressor = fit_suite_models(
            cfg,
            trial_base,
            n_train=n_train,
            train_window_stride=train_window_stride,
            need_detector=any(s in _COLLECTIVE for s in scenarios),
            need_regressor=any(s not in _COLLECTIVE for s in scenarios),
        )
        _stderr(f"[suite] trial {trial}: fit in {time.perf_counter() - t0:.2f}s")
        for scenario in scenarios:
            ratio_aucs = []
            for ratio in ratios:
                test_cfg = replace(
                    trial_base,
                    scenario=scenario,
                    ratio=ratio,
                    seed=trial_base.seed + 104729 + 31 * len(cells),
                )
                test_items = generate(test_cfg, n_test)
                t1 = time.perf_counter()
                if scenario in _COLLECTIVE:
                    def scorer(series):
                        return score_points_collective(detector, series, cfg.context_len)

                    auc = _pooled_point_auc_parallel(test_items, scorer, 0, threads)
                else:
                    def scorer(series):
                        return score_points(regressor, series)

                    auc = _pooled_point_auc_parallel(
                        test_items, scorer, cfg.context_len, threads
                    )
                ratio_aucs.append(auc)
                cells.append(
                    {"scenario": scenario, "ratio": ratio, "trial": trial, "auc": auc}
                )
                _stderr(
                    f"[suite] {scenario} ratio={ratio:.2f} trial={trial}: "
                    f"auc={auc:.4f} ({time.perf_counter() - t1:.2f}s)"
                )
            per_scenario[scenario].append(float(np.mean(ratio_aucs)))
    summary = {s: float(np.mean(v)) for s, v in per_scenario.items()}
    return {
        "protocol": "synthetic_suite",
        "point_level": "pooled over test points per cell; regressor prefix excluded",
        "scenario_auc": summary,
        "cells": cells,
        "ratios": list(ratios),
        "n_train": n_train,
        "n_test": n_test,
        "n_trials": n_trials,
        "seed": cfg.seed,
        "generator": {"seed": base.seed, "length": base.length, "period": base.period},
        "config": cfg.to_dict(),
        "config_hash": config_hash(cfg),
    }


def run_point_eval(
    train: Sequence,
    test: Sequence[PointLabeledSeries],
    cfg: RunConfig,
    scenario: str,
    threads: int = 1,
    train_window_stride: int = 2,
) -> dict:
    """Point-level AUC on explicit train/test series, one scenario.

    Group scenarios are scored by window distance, point scenarios by the
    regressor.  Train series must be anomaly-free; masks are the caller's
    responsibility.
    """
    cfg.validate()
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    if not test:
        raise ValueError("need at least one test series")
    if scenario in _COLLECTIVE:
        windows = slice_windows(list(train), cfg.context_len, stride=train_window_stride)
        detector = fit_detector(
            windows, cfg.window(), cfg.radon(), cfg.detector(), epsilon=cfg.epsilon
        )

        def scorer(series):
            return score_points_collective(detector, series, cfg.context_len)

        skip = 0
    else:
        regressor = fit_point_regressor(
            list(train),
            cfg.window(),
            cfg.radon(),
            context_len=cfg.context_len,
            ridge_lambda=cfg.ridge_lambda,
        )

        def scorer(series):
            return score_points(regressor, series)

        skip = cfg.context_len
    auc = _pooled_point_auc_parallel(test, scorer, skip, threads)
    return {
        "protocol": "point",
        "scenario": scenario,
        "auc": auc,
        "point_level": "pooled over test points; regressor prefix excluded",
        "n_train": len(train),
        "n_test": len(test),
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "config_hash": config_hash(cfg),
    }


def _pooled_point_auc_parallel(items, score_fn, skip_prefix: int, threads: int) -> float:
    scored = ordered_map(lambda item: score_fn(item.series), items, threads)
    scores = np.concatenate([s[skip_prefix:] for s in scored])
    labels = np.concatenate([item.point_labels[skip_prefix:] for item in items])
    return roc_auc(scores, labels)


ABLATION_AXES = {
    "projections": "n_projections",
    "bins": "n_bins",
    "scheme": "scheme",
    "distance": "distance",
}


def run_ablation(
    cfg: RunConfig,
    axis: str,
    values: Sequence,
    seeds: Sequence[int],
    base: SynthConfig | None = None,
    scenarios: Sequence[str] = _COLLECTIVE,
    ratios: Sequence[float] = (0.1,),
    n_train: int = 6,
    n_test: int = 8,
    threads: int = 1,
    dataset: LabeledDataset | None = None,
) -> list[dict]:
    """Sweep one config key; one row per value.

    Without a dataset the synthetic suite provides the AUC (mean over its
    scenarios); with one, the one-vs-rest mean AUC does.  Every value is
    evaluated under every seed, and rows carry the per-seed AUCs plus
    their mean.
    """
    if axis not in ABLATION_AXES:
        raise ValueError(f"axis must be one of {sorted(ABLATION_AXES)}, got {axis!r}")
    if not values:
        raise ValueError("need at least one axis value")
    if not seeds:
        raise ValueError("need at least one seed")
    key = ABLATION_AXES[axis]
    base = base or SynthConfig()
    rows = []
    for value in values:
        per_seed = []
        for seed in seeds:
            run_cfg = replace(cfg, **{key: value, "seed": int(seed)}).validate()
            if dataset is not None:
                report = run_one_vs_rest(dataset, run_cfg, threads=threads)
                per_seed.append(float(report["mean_auc"]))
                continue
            report = run_synthetic_suite(
                run_cfg,
                replace(base, seed=int(seed)),
                scenarios=scenarios,
                ratios=ratios,
                n_train=n_train,
                n_test=n_test,
                threads=threads,
            )
            per_seed.append(float(np.mean(list(report["scenario_auc"].values()))))
        rows.append(
            {
                "axis": axis,
                "value": value,
                "mean_auc": float(np.mean(per_seed)),
                "per_seed": per_seed,
            }
        )
        _stderr(f"[ablate] {axis}={value}: mean_auc={rows[-1]['mean_auc']:.4f}")
    return rows
