"""Evaluation drivers; the rank AUC is checked against O(n^2) pair counting."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radonad.config import RunConfig
from radonad.data import LabeledDataset, TimeSeries
from radonad.evaluation import (
    ABLATION_AXES,
    DEFAULT_RATIOS,
    ScoredSet,
    roc_auc,
    roc_curve,
    run_ablation,
    run_one_vs_rest,
    run_point_eval,
    run_synthetic_suite,
)
from radonad.synthetic import SynthConfig, clean_variant, generate

TINY = RunConfig(
    n_projections=10, n_bins=5, half_window=2, context_len=16, seed=0
)


def _pair_count_auc(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (pos.size * neg.size)


class TestRocAuc:
    def test_separated_groups_score_one(self):
        assert roc_auc(np.array([0.8, 0.9, 0.1, 0.2]), np.array([1, 1, 0, 0])) == 1.0

    def test_reversed_groups_score_zero(self):
        assert roc_auc(np.array([0.1, 0.2, 0.8, 0.9]), np.array([1, 1, 0, 0])) == 0.0

    def test_constant_scores_are_chance(self):
        assert roc_auc(np.full(10, 3.3), np.array([1, 0] * 5)) == 0.5

    def test_matches_pair_counting_with_ties(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(4, 40))
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            # quantized scores force heavy ties
            scores = np.round(rng.normal(labels * 0.6, 1.0), 1)
            got = roc_auc(scores, labels)
            want = _pair_count_auc(scores, labels)
            assert abs(got - want) < 1e-12

    def test_invariant_under_monotone_transforms(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(0, 1, 60)
        labels = rng.integers(0, 2, 60)
        labels[0], labels[1] = 0, 1
        base = roc_auc(scores, labels)
        assert roc_auc(2.0 * scores + 1.0, labels) == base
        assert roc_auc(scores**3, labels) == base

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            roc_auc(np.array([1.0, 2.0]), np.array([1, 1]))
        with pytest.raises(ValueError):
            roc_auc(np.array([1.0, 2.0]), np.array([0, 0]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            roc_auc(np.zeros(3), np.array([0, 1]))


class TestRocCurve:
    def test_endpoints_and_monotonicity(self):
        rng = np.random.default_rng(2)
        scores = rng.normal(0, 1, 50)
        labels = rng.integers(0, 2, 50)
        labels[:2] = [0, 1]
        fpr, tpr = roc_curve(scores, labels)
        assert fpr[0] == 0.0 and tpr[0] == 0.0
        assert fpr[-1] == 1.0 and tpr[-1] == 1.0
        assert np.all(np.diff(fpr) >= 0)
        assert np.all(np.diff(tpr) >= 0)


class TestScoredSet:
    def test_auc_delegates(self):
        s = ScoredSet(scores=np.array([0.1, 0.9]), labels=np.array([0, 1]))
        assert s.auc() == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ScoredSet(scores=np.array([0.1]), labels=np.array([0, 1]))
        with pytest.raises(ValueError):
            ScoredSet(scores=np.array([np.nan, 1.0]), labels=np.array([0, 1]))
        with pytest.raises(ValueError):
            ScoredSet(scores=np.array([0.0, 1.0]), labels=np.array([0, 2]))


def _sine_dataset(n_per_class=4, n_test_per_class=3, length=80):
    rng = np.random.default_rng(7)
    series, labels, split = [], [], []
    periods = {"a": 10.0, "b": 26.0}
    t = np.arange(length)
    for cls, period in periods.items():
        for i in range(n_per_class + n_test_per_class):
            phase = rng.uniform(0, 2 * np.pi)
            vals = np.sin(2 * np.pi * t / period + phase) + 0.05 * rng.standard_normal(length)
            series.append(TimeSeries(vals, series_id=f"{cls}{i}"))
            labels.append(cls)
            split.append("train" if i < n_per_class else "test")
    return LabeledDataset(
        series=tuple(series),
        labels=tuple(labels),
        split=tuple(split),
        name="sines",
        declared_classes=("a", "b", "ghost"),
    )


class TestOneVsRest:
    def test_report_shape_and_quality(self):
        dataset = _sine_dataset()
        with pytest.warns(UserWarning):
            report = run_one_vs_rest(dataset, TINY)
        assert report["protocol"] == "one_vs_rest"
        assert report["dataset"] == "sines"
        assert [r["label"] for r in report["per_class"]] == ["a", "b"]
        assert report["skipped_classes"] == ["ghost"]
        assert report["n_test"] == 6
        assert report["mean_auc"] > 0.9
        assert report["config_hash"]

    def test_repeat_runs_are_identical(self):
        dataset = _sine_dataset()
        with pytest.warns(UserWarning):
            a = run_one_vs_rest(dataset, TINY)
        with pytest.warns(UserWarning):
            b = run_one_vs_rest(dataset, TINY, threads=4)
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


class TestSyntheticSuite:
    def test_report_layout_and_determinism(self):
        base = SynthConfig(length=120, seed=3)
        kwargs = dict(
            base=base,
            scenarios=("shapelet", "point_global"),
            ratios=(0.1,),
            n_train=3,
            n_test=3,
        )
        a = run_synthetic_suite(TINY, **kwargs)
        b = run_synthetic_suite(TINY, **kwargs)
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
        assert a["protocol"] == "synthetic_suite"
        assert set(a["scenario_auc"]) == {"shapelet", "point_global"}
        for auc in a["scenario_auc"].values():
            assert 0.0 <= auc <= 1.0
        cells = a["cells"]
        assert len(cells) == 2
        for cell in cells:
            assert cell["ratio"] == 0.1
            assert 0.0 <= cell["auc"] <= 1.0

    def test_default_ratio_grid(self):
        assert DEFAULT_RATIOS == (0.05, 0.10, 0.15, 0.20)


class TestPointEval:
    def test_explicit_train_test_report(self):
        base = SynthConfig(scenario="point_global", length=120, ratio=0.1, seed=5)
        train = [item.series for item in generate(clean_variant(base), 3)]
        test = generate(base, 4)
        report = run_point_eval(train, test, TINY, scenario="point_global")
        assert report["protocol"] == "point"
        assert report["scenario"] == "point_global"
        assert 0.0 <= report["auc"] <= 1.0
        assert report["n_train"] == 3 and report["n_test"] == 4


class TestAblation:
    def test_axis_table(self):
        assert set(ABLATION_AXES) == {"projections", "bins", "scheme", "distance"}

    def test_rows_cover_values_and_seeds(self):
        base = SynthConfig(length=120, seed=2)
        rows = run_ablation(
            TINY,
            "bins",
            values=(2, 5),
            seeds=(0, 1),
            base=base,
            scenarios=("shapelet",),
            ratios=(0.1,),
            n_train=3,
            n_test=3,
        )
        assert [r["value"] for r in rows] == [2, 5]
        for row in rows:
            assert row["axis"] == "bins"
            assert len(row["per_seed"]) == 2
            assert row["mean_auc"] == pytest.approx(np.mean(row["per_seed"]))

    def test_unknown_axis_rejected(self):
        with pytest.raises(ValueError):
            run_ablation(TINY, "kernel", values=(1,), seeds=(0,))


@settings(max_examples=40, deadline=None)
@given(
    n_pos=st.integers(min_value=1, max_value=12),
    n_neg=st.integers(min_value=1, max_value=12),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_auc_complement_symmetry(n_pos, n_neg, seed):
    # flipping the labels mirrors the statistic around 1/2
    rng = np.random.default_rng(seed)
    scores = np.round(rng.normal(0, 1, n_pos + n_neg), 1)
    labels = np.concatenate([np.ones(n_pos, dtype=int), np.zeros(n_neg, dtype=int)])
    assert roc_auc(scores, labels) == pytest.approx(1.0 - roc_auc(scores, 1 - labels), abs=1e-12)
