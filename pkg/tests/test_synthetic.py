"""Generator invariants: masks must mark exactly the rewritten points."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radonad.synthetic import (
    SCENARIOS,
    SynthConfig,
    clean_variant,
    generate,
    read_dataset,
    write_dataset,
)


def _runs(labels):
    padded = np.concatenate([[0], labels, [0]])
    starts = np.flatnonzero(np.diff(padded) == 1)
    ends = np.flatnonzero(np.diff(padded) == -1)
    return list(zip(starts, ends))


class TestConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SynthConfig(scenario="drift")
        with pytest.raises(ValueError):
            SynthConfig(ratio=1.0)
        with pytest.raises(ValueError):
            SynthConfig(ratio=-0.1)
        with pytest.raises(ValueError):
            SynthConfig(segment_len=4)
        with pytest.raises(ValueError):
            SynthConfig(seasonal_factor=1.0)

    def test_clean_variant_only_drops_ratio(self):
        cfg = SynthConfig(scenario="trend", ratio=0.2, seed=9)
        clean = clean_variant(cfg)
        assert clean.ratio == 0.0
        assert clean.scenario == cfg.scenario and clean.seed == cfg.seed


class TestMaskSoundness:
    """The clean twin (same seed, ratio 0) pins down what injection touched."""

    @pytest.mark.parametrize("scenario", SCENARIOS)
    def test_unlabeled_points_match_clean_twin_exactly(self, scenario):
        cfg = SynthConfig(scenario=scenario, ratio=0.1, length=200, seed=3)
        dirty = generate(cfg, 4)
        clean = generate(clean_variant(cfg), 4)
        for d, c in zip(dirty, clean):
            mask = d.point_labels.astype(bool)
            assert mask.any()
            assert np.array_equal(d.series.values[~mask], c.series.values[~mask])
            assert np.any(d.series.values[mask] != c.series.values[mask])

    def test_point_global_count_and_magnitude(self):
        cfg = SynthConfig(scenario="point_global", ratio=0.05, length=200, seed=1)
        for item in generate(cfg, 10):
            positions = np.flatnonzero(item.point_labels)
            assert positions.size == 10
            assert np.all(np.diff(positions) >= 2)
            injected = item.series.values[positions, 0]
            assert np.all(np.abs(injected) > cfg.amplitude + 6.0 * cfg.noise)

    def test_point_contextual_stays_in_range(self):
        cfg = SynthConfig(scenario="point_contextual", ratio=0.05, length=200, seed=2)
        for item in generate(cfg, 10):
            positions = np.flatnonzero(item.point_labels)
            injected = item.series.values[positions, 0]
            assert np.all(np.abs(injected) <= cfg.amplitude * 1.6 + 6.0 * cfg.noise)

    @pytest.mark.parametrize("scenario", ["shapelet", "trend", "seasonal"])
    def test_group_runs_have_segment_length(self, scenario):
        cfg = SynthConfig(scenario=scenario, ratio=0.15, length=300, seed=4)
        for item in generate(cfg, 6):
            runs = _runs(item.point_labels)
            assert runs
            for start, end in runs:
                assert end - start == cfg.segment_len
                assert start >= cfg.edge_margin
                assert end <= cfg.length - cfg.edge_margin

    def test_labeled_fraction_near_target(self):
        for seed in range(30):
            cfg = SynthConfig(scenario="shapelet", ratio=0.12, length=250, seed=seed)
            item = generate(cfg, 1)[0]
            labeled = int(item.point_labels.sum())
            target = round(cfg.ratio * cfg.length)
            assert target <= labeled < target + cfg.segment_len

    def test_edges_stay_clean(self):
        cfg = SynthConfig(scenario="point_global", ratio=0.1, length=200, seed=5)
        for item in generate(cfg, 5):
            assert not item.point_labels[: cfg.edge_margin].any()
            assert not item.point_labels[-cfg.edge_margin :].any()


class TestDeterminism:
    def test_same_seed_reproduces_bitwise(self):
        cfg = SynthConfig(scenario="seasonal", ratio=0.1, seed=11)
        a = generate(cfg, 3)
        b = generate(cfg, 3)
        for x, y in zip(a, b):
            assert np.array_equal(x.series.values, y.series.values)
            assert np.array_equal(x.point_labels, y.point_labels)

    def test_different_seeds_differ(self):
        cfg = SynthConfig(scenario="shapelet", ratio=0.1, seed=0)
        a = generate(cfg, 1)[0]
        b = generate(SynthConfig(scenario="shapelet", ratio=0.1, seed=1), 1)[0]
        assert not np.array_equal(a.series.values, b.series.values)

    def test_ratio_zero_mask_is_empty(self):
        cfg = SynthConfig(scenario="trend", ratio=0.0, seed=6)
        for item in generate(cfg, 3):
            assert not item.point_labels.any()


class TestFeasibility:
    def test_too_many_segments_rejected(self):
        cfg = SynthConfig(scenario="shapelet", ratio=0.8, length=100, seed=0)
        with pytest.raises(ValueError):
            generate(cfg, 1)

    def test_too_many_points_rejected(self):
        cfg = SynthConfig(scenario="point_global", ratio=0.45, length=100, seed=0)
        with pytest.raises(ValueError):
            generate(cfg, 1)


class TestRoundTrip:
    def test_write_then_read_is_bit_exact(self, tmp_path):
        cfg = SynthConfig(scenario="point_contextual", ratio=0.08, seed=7)
        items = generate(cfg, 4)
        write_dataset(items, tmp_path, cfg)
        assert (tmp_path / "manifest.json").exists()
        back = read_dataset(tmp_path)
        assert len(back) == 4
        for orig, loaded in zip(items, back):
            assert loaded.series.series_id == orig.series.series_id
            assert np.array_equal(loaded.series.values, orig.series.values)
            assert np.array_equal(loaded.point_labels, orig.point_labels)

    def test_missing_mask_is_an_error(self, tmp_path):
        cfg = SynthConfig(scenario="shapelet", ratio=0.1, seed=8)
        write_dataset(generate(cfg, 2), tmp_path, cfg)
        (tmp_path / "series_0001.mask.json").unlink()
        with pytest.raises(FileNotFoundError):
            read_dataset(tmp_path)

    def test_empty_directory_is_an_error(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_dataset(tmp_path)


@settings(max_examples=25, deadline=None)
@given(
    scenario=st.sampled_from(SCENARIOS),
    seed=st.integers(min_value=0, max_value=2**16),
    ratio=st.sampled_from([0.0, 0.05, 0.1]),
)
def test_shapes_and_label_domain(scenario, seed, ratio):
    cfg = SynthConfig(scenario=scenario, ratio=ratio, length=180, seed=seed)
    for item in generate(cfg, 2):
        assert item.series.values.shape == (180, 1)
        assert item.point_labels.shape == (180,)
        assert set(np.unique(item.point_labels)) <= {0, 1}
        assert np.all(np.isfinite(item.series.values))
