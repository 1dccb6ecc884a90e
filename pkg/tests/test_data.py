"""Dataset containers and the .ts / CSV text formats."""

import numpy as np
import pytest

from radonad.data import (
    LabeledDataset,
    ParseError,
    TimeSeries,
    filter_by_length,
    format_csv_series,
    format_ts_file,
    merge_splits,
    one_vs_rest_splits,
    parse_csv_series,
    parse_ts_file,
)

TS_TEXT = """\
@problemName Toy
@univariate false
@dimensions 2
@equalLength true
@classLabel true a b
@data
1.0,2.0,3.0:4.0,5.0,6.0:a
0.5,0.25,0.125:-1.0,-2.0,-3.0:b
"""


class TestTimeSeries:
    def test_one_dimensional_input_gets_a_channel_axis(self):
        s = TimeSeries(np.arange(4.0), series_id="x")
        assert s.values.shape == (4, 1)
        assert s.length == 4 and s.n_channels == 1

    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(ValueError):
            TimeSeries(np.empty((0, 1)))
        with pytest.raises(ValueError):
            TimeSeries(np.array([1.0, np.nan]))


class TestTsParsing:
    def test_basic_structure(self):
        ds = parse_ts_file(TS_TEXT, split="train")
        assert ds.name == "Toy"
        assert ds.labels == ("a", "b")
        assert ds.declared_classes == ("a", "b")
        assert ds.series[0].values.shape == (3, 2)
        assert np.array_equal(ds.series[0].values[:, 1], [4.0, 5.0, 6.0])
        assert ds.split == ("train", "train")

    def test_directives_are_case_insensitive(self):
        text = TS_TEXT.replace("@problemName", "@PROBLEMNAME").replace(
            "@equalLength", "@EqualLength"
        )
        ds = parse_ts_file(text)
        assert ds.name == "Toy"

    def test_comments_and_blank_lines_are_ignored(self):
        text = "# header comment\n\n" + TS_TEXT
        assert len(parse_ts_file(text).series) == 2

    def test_missing_value_marker_reports_line(self):
        text = TS_TEXT.replace("0.5,0.25,0.125", "0.5,?,0.125")
        with pytest.raises(ParseError, match="line 8"):
            parse_ts_file(text)

    def test_non_numeric_token(self):
        text = TS_TEXT.replace("3.0:", "x:")
        with pytest.raises(ParseError, match="non-numeric"):
            parse_ts_file(text)

    def test_unequal_channel_lengths(self):
        text = TS_TEXT.replace("4.0,5.0,6.0", "4.0,5.0")
        with pytest.raises(ParseError, match="unequal"):
            parse_ts_file(text)

    def test_dimension_mismatch(self):
        text = TS_TEXT.replace("@dimensions 2", "@dimensions 3")
        with pytest.raises(ParseError, match="channels"):
            parse_ts_file(text)

    def test_univariate_contradiction(self):
        text = TS_TEXT.replace("@univariate false", "@univariate true")
        with pytest.raises(ParseError, match="univariate"):
            parse_ts_file(text)

    def test_equal_length_contradiction(self):
        text = TS_TEXT.replace(
            "0.5,0.25,0.125:-1.0,-2.0,-3.0:b", "0.5,0.25:-1.0,-2.0:b"
        )
        with pytest.raises(ParseError, match="equal length"):
            parse_ts_file(text)

    def test_unknown_directive(self):
        with pytest.raises(ParseError, match="unknown directive"):
            parse_ts_file("@frequency daily\n" + TS_TEXT)

    def test_missing_data_directive(self):
        with pytest.raises(ParseError, match="@data"):
            parse_ts_file("@univariate true\n")

    def test_empty_body(self):
        with pytest.raises(ParseError, match="no series"):
            parse_ts_file("@univariate true\n@data\n")

    def test_bad_split_argument(self):
        with pytest.raises(ValueError):
            parse_ts_file(TS_TEXT, split="validation")


class TestTsRoundTrip:
    def test_format_then_parse_is_bit_exact(self):
        rng = np.random.default_rng(0)
        series = tuple(
            TimeSeries(rng.standard_normal((12, 3)), series_id=f"s{i}") for i in range(4)
        )
        ds = LabeledDataset(
            series=series,
            labels=("a", "b", "a", "b"),
            split=("train",) * 4,
            name="RoundTrip",
            declared_classes=("a", "b"),
        )
        back = parse_ts_file(format_ts_file(ds), split="train")
        assert back.name == "RoundTrip"
        assert back.labels == ds.labels
        for orig, parsed in zip(ds.series, back.series):
            assert np.array_equal(orig.values, parsed.values)


class TestCsv:
    def test_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(1)
        s = TimeSeries(rng.standard_normal((9, 2)), series_id="c")
        back = parse_csv_series(format_csv_series(s), series_id="c")
        assert np.array_equal(back.values, s.values)
        assert back.series_id == "c"

    def test_ragged_rows_rejected(self):
        with pytest.raises(ParseError):
            parse_csv_series("1.0,2.0\n3.0\n")

    def test_empty_text_rejected(self):
        with pytest.raises(ParseError):
            parse_csv_series("")


class TestSplits:
    def _dataset(self):
        train = parse_ts_file(TS_TEXT, split="train")
        test_text = TS_TEXT.replace(":a", ":c").replace("@classLabel true a b", "@classLabel true a b c")
        test = parse_ts_file(test_text, split="test")
        return merge_splits(train, test)

    def test_merge_preserves_metadata(self):
        ds = self._dataset()
        assert ds.name == "Toy"
        assert len(ds.series) == 4
        assert ds.split == ("train", "train", "test", "test")
        assert ds.unseen_labels == ("c",)

    def test_one_vs_rest_structure(self):
        ds = self._dataset()
        splits = one_vs_rest_splits(ds)
        assert [s.normal_class for s in splits] == ["a", "b"]
        for split in splits:
            assert len(split.test) == 2
            assert set(split.test_labels.tolist()) <= {0, 1}
        a = splits[0]
        # test labels are c, b -> both anomalous for class a
        assert a.test_labels.tolist() == [1, 1]
        b = splits[1]
        assert b.test_labels.tolist() == [1, 0]

    def test_declared_only_class_warns_and_skips(self):
        ds = self._dataset()
        with_ghost = LabeledDataset(
            series=ds.series,
            labels=ds.labels,
            split=ds.split,
            name=ds.name,
            declared_classes=("a", "b", "ghost"),
        )
        with pytest.warns(UserWarning, match="ghost"):
            splits = one_vs_rest_splits(with_ghost)
        assert [s.normal_class for s in splits] == ["a", "b"]

    def test_no_test_series_rejected(self):
        train = parse_ts_file(TS_TEXT, split="train")
        with pytest.raises(ValueError):
            one_vs_rest_splits(train)


class TestFilterByLength:
    def _mixed(self):
        series = tuple(
            TimeSeries(np.zeros(n) + 1.0, series_id=f"s{n}") for n in (5, 10, 20)
        )
        return LabeledDataset(
            series=series, labels=("a",) * 3, split=("train",) * 3
        )

    def test_no_op_without_bounds(self):
        ds = self._mixed()
        assert filter_by_length(ds) is ds

    def test_bounds_are_inclusive(self):
        ds = filter_by_length(self._mixed(), min_length=10, max_length=20)
        assert tuple(s.length for s in ds.series) == (10, 20)

    def test_filtering_everything_is_an_error(self):
        with pytest.raises(ValueError):
            filter_by_length(self._mixed(), min_length=100)
