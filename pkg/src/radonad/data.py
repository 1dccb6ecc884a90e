"""Series containers and dataset parsing.

Supports the sktime-style ``.ts`` text format (header directives followed by
``@data``, one series per line with colon-separated channels) and a plain CSV
form with one time step per row.  Missing values are rejected outright; the
feature pipeline has no imputation story.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class ParseError(ValueError):
    """Malformed dataset text.  Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class TimeSeries:
    """A single multivariate series with values of shape (T, d)."""

    values: np.ndarray
    series_id: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise ValueError(f"series values must be 1- or 2-dimensional, got ndim={values.ndim}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"series must have at least one point and one channel, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PointLabeledSeries:
    """A series with a 0/1 anomaly mask per time step."""

    series: TimeSeries
    point_labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.point_labels, dtype=np.int8)
        if labels.shape != (self.series.length,):
            raise ValueError(
                f"point labels shape {labels.shape} does not match series length {self.series.length}"
            )
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("point labels must be 0 or 1")
        labels.flags.writeable = False
        object.__setattr__(self, "point_labels", labels)


@dataclass(frozen=True)
class LabeledDataset:
    """Class-labeled series with a train/test split marker per series."""

    series: tuple[TimeSeries, ...]
    labels: tuple[str, ...]
    split: tuple[str, ...]
    name: str = ""
    declared_classes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not (len(self.series) == len(self.labels) == len(self.split)):
            raise ValueError("series, labels and split must have equal length")
        if len(self.series) == 0:
            raise ValueError("dataset must contain at least one series")
        bad = sorted(set(self.split) - {"train", "test"})
        if bad:
            raise ValueError(f"split markers must be 'train' or 'test', got {bad}")

    def subset(self, which: str) -> tuple[TimeSeries, ...]:
        return tuple(s for s, w in zip(self.series, self.split) if w == which)

    def subset_labels(self, which: str) -> tuple[str, ...]:
        return tuple(l for l, w in zip(self.labels, self.split) if w == which)

    @property
    def train_classes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.subset_labels("train"))))

    @property
    def unseen_labels(self) -> tuple[str, ...]:
        """Test labels that never occur in the train split."""
        train = set(self.subset_labels("train"))
        return tuple(sorted(set(self.subset_labels("test")) - train))


@dataclass(frozen=True)
class ClassSplit:
    """One one-vs-rest split: train on one class, test on everything."""

    normal_class: str
    train: tuple[TimeSeries, ...]
    test: tuple[TimeSeries, ...]
    test_labels: np.ndarray  # 1 = anomalous (class differs from normal_class)

    def __post_init__(self):
        labels = np.asarray(self.test_labels, dtype=np.int8)
        if labels.shape != (len(self.test),):
            raise ValueError("test label vector does not match test set size")
        labels.flags.writeable = False
        object.__setattr__(self, "test_labels", labels)


def _parse_float_token(token: str, line_no: int) -> float:
    token = token.strip()
    if token == "" or token == "?":
        raise ParseError("missing value in series body", line_no)
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric token {token!r}", line_no) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", line_no)
    return value


_BOOL_DIRECTIVES = {"univariate", "equallength", "classlabel", "timestamps", "missing"}
_VALUE_DIRECTIVES = {"problemname", "dimensions", "serieslength"}


def parse_ts_file(text: str, split: str = "train") -> LabeledDataset:
    """Parse ``.ts`` text into a dataset whose series all carry ``split``.

    Header directives are matched case-insensitively.  Each body line holds
    one series: channels separated by ``:``, values within a channel
    separated by ``,``, and the final ``:`` field is the class label.
    """
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    meta: dict[str, str] = {}
    declared: tuple[str, ...] = ()
    in_data = False
    series: list[TimeSeries] = []
    labels: list[str] = []
    data_start_line = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_data:
            if not line.startswith("@"):
                raise ParseError(f"expected a header directive, got {line!r}", line_no)
            parts = line[1:].split()
            if not parts:
                raise ParseError("empty header directive", line_no)
            key = parts[0].lower()
            if key == "data":
                if len(parts) > 1:
                    raise ParseError("@data takes no arguments", line_no)
                in_data = True
                data_start_line = line_no
                continue
            if key == "classlabel":
                if len(parts) < 2 or parts[1].lower() not in ("true", "false"):
                    raise ParseError("@classLabel requires true/false", line_no)
                meta[key] = parts[1].lower()
                if parts[1].lower() == "true":
                    declared = tuple(parts[2:])
                continue
            if key in _BOOL_DIRECTIVES:
                if len(parts) != 2 or parts[1].lower() not in ("true", "false"):
                    raise ParseError(f"@{parts[0]} requires a single true/false argument", line_no)
                meta[key] = parts[1].lower()
            elif key in _VALUE_DIRECTIVES:
                if len(parts) != 2:
                    raise ParseError(f"@{parts[0]} requires a single argument", line_no)
                meta[key] = parts[1]
            else:
                raise ParseError(f"unknown directive @{parts[0]}", line_no)
            continue
        # body
        fields = line.split(":")
        if len(fields) < 2:
            raise ParseError("series line needs at least one channel and a class label", line_no)
        label = fields[-1].strip()
        if label == "":
            raise ParseError("empty class label", line_no)
        channels = []
        for chan_text in fields[:-1]:
            tokens = chan_text.split(",")
            channels.append([_parse_float_token(tok, line_no) for tok in tokens])
        lengths = {len(c) for c in channels}
        if len(lengths) != 1:
            raise ParseError(f"channels have unequal lengths {sorted(lengths)}", line_no)
        values = np.asarray(channels, dtype=np.float64).T
        if "dimensions" in meta and int(meta["dimensions"]) != values.shape[1]:
            raise ParseError(
                f"expected {meta['dimensions']} channels, got {values.shape[1]}", line_no
            )
        if meta.get("univariate") == "true" and values.shape[1] != 1:
            raise ParseError(f"declared univariate but found {values.shape[1]} channels", line_no)
        idx = len(series)
        series.append(TimeSeries(values, series_id=f"{split}-{idx}"))
        labels.append(label)
    if not in_data:
        raise ParseError("missing @data directive")
    if not series:
        raise ParseError("no series after @data", data_start_line)
    if meta.get("equallength") == "true":
        lens = {s.length for s in series}
        if len(lens) != 1:
            raise ParseError(f"declared equal length but found lengths {sorted(lens)}")
    return LabeledDataset(
        series=tuple(series),
        labels=tuple(labels),
        split=(split,) * len(series),
        name=meta.get("problemname", ""),
        declared_classes=declared,
    )


def format_ts_file(dataset: LabeledDataset, which: str | None = None) -> str:
    """Serialize series back to ``.ts`` text with full float precision."""
    rows = list(zip(dataset.series, dataset.labels, dataset.split))
    if which is not None:
        rows = [r for r in rows if r[2] == which]
    if not rows:
        raise ValueError("nothing to serialize for the requested split")
    d = rows[0][0].n_channels
    equal = len({s.length for s, _, _ in rows}) == 1
    classes = dataset.declared_classes or tuple(sorted({l for _, l, _ in rows}))
    lines = []
    if dataset.name:
        lines.append(f"@problemName {dataset.name}")
    lines.append(f"@univariate {'true' if d == 1 else 'false'}")
    lines.append(f"@dimensions {d}")
    lines.append(f"@equalLength {'true' if equal else 'false'}")
    lines.append("@classLabel true " + " ".join(classes))
    lines.append("@data")
    for s, label, _ in rows:
        if s.n_channels != d:
            raise ValueError("cannot serialize series with mixed channel counts")
        chans = ":".join(",".join(repr(float(v)) for v in s.values[:, c]) for c in range(d))
        lines.append(f"{chans}:{label}")
    return "\n".join(lines) + "\n"


def merge_splits(train: LabeledDataset, test: LabeledDataset) -> LabeledDataset:
    """Combine a parsed train file and test file into one dataset."""
    return LabeledDataset(
        series=train.series + test.series,
        labels=train.labels + test.labels,
        split=("train",) * len(train.series) + ("test",) * len(test.series),
        name=train.name or test.name,
        declared_classes=train.declared_classes or test.declared_classes,
    )


def parse_csv_series(text: str, series_id: str = "") -> TimeSeries:
    """Parse CSV text (one time step per row, d numeric columns) into a series."""
    rows: list[list[float]] = []
    width = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split(",")
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ParseError(f"expected {width} columns, got {len(tokens)}", line_no)
        rows.append([_parse_float_token(tok, line_no) for tok in tokens])
    if not rows:
        raise ParseError("empty CSV series")
    return TimeSeries(np.asarray(rows, dtype=np.float64), series_id=series_id)


def format_csv_series(series: TimeSeries) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in series.values) + "\n"


def filter_by_length(
    dataset: LabeledDataset, min_length: int | None = None, max_length: int | None = None
) -> LabeledDataset:
    """Drop series outside [min_length, max_length].  No-op when both are None."""
    if min_length is None and max_length is None:
        return dataset
    lo = min_length if min_length is not None else 1
    hi = max_length if max_length is not None else np.inf
    keep = [i for i, s in enumerate(dataset.series) if lo <= s.length <= hi]
    if not keep:
        raise ValueError("length filter removed every series")
    return LabeledDataset(
        series=tuple(dataset.series[i] for i in keep),
        labels=tuple(dataset.labels[i] for i in keep),
        split=tuple(dataset.split[i] for i in keep),
        name=dataset.name,
        declared_classes=dataset.declared_classes,
    )


def one_vs_rest_splits(dataset: LabeledDataset) -> list[ClassSplit]:
    """Build one split per train class, in sorted class order.

    Each split trains on that class's train series and tests on the full
    test split, with anomaly = "class differs".  A train class with no
    series cannot occur; a declared class absent from the train split is
    skipped with a warning.
    """
    test_series = dataset.subset("test")
    test_labels = dataset.subset_labels("test")
    if not test_series:
        raise ValueError("dataset has no test series")
    train_labels = dataset.subset_labels("train")
    train_series = dataset.subset("train")
    universe = sorted(set(train_labels) | set(dataset.declared_classes) | set(test_labels))
    splits = []
    for cls in universe:
        members = tuple(s for s, l in zip(train_series, train_labels) if l == cls)
        if not members:
            warnings.warn(f"class {cls!r} has no training series; skipping its split", stacklevel=2)
            continue
        flags = np.asarray([0 if l == cls else 1 for l in test_labels], dtype=np.int8)
        splits.append(ClassSplit(normal_class=cls, train=members, test=test_series, test_labels=flags))
    if not splits:
        raise ValueError("no class has training series")
    return splits


def stack_values(series: Iterable[TimeSeries]) -> np.ndarray:
    """Concatenate the values of equal-width series along time (validation helper)."""
    mats = [s.values for s in series]
    widths = {m.shape[1] for m in mats}
    if len(widths) != 1:
        raise ValueError(f"series have mixed channel counts {sorted(widths)}")
    return np.concatenate(mats, axis=0)
