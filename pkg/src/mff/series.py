"""Univariate series, sliding-window slicing and supervised pairing."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptySeries,
    InsufficientExamples,
    Mismatch,
    MissingColumn,
    MissingFile,
    NonNumericValue,
    TooFewExamples,
    WindowNonPositive,
    WindowTooLarge,
)

__all__ = [
    "TimeSeries",
    "TimeSlice",
    "TimeSliceSet",
    "SupervisedSet",
    "load_series",
    "sliding_window",
    "make_supervised",
    "train_test_split",
]


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Ordered ``(timestamp, value)`` pairs.

    Timestamps are opaque labels and are never parsed; only the ordinal
    position of a value matters to the method.
    """

    values: np.ndarray
    timestamps: tuple = field(default=())

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if values.size == 0:
            raise EmptySeries("a time series needs at least one value")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0]) + 1
            raise NonNumericValue(bad, str(values[bad - 1]))
        timestamps = tuple(str(t) for t in self.timestamps)
        if not timestamps:
            timestamps = tuple(str(i) for i in range(1, values.size + 1))
        if len(timestamps) != values.size:
            raise Mismatch(
                f"{len(timestamps)} timestamps for {values.size} values"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", timestamps)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class TimeSlice:
    """A contiguous run ``v_i .. v_{i+Ws-1}``; ``start`` is the 1-based ``i``."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))

    @property
    def ordinal(self) -> int:
        return self.start

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class TimeSliceSet:
    window_size: int
    slices: tuple

    def __len__(self) -> int:
        return len(self.slices)

    def __iter__(self):
        return iter(self.slices)

    def __getitem__(self, i):
        return self.slices[i]

    def as_matrix(self) -> np.ndarray:
        """Stack the slices into an ``(n - Ws + 1, Ws)`` array."""
        return np.vstack([s.values for s in self.slices])


@dataclass(frozen=True)
class SupervisedSet:
    """Slices paired with the value that immediately follows them.

    ``prediction_slice`` is the final slice of the series; it has no target
    and is what a trained model forecasts from.
    """

    slices: tuple
    targets: np.ndarray
    prediction_slice: Optional[TimeSlice] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", _frozen_array(self.targets))
        if len(self.slices) != self.targets.size:
            raise Mismatch("one target is required per slice")

    @property
    def examples(self) -> list:
        return list(zip(self.slices, self.targets.tolist()))

    def __len__(self) -> int:
        return len(self.slices)


def load_series(
    path,
    value_column: str,
    timestamp_column: Optional[str] = None,
) -> TimeSeries:
    """Read a univariate series from a CSV file with a header row.

    Rows keep file order. A value that does not parse as a float is an
    error, never silently dropped; the reported row is 1-based and counts
    data rows only (the header is row 0).
    """
    if not os.path.isfile(path):
        raise MissingFile(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptySeries(f"{path} is empty") from None
        if value_column not in header:
            raise MissingColumn(f"column {value_column!r} not in header {header}")
        vi = header.index(value_column)
        ti = None
        if timestamp_column is not None:
            if timestamp_column not in header:
                raise MissingColumn(
                    f"column {timestamp_column!r} not in header {header}"
                )
            ti = header.index(timestamp_column)

        values, stamps = [], []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            raw = row[vi].strip() if vi < len(row) else ""
            try:
                v = float(raw)
            except ValueError:
                raise NonNumericValue(row_no, raw) from None
            if not math.isfinite(v):
                raise NonNumericValue(row_no, raw)
            values.append(v)
            stamps.append(row[ti].strip() if ti is not None else str(row_no))

    if not values:
        raise EmptySeries(f"{path} has no data rows")
    return TimeSeries(values=values, timestamps=tuple(stamps))


def _as_values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return TimeSeries(values=series).values


def sliding_window(series, ws: int) -> TimeSliceSet:
    """Cut ``series`` into its ``n - ws + 1`` contiguous windows of length ``ws``."""
    values = _as_values(series)
    n = values.size
    if ws < 1:
        raise WindowNonPositive(f"window size must be >= 1, got {ws}")
    if ws > n:
        raise WindowTooLarge(f"window size {ws} exceeds series length {n}")
    windows = np.lib.stride_tricks.sliding_window_view(values, ws)
    slices = tuple(TimeSlice(start=i + 1, values=w) for i, w in enumerate(windows))
    return TimeSliceSet(window_size=int(ws), slices=slices)


def make_supervised(slice_set: TimeSliceSet, series) -> SupervisedSet:
    values = _as_values(series)
    ws = slice_set.window_size
    for s in slice_set:
        lo = s.start - 1
        if lo < 0 or lo + ws > values.size or not np.array_equal(
            s.values, values[lo : lo + ws]
        ):
            raise Mismatch(f"slice {s.start} does not match the series")
    if len(slice_set) < 2:
        raise InsufficientExamples(
            "window covers the whole series; no slice has a following value"
        )
    body = slice_set.slices[:-1]
    targets = [values[s.start - 1 + ws] for s in body]
    return SupervisedSet(
        slices=tuple(body), targets=targets, prediction_slice=slice_set.slices[-1]
    )


def split_point(count: int, train_fraction: float) -> int:
    """Number of training examples for a chronological split.

    ``ceil(count * train_fraction)``, held inside ``[1, count - 1]`` so both
    sides are non-empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if count < 2:
        raise TooFewExamples(f"need at least 2 examples to split, got {count}")
    # round away representation noise such as 0.7 * 10 = 7.000000000000001
    k = math.ceil(round(count * train_fraction, 9))
    return min(max(k, 1), count - 1)


def train_test_split(sup: SupervisedSet, train_fraction: float = 0.8):
    """Chronological split; the test half is strictly later than the train half."""
    k = split_point(len(sup), train_fraction)
    train = SupervisedSet(slices=sup.slices[:k], targets=sup.targets[:k])
    test = SupervisedSet(
        slices=sup.slices[k:],
        targets=sup.targets[k:],
        prediction_slice=sup.prediction_slice,
    )
    return train, test


def reassemble(slice_set: TimeSliceSet) -> np.ndarray:
    """First value of every slice followed by the tail of the last slice."""
    heads = [s.values[0] for s in slice_set.slices[:-1]]
    return np.concatenate([np.array(heads, dtype=np.float64), slice_set[-1].values])


def values_of(series: Sequence[float] | TimeSeries) -> np.ndarray:
    return _as_values(series)
