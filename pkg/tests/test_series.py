import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mff.errors import (
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
from mff.series import (
    TimeSeries,
    TimeSliceSet,
    load_series,
    make_supervised,
    reassemble,
    sliding_window,
    train_test_split,
)


def test_load_simple(write_csv):
    s = load_series(write_csv("t,v\n1,10\n2,20\n"), "v")
    assert s.n == 2
    assert s.values.tolist() == [10.0, 20.0]


def test_load_keeps_timestamps_as_labels(write_csv):
    s = load_series(write_csv("month,cci\n1990-01,4680\n1990-02,4685.5\n"), "cci", "month")
    assert s.timestamps == ("1990-01", "1990-02")


def test_load_295_rows(write_csv):
    body = "\n".join(f"{i},{4000 + i}" for i in range(295))
    s = load_series(write_csv("t,v\n" + body + "\n"), "v")
    assert s.n == 295


def test_load_non_numeric_reports_row(write_csv):
    with pytest.raises(NonNumericValue) as exc:
        load_series(write_csv("t,v\n1,abc\n"), "v")
    assert exc.value.row == 1


def test_load_non_numeric_later_row(write_csv):
    with pytest.raises(NonNumericValue) as exc:
        load_series(write_csv("t,v\n1,3\n2,4\n3,nan\n"), "v")
    assert exc.value.row == 3


@pytest.mark.parametrize(
    "text, col, err",
    [
        ("t,v\n1,2\n", "x", MissingColumn),
        ("t,v\n", "v", EmptySeries),
        ("", "v", EmptySeries),
    ],
)
def test_load_errors(write_csv, text, col, err):
    with pytest.raises(err):
        load_series(write_csv(text), col)


def test_load_missing_file(tmp_path):
    with pytest.raises(MissingFile):
        load_series(tmp_path / "nope.csv", "v")


def test_timeseries_rejects_nan():
    with pytest.raises(NonNumericValue):
        TimeSeries(values=[1.0, float("nan")])


def test_sliding_window_small():
    ss = sliding_window(TimeSeries(values=[1, 2, 3, 4, 5]), 3)
    assert [s.values.tolist() for s in ss] == [[1, 2, 3], [2, 3, 4], [3, 4, 5]]
    assert [s.start for s in ss] == [1, 2, 3]


def test_sliding_window_experiment_count():
    assert len(sliding_window(np.arange(295.0), 180)) == 116


def test_full_window_is_whole_series():
    ss = sliding_window([4.0, 3.0, 2.0, 1.0], 4)
    assert len(ss) == 1
    assert ss[0].values.tolist() == [4.0, 3.0, 2.0, 1.0]


@pytest.mark.parametrize("ws, err", [(0, WindowNonPositive), (-2, WindowNonPositive), (6, WindowTooLarge)])
def test_sliding_window_errors(ws, err):
    with pytest.raises(err):
        sliding_window([1.0, 2, 3, 4, 5], ws)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_slice_count_and_reassembly(data):
    n = data.draw(st.integers(1, 200))
    ws = data.draw(st.integers(1, n))
    values = np.array(data.draw(st.lists(st.floats(-1e6, 1e6), min_size=n, max_size=n)))
    ss = sliding_window(values, ws)
    assert len(ss) == n - ws + 1
    assert [s.start for s in ss] == list(range(1, n - ws + 2))
    np.testing.assert_array_equal(reassemble(ss), values)


def test_make_supervised_small():
    values = [1.0, 2, 3, 4]
    sup = make_supervised(sliding_window(values, 2), values)
    assert [(s.values.tolist(), y) for s, y in sup.examples] == [([1, 2], 3), ([2, 3], 4)]
    assert sup.prediction_slice.values.tolist() == [3, 4]


def test_make_supervised_experiment_count():
    values = np.arange(295.0)
    sup = make_supervised(sliding_window(values, 180), values)
    assert len(sup) == 115
    # target of slice i is v_{i+Ws}
    assert all(y == values[s.start - 1 + 180] for s, y in sup.examples)


def test_make_supervised_full_window():
    values = [1.0, 2, 3]
    with pytest.raises(InsufficientExamples):
        make_supervised(sliding_window(values, 3), values)


def test_make_supervised_mismatch():
    with pytest.raises(Mismatch):
        make_supervised(sliding_window([1.0, 2, 3, 4], 2), [1.0, 2, 3, 5])


@pytest.mark.parametrize("count, n_train", [(10, 8), (115, 92), (5, 4), (2, 1)])
def test_split_counts(count, n_train):
    values = np.arange(count + 2.0)
    sup = make_supervised(sliding_window(values, 2), values)
    assert len(sup) == count
    train, test = train_test_split(sup, 0.8)
    assert (len(train), len(test)) == (n_train, count - n_train)


def test_split_too_few():
    values = [1.0, 2, 3]
    sup = make_supervised(sliding_window(values, 2), values)
    with pytest.raises(TooFewExamples):
        train_test_split(sup, 0.8)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 150), st.floats(0.05, 0.95))
def test_split_is_ordered_partition(count, frac):
    values = np.arange(count + 3.0)
    sup = make_supervised(sliding_window(values, 3), values)
    train, test = train_test_split(sup, frac)
    assert len(train) >= 1 and len(test) >= 1
    joined = [s.start for s in train.slices] + [s.start for s in test.slices]
    assert joined == [s.start for s in sup.slices]
    np.testing.assert_array_equal(np.concatenate([train.targets, test.targets]), sup.targets)


def test_types_are_immutable():
    s = TimeSeries(values=[1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0
    ss = sliding_window(s, 1)
    assert isinstance(ss, TimeSliceSet)
    with pytest.raises(ValueError):
        ss[0].values[0] = 3.0
