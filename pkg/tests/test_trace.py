import numpy as np
import pytest

from stlmon.errors import (
    EmptyTrace,
    InconsistentTimeGrid,
    TraceFormatError,
)
from stlmon.trace import (
    SampledTrace,
    TauWindow,
    load_csv,
    project_original,
)


def _trace(n=5, dt=0.5):
    samples = np.column_stack([np.arange(n, dtype=float), -np.arange(n, dtype=float)])
    return SampledTrace(dt, ("a", "b"), samples)


def test_basic_accessors():
    tr = _trace()
    assert len(tr) == 5
    assert tr.duration == 2.0
    assert tr.column("b")[2] == -2.0
    assert tr.env_at(1) == {"a": 1.0, "b": -1.0}


def test_samples_are_read_only():
    tr = _trace()
    with pytest.raises(ValueError):
        tr.samples[0, 0] = 99.0


def test_validation():
    with pytest.raises(ValueError):
        SampledTrace(0.0, ("a",), np.ones((3, 1)))
    with pytest.raises(ValueError):
        SampledTrace(1.0, ("a", "b"), np.ones((3, 1)))
    with pytest.raises(ValueError):
        SampledTrace(1.0, ("a",), np.array([[np.nan]]))
    with pytest.raises(ValueError):
        SampledTrace(1.0, ("a",), np.empty((0, 1)))


def test_prefix_view():
    tr = _trace()
    p = tr.prefix(2)
    assert p.end_index == 2
    assert p.end_time == 1.0
    assert p.observed(2) and not p.observed(3)
    assert p.samples.shape == (3, 2)


def test_csv_round_trip(tmp_path):
    tr = _trace()
    plain = tmp_path / "plain.csv"
    timed = tmp_path / "timed.csv"
    tr.write_csv(plain)
    tr.write_csv(timed, time_column=True)
    for path in (plain, timed):
        back = load_csv(path, dt=0.5)
        assert back.names == tr.names
        np.testing.assert_array_equal(back.samples, tr.samples)


def test_csv_round_trip_preserves_exact_floats(tmp_path):
    vals = np.array([[0.1 + 0.2], [1.0 / 3.0], [-1e-17]])
    tr = SampledTrace(1.0, ("v",), vals)
    path = tmp_path / "t.csv"
    tr.write_csv(path)
    np.testing.assert_array_equal(load_csv(path, 1.0).samples, vals)


def test_load_csv_errors(tmp_path):
    bad_grid = tmp_path / "grid.csv"
    bad_grid.write_text("time,a\n0.0,1\n0.7,2\n")
    with pytest.raises(InconsistentTimeGrid):
        load_csv(bad_grid, dt=0.5)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("a,b\n1,2\n3\n")
    with pytest.raises(TraceFormatError):
        load_csv(ragged, dt=1.0)

    words = tmp_path / "words.csv"
    words.write_text("a\noops\n")
    with pytest.raises(TraceFormatError):
        load_csv(words, dt=1.0)

    empty = tmp_path / "empty.csv"
    empty.write_text("a,b\n")
    with pytest.raises(EmptyTrace):
        load_csv(empty, dt=1.0)


def test_window_at_pads_with_first_row():
    tr = _trace()
    w = tr.window_at(1, k=4)
    np.testing.assert_array_equal(w.samples[:, 0], [0.0, 0.0, 0.0, 1.0])
    assert w.k == 4
    assert w.span == 1.5
    full = tr.window_at(4, k=4)
    np.testing.assert_array_equal(full.samples[:, 0], [1.0, 2.0, 3.0, 4.0])


def test_tau_window_replicates_first_state_then_shifts():
    w = TauWindow(k=3, dim=2)
    w.push([1.0, 10.0])
    np.testing.assert_array_equal(w.states, [[1, 10]] * 3)
    w.push([2.0, 20.0])
    np.testing.assert_array_equal(w.states, [[1, 10], [1, 10], [2, 20]])
    w.push([3.0, 30.0])
    w.push([4.0, 40.0])
    np.testing.assert_array_equal(w.states, [[2, 20], [3, 30], [4, 40]])
    assert w.flat().shape == (6,)
    np.testing.assert_array_equal(w.flat()[-2:], [4.0, 40.0])


def test_tau_window_view():
    w = TauWindow(k=2, dim=1)
    w.push([5.0])
    view = w.view(0.1, ("z",))
    assert view.k == 2
    assert view.span == pytest.approx(0.1)


def test_project_original_takes_newest_rows():
    windows = np.stack(
        [
            [[1.0, 2.0], [3.0, 4.0]],
            [[5.0, 6.0], [7.0, 8.0]],
        ]
    )
    np.testing.assert_array_equal(project_original(windows), [[3.0, 4.0], [7.0, 8.0]])
