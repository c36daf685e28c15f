import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves.engine import ReversedStream, SimulationWindow, forward_stream, substream
from deadleaves.grains import GrainLaw1D, GrainLaw2D


def test_substream_reproducible_and_distinct():
    a = substream(7, "x", 3).random(5)
    b = substream(7, "x", 3).random(5)
    c = substream(7, "x", 4).random(5)
    d = substream(8, "x", 3).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_window_volumes():
    w = SimulationWindow.square(2.0, halo=1.0)
    assert w.volume == pytest.approx(4.0)
    assert w.region_volume == pytest.approx(4 + 8 + np.pi)
    assert SimulationWindow.segment(5.0, 1.0).region_volume == pytest.approx(7.0)


def test_reversed_stream_is_consumption_independent(unit_law):
    w = SimulationWindow.segment(10.0, 1.0)
    s1 = ReversedStream(w, unit_law, substream(1, "s"))
    s2 = ReversedStream(w, unit_law, substream(1, "s"))
    s1.until(0.5)
    s1.until(3.0)
    a, b = s1.until(2.0), s2.until(2.0)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.positions, b.positions)
    assert np.all(np.diff(a.times) >= 0) and np.all(a.times <= 2.0)


@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_stream_points_inside_region_2d(seed):
    w = SimulationWindow.square(3.0, halo=1.0)
    b = ReversedStream(w, GrainLaw2D.disk(1.0), substream(seed, "r")).until(2.0)
    assert np.all(w.contains_region(b.positions))


def test_stream_rate_matches_region_volume():
    w = SimulationWindow.square(5.0, halo=1.0)
    b = ReversedStream(w, GrainLaw2D.disk(1.0), substream(3, "rate")).until(200.0)
    rate = len(b) / 200.0
    assert rate == pytest.approx(w.region_volume, rel=0.03)


def test_forward_stream_bounds(unit_law):
    w = SimulationWindow.segment(20.0, 1.0)
    b = forward_stream(w, unit_law, 1.0, 3.0, substream(2, "f"))
    assert np.all((b.times > 1.0) & (b.times <= 3.0))
    assert np.all(np.diff(b.times) >= 0)
    assert len(b) == pytest.approx(44, abs=25)
    with pytest.raises(ValueError):
        forward_stream(w, unit_law, 3.0, 1.0, substream(2, "f"))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        ReversedStream(SimulationWindow.segment(3.0), GrainLaw2D.disk(1.0), substream(0))
