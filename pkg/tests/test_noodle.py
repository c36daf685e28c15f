import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves import noodle
from deadleaves.engine import substream
from deadleaves.noodle import Polyline

pt = st.tuples(st.floats(-3, 3), st.floats(-3, 3))


def _length(v):
    v = np.asarray(v, dtype=float)
    return float(np.linalg.norm(np.diff(v, axis=0), axis=1).sum())


curves = st.lists(pt, min_size=2, max_size=6).filter(lambda v: _length(v) > 1e-3).map(lambda v: Polyline(np.array(v, dtype=float)))


def test_shapes():
    assert Polyline.unit_segment().length == pytest.approx(1.0)
    sq = Polyline.square(4.0)
    assert sq.closed and sq.length == pytest.approx(4.0)
    semi = Polyline.semicircle(2.0)
    assert semi.length == pytest.approx(2.0)
    assert Polyline.segment((0, 0), (3, 4)).scaled(2.0).length == pytest.approx(10.0)


def test_simple_crossings():
    a = Polyline.segment((-1, 0), (1, 0))
    b = Polyline.segment((0, -1), (0, 1))
    assert noodle.intersections(a, b) == (1, 0)
    c = Polyline.segment((0, 0), (0, 1))  # touches a at an endpoint
    assert noodle.intersections(a, c) == (0, 1)
    assert noodle.crossings(Polyline.square(4.0), Polyline.segment((-2, 0), (2, 0))) == 2


@given(a=curves, b=curves)
@settings(max_examples=60, deadline=None)
def test_crossings_symmetric(a, b):
    assert noodle.crossings(a, b) == noodle.crossings(b, a)


@given(a=curves, b=curves, theta=st.floats(-math.pi, math.pi), dx=st.floats(-5, 5), dy=st.floats(-5, 5))
@settings(max_examples=60, deadline=None)
def test_crossings_invariant_under_rigid_motion(a, b, theta, dx, dy):
    ca, ta = noodle.intersections(a, b)
    if ta:
        return  # tangencies are not stable under rounding
    ma, mb = a.moved(theta, (dx, dy)), b.moved(theta, (dx, dy))
    cm, tm = noodle.intersections(ma, mb)
    if tm == 0:
        assert cm == ca


def test_poincare_segments():
    a = Polyline.unit_segment()
    r = noodle.poincare_mc(a, a, 200_000, substream(1, "pc"))
    assert r.target == pytest.approx(4.0)
    assert abs(r.value - 4.0) <= 4 * r.stderr


def test_poincare_scales_with_lengths():
    a = Polyline.unit_segment()
    r = noodle.poincare_mc(a, a.scaled(2.0), 200_000, substream(2, "pc"))
    assert r.target == pytest.approx(8.0)
    assert abs(r.value - 8.0) <= 4 * r.stderr


def test_buffon_needle_and_spacing():
    a = Polyline.unit_segment()
    r = noodle.buffon_noodle_mc(a, 1.0, 200_000, substream(3, "bf"))
    assert r.target == pytest.approx(2 / math.pi)
    assert abs(r.value - r.target) <= 4 * r.stderr
    r2 = noodle.buffon_noodle_mc(Polyline.semicircle(1.0), 2.0, 200_000, substream(4, "bf"))
    assert abs(r2.value - 1 / math.pi) <= 4 * r2.stderr


def test_input_checks():
    with pytest.raises(ValueError):
        noodle.buffon_noodle_mc(Polyline.unit_segment(), 0.0, 10_000, substream(0))
    with pytest.raises(ValueError):
        noodle.poincare_mc(Polyline.unit_segment(), Polyline.unit_segment(), 10, substream(0))
