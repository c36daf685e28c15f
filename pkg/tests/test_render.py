import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves import dlm1d, dlm2d
from deadleaves.engine import substream
from deadleaves.grains import GrainLaw1D, GrainLaw2D
from deadleaves.render import render_svg, svg_scale

NS = "{http://www.w3.org/2000/svg}"


@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=10, deadline=None)
def test_1d_tick_count_equals_eta(seed):
    t = dlm1d.simulate(15.0, GrainLaw1D.fixed_length(1.0), substream(seed, "svg"))
    root = ET.fromstring(render_svg(t))
    ticks = [e for e in root.iter(NS + "line") if e.get("class") == "tick"]
    assert len(ticks) == len(t.eta)


def _path_length(points: str) -> float:
    p = np.array([[float(v) for v in xy.split(",")] for xy in points.split()])
    return float(np.linalg.norm(np.diff(p, axis=0), axis=1).sum())


@pytest.mark.parametrize("law", [GrainLaw2D.disk(1.0), GrainLaw2D.square(1.0)], ids=["disk", "square"])
def test_2d_path_length_matches_boundary_length(law):
    t = dlm2d.simulate2d((0, 0, 6, 6), law, substream(1, "svg2"))
    svg = render_svg(t)
    root = ET.fromstring(svg)
    k = svg_scale(t)
    total = sum(_path_length(e.get("points")) for e in root.iter(NS + "polyline"))
    assert total / k == pytest.approx(t.total_boundary_length, rel=1e-3)
    dots = list(root.iter(NS + "circle"))
    assert len(dots) == len(t.branch_points)


def test_shaded_render_is_valid_xml():
    t = dlm2d.simulate2d((0, 0, 3, 3), GrainLaw2D.disk(1.0), substream(2, "svg3"))
    root = ET.fromstring(render_svg(t, shade=True, size=200))
    assert root.get("width") == "200"


def test_empty_tessellation_gives_valid_svg():
    t = dlm2d.tessellate2d(GrainLaw2D.disk(1.0), (0, 0, 1, 1), np.array([[0.5, 0.5]]), np.array([5.0]), np.array([0.1]))
    assert t is not None and len(t.arcs) == 0
    root = ET.fromstring(render_svg(t))
    assert list(root.iter(NS + "polyline")) == []
    one = dlm1d.tessellate(1.0, [-1.0], [[5.0]], np.array([0.0]), [0.1])
    root = ET.fromstring(render_svg(one))
    assert [e for e in root.iter(NS + "line") if e.get("class") == "tick"] == []


def test_rejects_other_objects():
    with pytest.raises(TypeError):
        render_svg(object())
