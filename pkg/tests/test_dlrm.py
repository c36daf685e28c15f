import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves import closedform as cf
from deadleaves import dlm1d, dlm2d, dlrm
from deadleaves.engine import substream
from deadleaves.grains import GrainLaw1D, GrainLaw2D
from deadleaves.marks import MarkMeasure, TestFunction

ONE = GrainLaw1D.fixed_length(1.0)
DISK = GrainLaw2D.disk(1.0)
SQUARE = GrainLaw2D.square(1.0)
BOX = (0.0, 0.0, 5.0, 5.0)
seeds = st.integers(0, 2**31 - 1)


def test_boundary_mark_equals_dlm_on_shared_seed():
    r = dlrm.simulate_dlrm(50.0, ONE, MarkMeasure.boundary_surface(), substream(3, "bs"))
    t = dlm1d.simulate(50.0, ONE, substream(3, "bs"))
    assert r.total() == len(t.eta)
    r2 = dlrm.simulate_dlrm(BOX, DISK, MarkMeasure.boundary_surface(), substream(4, "bs2"))
    t2 = dlm2d.simulate2d(BOX, DISK, substream(4, "bs2"))
    assert r2.total() == pytest.approx(t2.total_boundary_length, rel=1e-12)


@pytest.mark.parametrize("mark", [MarkMeasure.colour(0.5), MarkMeasure.boundary_surface(), MarkMeasure.density([1.0, 2.0], [0.5, 0.5])],
                         ids=["colour", "boundary", "density"])
@given(seed=seeds, cut=st.floats(0.5, 19.5), c=st.floats(-2, 2))
@settings(max_examples=15, deadline=None)
def test_evaluate_is_linear_1d(mark, seed, cut, c):
    r = dlrm.simulate_dlrm(20.0, ONE, mark, substream(seed, "lin"))
    f = TestFunction.indicator([0.0], [cut])
    g = TestFunction.indicator([cut], [20.0])
    assert r.evaluate(f) + r.evaluate(g) == pytest.approx(r.total(), rel=1e-9, abs=1e-9)
    assert r.evaluate(f + c * g) == pytest.approx(r.evaluate(f) + c * r.evaluate(g), rel=1e-9, abs=1e-9)


@given(seed=seeds)
@settings(max_examples=8, deadline=None)
def test_evaluate_is_additive_2d(seed):
    r = dlrm.simulate_dlrm(BOX, DISK, MarkMeasure.colour(0.5), substream(seed, "add"))
    halves = [TestFunction.indicator([0, 0], [2.5, 5]), TestFunction.indicator([2.5, 0], [5, 5])]
    assert sum(r.evaluate(h) for h in halves) == pytest.approx(r.total(), abs=1e-9)
    assert 0.0 <= r.total() <= 25.0 + 1e-9


def test_colour_total_is_bounded_by_area():
    r = dlrm.simulate_dlrm(BOX, SQUARE, MarkMeasure.colour(1.0), substream(1, "c1"))
    assert r.total() == pytest.approx(25.0, rel=1e-9)
    r0 = dlrm.simulate_dlrm(BOX, SQUARE, MarkMeasure.colour(0.0), substream(1, "c1"))
    assert r0.total() == 0.0


def test_corner_marks_are_visible_corners():
    r = dlrm.simulate_dlrm(BOX, SQUARE, MarkMeasure.corner_counting(), substream(2, "corner"))
    pts = r.visible_corners()
    assert r.total() == len(pts)
    L = r.tess.leaves
    # no visible corner lies strictly inside an earlier leaf's polygon
    import shapely

    for p in pts[:30]:
        owner = np.flatnonzero(np.isclose(L.verts, p).all(axis=2).any(axis=1))[0]
        for j in range(owner):
            assert not shapely.Polygon(L.verts[j]).contains(shapely.Point(p))


def test_seeds_visibility_rule():
    r = dlrm.simulate_dlrm(30.0, ONE, MarkMeasure.seeds(0.5, [[0.0]]), substream(5, "seeds"))
    pts, keys = r.seed_atoms()
    vis = r.visible_seeds()
    assert len(vis) <= len(pts)
    t = r.tess
    for p in vis[:, 0]:
        i = np.searchsorted(t.breaks, p, side="right") - 1
        k = keys[np.flatnonzero(pts[:, 0] == p)[0]]
        assert k < t.times[t.cell_leaf[min(i, t.n_cells - 1)]]
    assert r.total() == len(vis)


def test_seed_intensity_quick():
    m = MarkMeasure.seeds(0.5, [[0.0]])
    vals = [dlrm.simulate_dlrm(100.0, ONE, m, substream(6, "si", k)).total() / 100.0 for k in range(60)]
    assert np.mean(vals) == pytest.approx(cf.alpha(ONE, m), abs=0.06)


def test_evolution_monotone_leaf_masses():
    mark = MarkMeasure.colour(1.0)
    rng = substream(9, "mono")
    r = dlrm.simulate_dlrm(20.0, ONE, mark, rng)
    f = TestFunction.indicator([0.0], [20.0])
    before = r.leaf_masses()
    grid, values, final = dlrm.evolve_xi(r, f, [0.0, 0.5, 1.0], rng)
    after = final.leaf_masses()
    assert np.allclose(values, 20.0)
    for k, v in after.items():
        if k in before:
            assert v <= before[k] + 1e-9
    assert final.time == 1.0


def test_evolution_monotone_leaf_masses_2d():
    rng = substream(10, "mono2")
    r = dlrm.simulate_dlrm(BOX, DISK, MarkMeasure.boundary_surface(), rng)
    before = r.leaf_masses()
    _, values, final = dlrm.evolve_xi(r, TestFunction.indicator([0, 0], [5, 5]), [0.3, 0.6], rng)
    for k, v in final.leaf_masses().items():
        if k in before:
            assert v <= before[k] + 1e-9
    assert values[-1] == pytest.approx(final.total())


def test_evaluate_xi_and_errors():
    v = dlrm.evaluate_xi(10.0, ONE, MarkMeasure.colour(1.0), TestFunction.indicator([2.0], [4.0]), substream(0, "e"))
    assert v == pytest.approx(2.0)
    r = dlrm.simulate_dlrm(10.0, ONE, MarkMeasure.colour(0.5), substream(0, "e"))
    with pytest.raises(ValueError):
        r.evaluate(TestFunction.indicator([0, 0], [1, 1]))
    with pytest.raises(ValueError):
        dlrm.evolve_xi(r, TestFunction.indicator([0.0], [1.0]), [1.0, 0.5], substream(0))


def test_evolution_colour_2d_keeps_area():
    rng = substream(12, "col2")
    r = dlrm.simulate_dlrm(BOX, SQUARE, MarkMeasure.colour(1.0), rng)
    _, values, final = dlrm.evolve_xi(r, TestFunction.indicator([0, 0], [5, 5]), [0.2, 0.8], rng)
    assert np.allclose(values, 25.0)
    assert sum(final.leaf_masses().values()) == pytest.approx(25.0)
