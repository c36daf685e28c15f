"""Worked examples with known answers, one module at a time."""

import math

import numpy as np
import pytest
from scipy import integrate

from deadleaves import closedform as cf
from deadleaves import dlm1d, dlm2d, stats
from deadleaves.engine import SimulationWindow, forward_stream, substream
from deadleaves.grains import Dirac, GrainLaw1D, GrainLaw2D, Uniform
from deadleaves.marks import MarkMeasure, TestFunction
from deadleaves.noodle import Polyline, buffon_noodle_mc, crossings, poincare_mc

ONE = GrainLaw1D.fixed_length(1.0)
TWO_PART = GrainLaw1D.multi_component([(0.0, Dirac(1.0)), (2.0, Dirac(0.5))])


# grains


def test_disk_lambda_x_at_unit_distance_matches_grid_union_area():
    law = GrainLaw2D.disk(1.0)
    exact = 2 * math.pi - (2 * math.pi / 3 - math.sqrt(3) / 2)
    assert float(law.lambda_x(np.array([[1.0, 0.0]]))[0]) == pytest.approx(exact, rel=1e-9)
    # union of the unit disk and its translate by (1, 0), counted on a fine grid
    h = 0.002
    xs = np.arange(-1.0, 2.0, h) + h / 2
    ys = np.arange(-1.0, 1.0, h) + h / 2
    gx, gy = np.meshgrid(xs, ys)
    inside = (gx**2 + gy**2 <= 1) | ((gx - 1) ** 2 + gy**2 <= 1)
    assert inside.sum() * h * h == pytest.approx(exact, rel=2e-3)


def test_lambda_x_limits_for_disks():
    law = GrainLaw2D.disk(1.0)
    assert float(law.lambda_x(np.zeros((1, 2)))[0]) == pytest.approx(law.lam)
    far = law.lambda_x(np.array([[2.0, 0.0], [3.0, 4.0]]))
    assert np.allclose(far, 2 * law.lam)


def test_two_component_boundary_mass():
    assert TWO_PART.boundary_mass_mean() == pytest.approx(4.0)
    assert TWO_PART.lam == pytest.approx(1.5)


# engine


def test_zero_length_forward_span_is_empty():
    w = SimulationWindow.segment(10.0, 1.0)
    assert len(forward_stream(w, ONE, 2.0, 2.0, substream(1, "span"))) == 0


def test_mean_arrivals_is_time_times_volume():
    w = SimulationWindow.segment(50.0, 1.0)  # positions range over [-1, 51]
    counts = [len(forward_stream(w, ONE, 0.0, 2.0, substream(7, "count", i))) for i in range(200)]
    rep = stats.mean_report("arrivals", counts, 2.0 * 52.0)
    assert rep.verdict == "pass"


# dlm1d


def test_single_huge_leaf_gives_one_cell():
    t = dlm1d.simulate(0.01, GrainLaw1D.fixed_length(100.0), substream(3, "single"))
    assert t.n_cells == 1 and len(t.eta) == 0


def test_two_component_intensity():
    assert cf.intensity_1d(TWO_PART) == pytest.approx(4 / 1.5)
    counts = [len(dlm1d.simulate(500.0, TWO_PART, substream(5, "two", i)).eta) / 500.0 for i in range(40)]
    assert stats.mean_report("two", counts, 4 / 1.5).verdict == "pass"


@pytest.mark.parametrize("law", [ONE, GrainLaw1D.length_law(Uniform(0.5, 1.5))], ids=["fixed", "uniform"])
def test_mean_inverse_exposed_length(law):
    # the cell at the origin is size biased, so E[1/X] is the cell intensity 2/lambda
    X = cf.exposed_interval_law(law)
    cont, _ = integrate.quad(lambda x: float(X.density(x)) / x, 0.0, X.upper, points=X.breaks or None, limit=200)
    assert cont + sum(m / a for a, m in X.atoms) == pytest.approx(2 / law.lam, rel=1e-7)


def test_vacancy_vanishes_beyond_leaf_length():
    assert cf.vacancy(ONE, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert cf.vacancy(ONE, 1.5) == pytest.approx(0.0, abs=1e-12)


# dlm2d


def test_grid_coverage_rejects_tiny_leaves():
    with pytest.raises(dlm2d.DepthExhausted):
        dlm2d.simulate2d((0, 0, 10, 10), GrainLaw2D.disk(1e-4), substream(1, "tiny"), coverage="grid")


# closedform


def test_pcf_is_one_at_two():
    assert float(cf.pcf_1d(ONE, 2.0)) == pytest.approx(1.0)


def test_k1_halves_after_log2_over_lambda():
    k = cf.kernel("k1", ONE)
    assert k(1.0, 0.0, 1.0, math.log(2) / ONE.lam) == pytest.approx(cf.sigma1_sq(ONE) / 2, rel=1e-9)


@pytest.mark.slow
def test_k2_on_unit_box_is_sigma2():
    f = TestFunction.indicator((0.0, 0.0), (1.0, 1.0))
    k = cf.kernel("k2", GrainLaw2D.disk(1.0))
    assert k(f, 0.0, f, 0.0) == pytest.approx(cf.sigma2_sq(GrainLaw2D.disk(1.0)), rel=1e-12)


def test_seed_probability_one_is_rejected():
    with pytest.raises(ValueError):
        MarkMeasure.seeds(1.0)


def test_uniform_lengths_variance_matches_windows():
    law = GrainLaw1D.length_law(Uniform(0.5, 1.5))
    target = cf.sigma1_sq(law)
    assert target > 0
    totals = stats.map_replicates(lambda r: len(dlm1d.simulate(1000.0, law, r).eta), 17, "uvar", 1000)
    assert stats.estimate_variance(totals, 1000.0, target).verdict == "pass"


# noodle


def test_plus_sign_crosses_once():
    a = Polyline.segment((-1, 0), (1, 0))
    b = Polyline.segment((0, -1), (0, 1))
    assert crossings(a, b) == 1


def test_disjoint_segments_do_not_cross():
    assert crossings(Polyline.segment((0, 0), (1, 0)), Polyline.segment((0, 1), (1, 1))) == 0


def test_segment_against_unit_perimeter_square():
    rep = poincare_mc(Polyline.unit_segment(), Polyline.square(1.0), 100_000, substream(9, "sq"))
    assert rep.target == pytest.approx(4.0)
    assert rep.verdict == "pass"


def test_semicircle_buffon_and_spacing():
    semi = Polyline.semicircle(1.0)
    r1 = buffon_noodle_mc(semi, 1.0, 100_000, substream(9, "semi"))
    assert r1.target == pytest.approx(2 / math.pi, rel=1e-9)
    assert r1.verdict == "pass"
    r2 = buffon_noodle_mc(semi, 2.0, 100_000, substream(9, "semi2"))
    assert r2.target == pytest.approx(r1.target / 2)
    assert r2.verdict == "pass"


# stats


def test_constant_totals_have_zero_variance():
    assert stats.estimate_variance([3.0] * 10, 1.0).value == 0.0


def test_normal_draws_pass_normality():
    assert stats.normality_check(substream(2, "norm").standard_normal(10_000)).passed
