import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves import closedform as cf
from deadleaves.grains import Exponential, GrainLaw1D, GrainLaw2D, Uniform
from deadleaves.marks import MarkMeasure, TestFunction

ONE = GrainLaw1D.fixed_length(1.0)
DISK = GrainLaw2D.disk(1.0)
ROT = GrainLaw2D.square(1.0)
FIXED = GrainLaw2D.square(1.0, random_rotation=False)


def test_intensities():
    assert cf.intensity_1d(ONE) == pytest.approx(2.0)
    assert cf.intensity_1d(GrainLaw1D.fixed_length(3.0)) == pytest.approx(2.0 / 3.0)
    assert cf.intensity_2d(DISK) == pytest.approx(2.0)
    assert cf.intensity_2d(ROT) == pytest.approx(4.0)


def test_pcf_values():
    assert float(cf.pcf_1d(ONE, 0.5)) == pytest.approx(2.0 / 3.0, rel=1e-9)
    assert np.allclose(cf.pcf_1d(ONE, [1.5, 3.0, 10.0]), 1.0)
    assert cf.pair_rate_at_atom(ONE, 1.0) == pytest.approx(0.5)


def test_pcf_tends_to_one_for_random_lengths():
    law = GrainLaw1D.length_law(Exponential(1.0))
    assert float(cf.pcf_1d(law, 60.0)) == pytest.approx(1.0, abs=1e-6)


def test_sigma1_fixed_length():
    assert cf.sigma1_sq(ONE) == pytest.approx(8 * math.log(2) - 5, rel=1e-7)


@pytest.mark.parametrize("L", [0.5, 2.0, 4.0])
def test_sigma1_scaling(L):
    # scaling the leaves by L scales the count variance per length by 1/L
    assert cf.sigma1_sq(GrainLaw1D.fixed_length(L)) == pytest.approx(cf.sigma1_sq(ONE) / L, rel=1e-6)


def test_interval_laws_fixed_length():
    X, Y = cf.exposed_interval_law(ONE), cf.typical_interval_law(ONE)
    assert X.atom_mass == pytest.approx(0.5)
    assert Y.atom_mass == pytest.approx(0.25)
    assert X.atom_mass + X.continuous_mass == pytest.approx(1.0, abs=1e-8)
    assert Y.atom_mass + Y.continuous_mass == pytest.approx(1.0, abs=1e-8)
    assert X.mean == pytest.approx(4 * math.log(2) - 2, rel=1e-7)
    # the typical cell has mean 1/gamma, the exposed one is its size-biased version
    assert Y.mean == pytest.approx(0.5, rel=1e-7)
    second = Y.mean * X.mean
    assert second > Y.mean**2


@pytest.mark.parametrize("law", [GrainLaw1D.length_law(Uniform(0.5, 1.5)), GrainLaw1D.length_law(Exponential(1.0))])
def test_interval_laws_are_probabilities(law):
    for m in (cf.exposed_interval_law(law), cf.typical_interval_law(law)):
        assert m.atom_mass + m.continuous_mass == pytest.approx(1.0, abs=1e-6)
        c = m.continuous_cdf(np.linspace(0, 5, 50))
        assert np.all(np.diff(c) >= -1e-12) and c[0] == 0.0


def test_vacancy():
    assert cf.vacancy(ONE, 0.5) == pytest.approx(1.0 / 3.0)
    assert cf.vacancy(ONE, 0.0) == pytest.approx(1.0)
    v = [cf.vacancy(ONE, h) for h in np.linspace(0, 2, 21)]
    assert np.all(np.diff(v) <= 1e-12)


def test_planar_constants():
    assert cf.beta3(DISK) == pytest.approx(8 / math.pi, rel=1e-9)
    assert cf.beta1(ROT) == pytest.approx(16 / math.pi, rel=1e-9)
    assert cf.beta1(FIXED) == pytest.approx(4.0, rel=1e-9)


@pytest.mark.slow
def test_sigma2_disks():
    assert cf.sigma2_sq(DISK) == pytest.approx(0.4834819868, rel=1e-6)


def test_boundary_mark_matches_counting_variances():
    bs = MarkMeasure.boundary_surface()
    assert cf.sigma0_sq(ONE, bs) == pytest.approx(cf.sigma1_sq(ONE), rel=1e-6)
    assert cf.sigma0_sq(DISK, bs) == pytest.approx(cf.sigma2_sq(DISK), abs=1e-8)


def test_alpha():
    assert cf.alpha(DISK, MarkMeasure.colour(0.3)) == pytest.approx(0.3)
    assert cf.alpha(ONE, MarkMeasure.boundary_surface()) == pytest.approx(2.0)
    assert cf.alpha(DISK, MarkMeasure.seeds(0.5)) == pytest.approx(1 / math.pi)
    assert cf.alpha(ROT, MarkMeasure.corner_counting()) == pytest.approx(4.0)


@given(p=st.floats(0.05, 0.95))
@settings(max_examples=10, deadline=None)
def test_colour_variance_is_nonnegative(p):
    assert cf.sigma0_sq(ONE, MarkMeasure.colour(p)) >= 0


@given(
    pts=st.lists(st.tuples(st.floats(0.1, 5.0), st.floats(0.0, 3.0)), min_size=2, max_size=6),
    v=st.lists(st.floats(-2, 2), min_size=6, max_size=6),
)
@settings(max_examples=30, deadline=None)
def test_k1_kernel_positive_semidefinite(pts, v):
    k = cf.kernel("k1", ONE)
    args, times = zip(*pts)
    M = k.matrix(list(args), list(times))
    assert np.allclose(M, M.T)
    c = np.asarray(v[: len(pts)])
    assert c @ M @ c >= -1e-9


def test_k0_kernel_positive_semidefinite():
    k = cf.kernel("k0", ONE, MarkMeasure.colour(0.4))
    fs = [TestFunction.indicator([0.0], [1.0]), TestFunction.indicator([0.5], [2.0]), TestFunction.indicator([3.0], [4.0])]
    M = k.matrix(fs, [0.0, 0.3, 1.0])
    assert np.min(np.linalg.eigvalsh(M)) >= -1e-9
    with pytest.raises(ValueError):
        cf.kernel("k0", ONE)
    with pytest.raises(ValueError):
        cf.kernel("k9", ONE)


def test_target_listing():
    rows = cf.targets()
    names = {r["name"] for r in rows}
    assert {"intensity_1d", "sigma1_sq", "beta3", "vacancy"} <= names
    assert all(math.isfinite(r["value"]) for r in rows)


@pytest.mark.slow
def test_exposed_interval_mean_matches_simulation_for_uniform_lengths():
    from deadleaves import dlm1d
    from deadleaves.engine import substream

    law = GrainLaw1D.length_law(Uniform(0.5, 1.5))
    xs = np.array([dlm1d.cell_lengths_at_origin(dlm1d.simulate(6.0, law, substream(77, "X", k))) for k in range(3000)])
    X = cf.exposed_interval_law(law)
    assert xs.mean() == pytest.approx(X.mean, abs=4 * xs.std() / math.sqrt(len(xs)))
