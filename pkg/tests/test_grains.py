import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves import grains
from deadleaves.grains import Dirac, Exponential, GrainLaw1D, GrainLaw2D, Uniform, law_from_dict

LAWS_1D = [
    GrainLaw1D.fixed_length(1.0),
    GrainLaw1D.length_law(Uniform(0.5, 2.0)),
    GrainLaw1D.length_law(Exponential(1.0)),
    GrainLaw1D.multi_component([(0.0, Dirac(1.0)), (2.0, Dirac(0.5))]),
]
LAWS_2D = [GrainLaw2D.disk(1.0), GrainLaw2D.square(1.0), GrainLaw2D.square(1.0, random_rotation=False)]

coord = st.floats(-4.0, 4.0, allow_nan=False)


@pytest.mark.parametrize("law", LAWS_1D, ids=lambda l: l.to_dict()["kind"])
@given(x=coord)
@settings(max_examples=40, deadline=None)
def test_lambda_x_bounds_1d(law, x):
    lx = float(law.lambda_x(x))
    assert law.lam - 1e-9 <= lx <= 2 * law.lam + 1e-9
    assert lx == pytest.approx(float(law.lambda_x(-x)), abs=1e-9)
    assert lx + float(law.covariogram(x)) == pytest.approx(2 * law.lam, abs=1e-9)


@pytest.mark.parametrize("law", LAWS_2D, ids=["disk", "rotated-square", "fixed-square"])
@given(x=coord, y=coord)
@settings(max_examples=30, deadline=None)
def test_lambda_x_bounds_2d(law, x, y):
    p = np.array([[x, y]])
    lx = float(law.lambda_x(p)[0])
    assert law.lam - 1e-9 <= lx <= 2 * law.lam + 1e-9
    assert lx == pytest.approx(float(law.lambda_x(-p)[0]), abs=1e-6)
    assert lx + float(law.covariogram(p)[0]) == pytest.approx(2 * law.lam, abs=1e-9)


def test_lambda_x_at_zero_and_far():
    law = GrainLaw1D.fixed_length(1.0)
    assert float(law.lambda_x(0.0)) == pytest.approx(1.0)
    assert float(law.lambda_x(5.0)) == pytest.approx(2.0)
    assert float(grains.lambda_x(law, 0.5)) == pytest.approx(1.5)


def test_disk_covariogram_matches_lens():
    law = GrainLaw2D.disk(1.0)
    for d in (0.0, 0.3, 1.0, 1.7):
        assert float(law.covariogram(np.array([[d, 0.0]]))[0]) == pytest.approx(grains.lens_area(1.0, d), rel=1e-9)


def test_fixed_square_covariogram_is_product():
    law = GrainLaw2D.square(1.0, random_rotation=False)
    p = np.array([[0.3, -0.4]])
    assert float(law.covariogram(p)[0]) == pytest.approx(0.7 * 0.6, rel=1e-6)


def test_boundary_mass_means():
    assert grains.boundary_mass_mean(GrainLaw1D.fixed_length(1.0)) == pytest.approx(2.0)
    assert grains.boundary_mass_mean(GrainLaw2D.disk(1.0)) == pytest.approx(2 * math.pi)
    assert grains.boundary_mass_mean(GrainLaw2D.square(2.0)) == pytest.approx(8.0)


def test_sample_shape(rng):
    seg = grains.sample_shape(GrainLaw1D.fixed_length(1.5), rng)
    assert seg.shape == (1, 2) and seg[0, 1] - seg[0, 0] == pytest.approx(1.5)
    d = grains.sample_shape(GrainLaw2D.disk(2.0), rng)
    assert d.area == pytest.approx(4 * math.pi)
    sq = grains.sample_shape(GrainLaw2D.square(1.0), rng)
    assert sq.area == pytest.approx(1.0) and sq.perimeter == pytest.approx(4.0)


def test_rejects_bad_laws():
    with pytest.raises(ValueError):
        GrainLaw1D.fixed_length(0.0)
    with pytest.raises(ValueError):
        GrainLaw1D.multi_component([(0.0, Dirac(1.0)), (0.5, Dirac(1.0))])
    with pytest.raises(ValueError):
        GrainLaw2D.polygon([[0, 0], [1, 1], [1, 0], [0, 1]])
    with pytest.raises(ValueError):
        law_from_dict({"kind": "banana"})


@pytest.mark.parametrize("d", [
    {"kind": "fixed_length", "length": 2.0},
    {"kind": "length_law", "length": {"law": "uniform", "low": 0.5, "high": 1.5}},
    {"kind": "disk", "radius": 1.0},
    {"kind": "square", "side": 1.0},
])
def test_law_round_trip(d):
    law = law_from_dict(d)
    again = law_from_dict(law.to_dict())
    assert again.lam == pytest.approx(law.lam)
    assert again.dim == law.dim


@given(low=st.floats(0.1, 2.0), width=st.one_of(st.just(0.0), st.floats(0.01, 2.0)))
@settings(max_examples=30, deadline=None)
def test_uniform_length_sampling_in_range(low, width):
    law = Uniform(low, low + width) if width > 0 else Dirac(low)
    s = law.sample(np.random.default_rng(0), 200)
    assert np.all(s >= low - 1e-12) and np.all(s <= low + width + 1e-12)
