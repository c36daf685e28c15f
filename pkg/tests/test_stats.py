import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deadleaves import stats
from deadleaves.engine import substream
from deadleaves.grains import GrainLaw1D
from deadleaves.stats import EstimateReport


def test_report_verdicts():
    r = EstimateReport("x", 1.1, 0.05, 100, 1.0)
    assert r.z_score == pytest.approx(2.0)
    assert r.verdict == "pass"
    assert r.with_target(0.5).verdict == "fail"
    assert r.with_target(None).verdict == "no_target"
    assert EstimateReport("x", 1.0, 0.0, 1, 1.0).z_score == 0.0
    with pytest.raises(ValueError):
        EstimateReport("x", 1.0, -1.0, 1)


def test_report_serialisation():
    reps = [EstimateReport("a", 0.1, 0.01, 10, 0.1), EstimateReport("b", 2.0, 0.5, 10)]
    text = stats.reports_to_csv(reps)
    lines = text.split("\r\n")
    assert lines[0].split(",") == stats.REPORT_FIELDS
    assert lines[1].startswith("a,0.1,0.01,10,0.1,3.0,0.0,pass")
    data = json.loads(stats.reports_to_json(reps))
    assert data[1]["verdict"] == "no_target" and data[1]["target"] is None


def test_map_replicates_thread_independent():
    f = lambda r: float(r.random())  # noqa: E731
    one = stats.map_replicates(f, 5, "t", 20, threads=1)
    four = stats.map_replicates(f, 5, "t", 20, threads=4)
    assert one == four
    assert one[3] == substream(5, "t", 3).random()


@pytest.mark.parametrize("n", [400, 1600, 6400])
def test_mean_stderr_scaling(n):
    x = substream(1, "se", n).normal(size=n)
    r = stats.mean_report("m", x)
    assert r.stderr * math.sqrt(n) == pytest.approx(1.0, rel=0.1)


def test_variance_jackknife_stderr_matches_normal_theory():
    rng = substream(2, "var")
    x = rng.normal(0.0, 2.0, size=4000)
    r = stats.estimate_variance(x, 1.0, 4.0)
    # Var of the sample variance of a normal is 2 sigma^4 / (n - 1)
    assert r.stderr == pytest.approx(math.sqrt(2 * 16 / 3999), rel=0.1)
    assert r.verdict == "pass"


@given(x=st.lists(st.floats(-100, 100), min_size=4, max_size=30))
@settings(max_examples=50, deadline=None)
def test_leave_one_out_variances(x):
    x = np.asarray(x)
    loo = stats._loo_variances(x)
    direct = np.array([np.delete(x, i).var(ddof=1) for i in range(len(x))])
    assert np.allclose(loo, direct, atol=1e-6 * max(1.0, direct.max()))


def test_extrapolated_variance_removes_linear_edge_term():
    # totals whose normalised variance is exactly 1 + c / s on the whole and half windows
    rng = substream(3, "ext")
    z1 = rng.normal(size=5000)
    z1 = (z1 - z1.mean()) / z1.std(ddof=1)
    s, c = 10.0, 2.0
    x = z1 * math.sqrt(s * s * (1 + c / s))
    y = z1 * math.sqrt((s / 2) ** 2 * (1 + c / (s / 2)))
    r = stats.estimate_variance_extrapolated(x, y, s * s, 2, 1.0)
    assert r.value == pytest.approx(1.0, rel=1e-9)


def test_proportion_report_uses_binomial_error():
    hits = np.r_[np.ones(250), np.zeros(750)]
    r = stats.proportion_report("p", hits, 0.25)
    assert r.value == 0.25 and r.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 1000))


def test_time_covariance_fit_on_ar1_paths():
    rng = substream(4, "ou")
    times = np.arange(0, 2.01, 0.25)
    rate = 1.5
    n = 3000
    x = np.empty((n, len(times)))
    x[:, 0] = rng.normal(size=n)
    a = math.exp(-rate * 0.25)
    for k in range(1, len(times)):
        x[:, k] = a * x[:, k - 1] + math.sqrt(1 - a * a) * rng.normal(size=n)
    fit = stats.estimate_time_covariance(x, times, times)
    assert abs(fit.rate - rate) <= 4 * fit.rate_stderr
    assert fit.covariances[0] == pytest.approx(1.0, rel=0.1)


def test_normality_check():
    rng = substream(5, "norm")
    assert stats.normality_check(rng.normal(size=2000)).passed
    assert not stats.normality_check(rng.exponential(size=2000)).passed
    with pytest.raises(ValueError):
        stats.normality_check(rng.normal(size=10))


def test_pcf_estimator_on_fixed_length():
    from deadleaves import closedform as cf
    from deadleaves import dlm1d

    law = GrainLaw1D.fixed_length(1.0)
    tess = [dlm1d.simulate(300.0, law, substream(6, "pcf", k)) for k in range(40)]
    bins = np.round(np.arange(0.0, 2.0001, 0.25), 10)
    reps, atom = stats.estimate_pcf(tess, bins, 2.0, law=law)
    assert len(reps) == len(bins) - 1
    assert atom.target == pytest.approx(cf.pair_rate_at_atom(law, 1.0))
    assert sum(r.verdict == "fail" for r in reps) <= 1
    assert atom.verdict == "pass"


def test_window_mass_erosion():
    law = GrainLaw1D.fixed_length(1.0)
    mass, measure = stats.window_mass("dlm1d", law, 20.0, substream(7, "wm"), None, 1.0)
    assert measure == pytest.approx(18.0)
    whole, half = stats.nested_masses("dlm1d", law, 20.0, substream(7, "nm"))
    assert 0 <= half <= whole
