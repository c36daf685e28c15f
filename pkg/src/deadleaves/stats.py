"""Monte Carlo estimators and checks against closed-form targets.

Every replicate draws from its own keyed substream, so results do not depend
on the number of worker threads or on the order in which replicates finish.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from . import closedform as cf
from . import dlm1d, dlm2d, dlrm
from .engine import substream
from .marks import MarkMeasure, TestFunction


@dataclass(frozen=True)
class EstimateReport:
    name: str
    value: float
    stderr: float
    replicates: int
    target: float | None = None
    threshold: float = 3.0

    def __post_init__(self):
        if not self.stderr >= 0:
            raise ValueError("stderr must be nonnegative")

    @property
    def z_score(self) -> float | None:
        if self.target is None:
            return None
        diff = self.value - self.target
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.stderr

    @property
    def verdict(self) -> str:
        z = self.z_score
        if z is None:
            return "no_target"
        return "pass" if abs(z) <= self.threshold else "fail"

    def with_target(self, target: float | None, threshold: float | None = None) -> "EstimateReport":
        return EstimateReport(self.name, self.value, self.stderr, self.replicates, target,
                              self.threshold if threshold is None else threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z_score"] = self.z_score
        d["verdict"] = self.verdict
        return d

    def line(self) -> str:
        tgt = "" if self.target is None else f" target={self.target:.6g} z={self.z_score:+.2f}"
        return f"{self.name}: {self.value:.6g} +/- {self.stderr:.3g}{tgt} [{self.verdict}]"


REPORT_FIELDS = ["name", "value", "stderr", "replicates", "target", "threshold", "z_score", "verdict"]


def reports_to_csv(reports: Sequence[EstimateReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\r\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: ("" if v is None else _fmt(v)) for k, v in r.to_dict().items()})
    return buf.getvalue()


def reports_to_json(reports: Sequence[EstimateReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# replicate plumbing


def map_replicates(fn: Callable[[np.random.Generator], object], seed: int, tag: str, replicates: int,
                   threads: int = 1) -> list:
    """[fn(substream(seed, tag, i)) for i in range(replicates)], possibly threaded.

    The output order is the replicate order whatever the thread count.
    """
    rngs = (substream(seed, tag, i) for i in range(replicates))
    if threads <= 1:
        return [fn(r) for r in rngs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, rngs))


def mean_report(name: str, values, target: float | None = None, threshold: float = 3.0) -> EstimateReport:
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    return EstimateReport(name, float(v.mean()), se, len(v), target, threshold)


def proportion_report(name: str, hits, target: float | None = None, threshold: float = 3.0) -> EstimateReport:
    """Mean of 0/1 outcomes; stderr from the target when given (binomial), else the sample."""
    h = np.asarray(hits, dtype=float)
    n = len(h)
    p = float(h.mean())
    ref = p if target is None else target
    return EstimateReport(name, p, math.sqrt(ref * (1 - ref) / n), n, target, threshold)


# ---------------------------------------------------------------------------
# models as (window) -> total-mass samplers


def _margin(law, margin: float | None) -> float:
    return law.radius_bound if margin is None else float(margin)


def window_mass(model: str, law, window, rng: np.random.Generator, mark: MarkMeasure | None = None,
                margin: float = 0.0) -> tuple[float, float]:
    """(mass in the eroded window, eroded measure) for one stationary sample.

    model: dlm1d (eta count), dlm2d (boundary length) or dlrm (mark mass).
    """
    if model == "dlm1d":
        n = float(window)
        t = dlm1d.simulate(n, law, rng)
        a, b = margin, n - margin
        if b <= a:
            raise ValueError("erosion margin leaves an empty window")
        return float(t.count_in(a, b)), b - a
    if model == "dlm2d":
        box = dlm2d.as_box(window)
        t = dlm2d.simulate2d(box, law, rng)
        inner = dlm2d.erode(box, margin)
        return t.boundary_length_in(inner), dlm2d.box_area(inner)
    if model == "dlrm":
        if mark is None:
            raise ValueError("dlrm needs a mark measure")
        r = dlrm.simulate_dlrm(window, law, mark, rng)
        if law.dim == 1:
            n = float(window[0] if isinstance(window, (tuple, list)) else window)
            f = TestFunction.indicator([margin], [n - margin])
            return r.evaluate(f), n - 2 * margin
        inner = dlm2d.erode(dlm2d.as_box(window), margin)
        f = TestFunction.indicator(inner[:2], inner[2:])
        return r.evaluate(f), dlm2d.box_area(inner)
    raise ValueError(f"unknown model {model!r}")


def nested_masses(model: str, law, window, rng: np.random.Generator, mark: MarkMeasure | None = None) -> tuple[float, float]:
    """Mass in the whole window and in the concentric window of half the side."""
    if model == "dlm1d":
        n = float(window)
        t = dlm1d.simulate(n, law, rng)
        return float(len(t.eta)), float(t.count_in(n / 4, 3 * n / 4))
    if model == "dlm2d":
        box = dlm2d.as_box(window)
        t = dlm2d.simulate2d(box, law, rng)
        return t.total_boundary_length, t.boundary_length_in(_half(box))
    if model == "dlrm":
        r = dlrm.simulate_dlrm(window, law, mark, rng)
        if law.dim == 1:
            n = r.window[0]
            return r.total(), r.evaluate(TestFunction.indicator([n / 4], [3 * n / 4]))
        h = _half(r.window)
        return r.total(), r.evaluate(TestFunction.indicator(h[:2], h[2:]))
    raise ValueError(f"unknown model {model!r}")


def _half(box):
    x0, y0, x1, y1 = box
    dx, dy = (x1 - x0) / 4, (y1 - y0) / 4
    return (x0 + dx, y0 + dy, x1 - dx, y1 - dy)


def estimate_intensity(model: str, law, window, replicates: int, seed: int, mark: MarkMeasure | None = None,
                       margin: float | None = None, target: float | None = None, threads: int = 1,
                       name: str = "intensity") -> EstimateReport:
    """Mean mass per unit measure of the eroded window, across independent windows."""
    m = _margin(law, margin)
    out = map_replicates(lambda r: window_mass(model, law, window, r, mark, m), seed, name, replicates, threads)
    return mean_report(name, [a / b for a, b in out], target)


def _loo_variances(x: np.ndarray) -> np.ndarray:
    n = len(x)
    s1, s2 = x.sum(), (x * x).sum()
    m = (s1 - x) / (n - 1)
    return ((s2 - x * x) - (n - 1) * m * m) / (n - 2)


def _jackknife_se(loo: np.ndarray) -> float:
    n = len(loo)
    return math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))


def estimate_variance(totals, measure: float, target: float | None = None, name: str = "variance",
                      threshold: float = 3.0) -> EstimateReport:
    """Var(total)/measure from independent replicates, with a jackknife stderr."""
    x = np.asarray(totals, dtype=float)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 replicates")
    v = x.var(ddof=1)
    se = _jackknife_se(_loo_variances(x))
    return EstimateReport(name, float(v / measure), se / measure, n, target, threshold)


def estimate_variance_extrapolated(totals, half_totals, measure: float, dim: int, target: float | None = None,
                                   name: str = "variance (edge-extrapolated)", threshold: float = 3.0) -> EstimateReport:
    """Edge-corrected asymptotic variance from nested windows.

    For a window of side s the normalised variance is sigma^2 + c/s + O(s^-2),
    the c/s term coming from pairs split by the window edge.  With V the
    normalised variance of the whole window and V' that of the concentric
    window of half the side, 2V - V' removes the c/s term.  The stderr is a
    jackknife over replicates, which keeps the correlation between V and V'.
    """
    x = np.asarray(totals, dtype=float)
    y = np.asarray(half_totals, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("need matching totals from at least 3 replicates")
    small = measure / 2**dim
    est = 2 * x.var(ddof=1) / measure - y.var(ddof=1) / small
    loo = 2 * _loo_variances(x) / measure - _loo_variances(y) / small
    return EstimateReport(name, float(est), _jackknife_se(loo), len(x), target, threshold)


# ---------------------------------------------------------------------------
# pair correlation (one dimension)


def estimate_pcf(tessellations, bins, max_lag: float | None = None, margin: float = 0.0,
                 intensity: float | None = None, law=None, threshold: float = 3.0):
    """Binned pair correlation of eta and the rate of pairs at the atom distance.

    Ordered pairs x < y of eta points in the eroded window are binned by
    y - x; the expected count in a bin is intensity^2 * int (L - z) rho(z) dz,
    so each bin is divided by that with rho = 1.  Pairs that are the two ends
    of one whole visible leaf component form the atom and are counted apart.
    Returns (bin reports, atom report).
    """
    bins = np.asarray(bins, dtype=float)
    if max_lag is None:
        max_lag = float(bins[-1])
    if np.any(np.diff(bins) <= 0) or bins[0] < 0:
        raise ValueError("bins must be increasing and nonnegative")
    if np.any(np.diff(bins) > max_lag) or bins[-1] > max_lag:
        raise ValueError("bins must not extend beyond max_lag")
    tess = list(tessellations)
    if len(tess) < 2:
        raise ValueError("need several tessellations")
    per = []
    atom = []
    for t in tess:
        a, b = margin, t.n - margin
        L = b - a
        e = t.eta[(t.eta >= a) & (t.eta <= b)]
        counts = np.zeros(len(bins) - 1)
        k = 1
        while k < len(e):
            d = e[k:] - e[:-k]
            if d.min() > max_lag:
                break
            counts += np.histogram(d, bins)[0]
            k += 1
        left = t.breaks[:-1][t.cell_full]
        right = t.breaks[1:][t.cell_full]
        inside = (left >= a) & (right <= b)
        full_d = right[inside] - left[inside]
        counts -= np.histogram(full_d, bins)[0]
        beta = len(e) / L if intensity is None else intensity
        lo, hi = bins[:-1], bins[1:]
        weight = L * (hi - lo) - (hi**2 - lo**2) / 2
        per.append(counts / (beta**2 * weight))
        atom.append(inside.sum() / L)
    per = np.array(per)
    lo, hi = bins[:-1], bins[1:]
    reps = []
    for k in range(len(lo)):
        tgt = None
        if law is not None:
            z = np.linspace(lo[k], hi[k], 201)[1:-1]
            tgt = float(np.mean(cf.pcf_1d(law, z)))
        reps.append(mean_report(f"pcf[{lo[k]:.3g},{hi[k]:.3g})", per[:, k], tgt, threshold))
    atom_target = None
    if law is not None:
        atoms = cf.pcf_1d_atoms(law)
        atom_target = sum(cf.pair_rate_at_atom(law, z) for z, _ in atoms) if atoms else 0.0
    return reps, mean_report("pair_rate_atom", atom, atom_target, threshold)


# ---------------------------------------------------------------------------
# time covariance


@dataclass(frozen=True)
class DecayFit:
    rate: float
    rate_stderr: float
    intercept: float
    intercept_stderr: float
    lags: tuple
    covariances: tuple
    used: tuple  # lags kept in the fit (positive covariance)

    def report(self, target: float | None, threshold: float = 3.0, name: str = "decay_rate") -> EstimateReport:
        return EstimateReport(name, self.rate, self.rate_stderr, len(self.lags), target, threshold)


def lag_covariances(paths: np.ndarray, times: np.ndarray, lags) -> np.ndarray:
    """Stationary covariance at each lag, pooled over all pairs of grid times
    that lag apart.  paths has shape (replicates, len(times))."""
    paths = np.asarray(paths, dtype=float)
    times = np.asarray(times, dtype=float)
    mu = paths.mean()
    c = paths - mu
    out = []
    for lag in lags:
        j = np.searchsorted(times, times + lag - 1e-9)
        ok = (j < len(times))
        ok[ok] &= np.abs(times[j[ok]] - times[ok] - lag) < 1e-9
        if not ok.any():
            raise ValueError(f"lag {lag} is not a difference of grid times")
        i = np.flatnonzero(ok)
        out.append(float(np.mean(c[:, i] * c[:, j[ok]])))
    return np.array(out)


def _fit(lags, cov, weights):
    keep = cov > 0
    X = np.stack([np.ones(keep.sum()), np.asarray(lags)[keep]], axis=1)
    y = np.log(cov[keep])
    w = weights[keep]
    beta = np.linalg.solve(X.T @ (w[:, None] * X), X.T @ (w * y))
    return beta, keep


def estimate_time_covariance(paths: np.ndarray, times, lags) -> DecayFit:
    """Weighted least squares fit of log covariance against lag.

    Weights are the inverse squared relative stderr of each covariance;
    parameter stderrs are delete-one-replicate jackknife values, which
    account for the correlation between lags.
    """
    paths = np.asarray(paths, dtype=float)
    lags = np.asarray(lags, dtype=float)
    n = len(paths)
    if n < 10:
        raise ValueError("need at least 10 replicate paths")
    cov = lag_covariances(paths, times, lags)
    loo = np.array([lag_covariances(np.delete(paths, k, axis=0), times, lags) for k in range(n)])
    cov_se = np.sqrt((n - 1) / n * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    weights = (cov / np.maximum(cov_se, 1e-300)) ** 2
    beta, keep = _fit(lags, cov, weights)
    jk = []
    for k in range(n):
        if np.all(loo[k][keep] > 0):
            b, _ = _fit(lags[keep], loo[k][keep], weights[keep])
            jk.append(b)
    jk = np.array(jk)
    m = len(jk)
    se = np.sqrt((m - 1) / m * np.sum((jk - jk.mean(axis=0)) ** 2, axis=0))
    return DecayFit(float(-beta[1]), float(se[1]), float(beta[0]), float(se[0]),
                    tuple(lags.tolist()), tuple(cov.tolist()), tuple(lags[keep].tolist()))


# ---------------------------------------------------------------------------
# normality


@dataclass(frozen=True)
class NormalityReport:
    n: int
    skew: float
    excess_kurtosis: float
    ks: float

    @property
    def skew_limit(self) -> float:
        return 4 * math.sqrt(6 / self.n)

    @property
    def kurtosis_limit(self) -> float:
        return 4 * math.sqrt(24 / self.n)

    @property
    def ks_limit(self) -> float:
        return 1.63 / math.sqrt(self.n)

    @property
    def passed(self) -> bool:
        return abs(self.skew) < self.skew_limit and abs(self.excess_kurtosis) < self.kurtosis_limit and self.ks < self.ks_limit

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(skew_limit=self.skew_limit, kurtosis_limit=self.kurtosis_limit, ks_limit=self.ks_limit,
                 verdict=self.verdict)
        return d

    def line(self) -> str:
        return (f"normality n={self.n}: skew {self.skew:+.3f} (<{self.skew_limit:.3f}), "
                f"ex-kurt {self.excess_kurtosis:+.3f} (<{self.kurtosis_limit:.3f}), "
                f"KS {self.ks:.4f} (<{self.ks_limit:.4f}) [{self.verdict}]")


def normality_check(samples) -> NormalityReport:
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < 1000:
        raise ValueError("normality check needs at least 1000 samples")
    z = (x - x.mean()) / x.std(ddof=1)
    ks = sps.kstest(z, "norm").statistic
    return NormalityReport(n, float(sps.skew(x)), float(sps.kurtosis(x)), float(ks))


def ks_distance(samples, cdf) -> float:
    return float(sps.kstest(np.asarray(samples, dtype=float), cdf).statistic)
