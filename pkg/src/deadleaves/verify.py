"""Named verification checks: each runs a simulation experiment described by a
config and compares it with its closed-form target."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import closedform as cf
from . import dlm1d, dlm2d, dlrm, noodle
from .engine import substream
from .grains import GrainLaw1D, GrainLaw2D, law_from_dict
from .marks import IncompatibleMark, MarkMeasure
from .stats import (
    EstimateReport,
    estimate_pcf,
    estimate_time_covariance,
    estimate_variance,
    ks_distance,
    map_replicates,
    mean_report,
    normality_check,
    proportion_report,
    estimate_variance_extrapolated,
    nested_masses,
    window_mass,
)


class UnsupportedCombination(ValueError):
    """The config asks for something the models cannot do (e.g. corner marks on disks)."""


@dataclass(frozen=True)
class BoundCheck:
    """A one-sided or two-sided bound on a statistic (not a z-test)."""

    name: str
    value: float
    limit: float
    replicates: int = 0
    relation: str = "<"  # "<", "<=" or "abs<="

    @property
    def verdict(self) -> str:
        if self.relation == "<":
            ok = self.value < self.limit
        elif self.relation == "<=":
            ok = self.value <= self.limit
        else:
            ok = abs(self.value) <= self.limit
        return "pass" if ok else "fail"

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "stderr": None, "replicates": self.replicates,
                "target": None, "threshold": self.limit, "z_score": None, "verdict": self.verdict}

    def line(self) -> str:
        rel = {"<": "<", "<=": "<=", "abs<=": "|.|<="}[self.relation]
        return f"{self.name}: {self.value:.6g} {rel} {self.limit:.6g} [{self.verdict}]"


@dataclass
class Context:
    """What a check needs besides its config: seed, retry attempt and threads."""

    seed: int
    attempt: int = 0
    threads: int = 1
    meta: dict = field(default_factory=dict)

    def tag(self, name: str) -> str:
        return f"{name}/attempt{self.attempt}"


# ---------------------------------------------------------------------------
# config helpers


def law_of(cfg: dict):
    if "law" not in cfg:
        raise UnsupportedCombination("this check needs a grain law")
    law = law_from_dict(cfg["law"])
    model = cfg.get("model")
    if model == "dlm1d" and not isinstance(law, GrainLaw1D):
        raise UnsupportedCombination("dlm1d needs a one-dimensional grain law")
    if model == "dlm2d" and not isinstance(law, GrainLaw2D):
        raise UnsupportedCombination("dlm2d needs a two-dimensional grain law")
    return law


def mark_of(cfg: dict, law) -> MarkMeasure | None:
    if cfg.get("mark") is None:
        if cfg.get("model") == "dlrm":
            raise UnsupportedCombination("dlrm needs a mark measure")
        return None
    m = MarkMeasure.from_dict(cfg["mark"])
    try:
        m.check(law)
    except IncompatibleMark as e:
        raise UnsupportedCombination(str(e)) from e
    return m


def window_of(cfg: dict, law):
    w = cfg.get("window")
    if w is None:
        raise UnsupportedCombination("this check needs a window")
    if law.dim == 1:
        return float(w[0] if isinstance(w, list) else w)
    if isinstance(w, list):
        return (0.0, 0.0, float(w[0]), float(w[1]))
    return (0.0, 0.0, float(w), float(w))


def measure_of(window, dim: int) -> float:
    return float(window) if dim == 1 else dlm2d.box_area(window)


def _dlrm_window(window, dim):
    return (window,) if dim == 1 else window


def window_totals(model: str, law, mark, window, replicates: int, ctx: Context, tag: str) -> np.ndarray:
    """Mass in the whole window and in the concentric half-side window, one row
    per independent replicate (memoised per process)."""
    key = (model, json.dumps(law.to_dict(), sort_keys=True), None if mark is None else json.dumps(mark.to_dict(), sort_keys=True),
           json.dumps(window), replicates, ctx.seed, ctx.tag(tag))
    if key in _TOTALS:
        return _TOTALS[key]
    win = _dlrm_window(window, law.dim) if model == "dlrm" else window
    out = map_replicates(lambda r: nested_masses(model, law, win, r, mark), ctx.seed, ctx.tag(tag),
                         replicates, ctx.threads)
    _TOTALS[key] = np.array(out, dtype=float)
    return _TOTALS[key]


_TOTALS: dict = {}


def clear_cache() -> None:
    _TOTALS.clear()


def _threshold(cfg) -> float:
    return float(cfg.get("threshold", 3.0))


# ---------------------------------------------------------------------------
# checks


def check_intensity(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    mark = mark_of(cfg, law)
    model = cfg["model"]
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    margin = float(p.get("margin", 0.0))
    if model == "dlm1d":
        target = cf.intensity_1d(law)
    elif model == "dlm2d":
        target = cf.intensity_2d(law)
    elif model == "dlrm":
        target = cf.alpha(law, mark)
        window = _dlrm_window(window, law.dim)
    else:
        raise UnsupportedCombination(f"intensity is not defined for model {model!r}")
    out = map_replicates(lambda r: window_mass(model, law, window, r, mark, margin), ctx.seed, ctx.tag("intensity"),
                         int(cfg["replicates"]), ctx.threads)
    name = p.get("label", "intensity")
    return [mean_report(name, [a / b for a, b in out], target, _threshold(cfg))]


def check_pcf(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    if law.dim != 1:
        raise UnsupportedCombination("the pair correlation check is one-dimensional")
    n = window_of(cfg, law)
    p = cfg.get("params", {})
    bins = np.asarray(p.get("bins", np.round(np.arange(0.0, 2.0001, 0.1), 10).tolist()), dtype=float)
    tess = map_replicates(lambda r: dlm1d.simulate(n, law, r), ctx.seed, ctx.tag("pcf"), int(cfg["replicates"]), ctx.threads)
    reps, atom = estimate_pcf(tess, bins, float(p.get("max_lag", bins[-1])), law=law, threshold=_threshold(cfg))
    return reps + [atom]


def _sigma_sq(model: str, law, mark) -> float:
    if model == "dlm1d":
        return cf.sigma1_sq(law)
    if model == "dlm2d":
        return cf.sigma2_sq(law)
    return cf.sigma0_sq(law, mark)


def check_variance(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    mark = mark_of(cfg, law)
    model = cfg["model"]
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    tot = window_totals(model, law, mark, window, int(cfg["replicates"]), ctx, p.get("sample", "variance"))
    target = _sigma_sq(model, law, mark)
    meas = measure_of(window, law.dim)
    rows = [estimate_variance(tot[:, 0], meas, target, "variance", _threshold(cfg))]
    if p.get("edge_extrapolation", False):
        rows.append(estimate_variance_extrapolated(tot[:, 0], tot[:, 1], meas, law.dim, target, threshold=_threshold(cfg)))
    if model == "dlm2d" and p.get("identity", True):
        diff = cf.sigma2_sq(law) - cf.sigma0_sq(law, MarkMeasure.boundary_surface())
        rows.append(BoundCheck("sigma2_sq - sigma0_sq(boundary)", diff, 1e-8, relation="abs<="))
    return rows


def check_interval_laws(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    n = window_of(cfg, law)
    R = law.radius_bound

    def one(rng):
        t = dlm1d.simulate(n, law, rng)
        x_len = dlm1d.cell_lengths_at_origin(t)
        x_full = dlm1d.cell_at_origin_is_full(t)
        # typical cell: a uniformly chosen cell whose left end is an eta point with
        # room for a whole leaf to its right inside the window
        left = t.breaks[1:-1]
        idx = np.flatnonzero(left <= n - R) + 1
        k = idx[rng.integers(len(idx))]
        return x_len, x_full, float(t.breaks[k + 1] - t.breaks[k]), bool(t.cell_full[k])

    out = map_replicates(one, ctx.seed, ctx.tag("intervals"), int(cfg["replicates"]), ctx.threads)
    xl, xf, yl, yf = (np.array(c) for c in zip(*out))
    th = _threshold(cfg)
    rows = []
    for name, lengths, full, mixed in (("X", xl, xf, cf.exposed_interval_law(law)), ("Y", yl, yf, cf.typical_interval_law(law))):
        rows.append(proportion_report(f"{name} atom mass", full, mixed.atom_mass, th))
        cont = lengths[~full.astype(bool)]
        rows.append(BoundCheck(f"{name} KS continuous part", ks_distance(cont, mixed.continuous_cdf), 1.63 / math.sqrt(len(cont)),
                               len(cont)))
    return rows


def check_vacancy(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    n = window_of(cfg, law)
    h = float(cfg.get("params", {}).get("h", 0.5))
    hits = map_replicates(lambda r: dlm1d.vacancy_indicator(dlm1d.simulate(n, law, r), h, (n - h) / 2),
                          ctx.seed, ctx.tag("vacancy"), int(cfg["replicates"]), ctx.threads)
    return [proportion_report(f"vacancy({h:g})", hits, cf.vacancy(law, h), _threshold(cfg))]


def evolve_paths(model: str, law, mark, window, times, replicates: int, ctx: Context) -> np.ndarray:
    """Totals at each grid time for independent stationary starts."""
    times = np.asarray(times, dtype=float)

    def one(rng):
        if model == "dlm1d":
            st = dlm1d.EvolvingState1D.from_tessellation(dlm1d.simulate(window, law, rng), law)
            _, _, counts = dlm1d.evolve(st, float(times[-1]), rng, times)
            return counts.astype(float)
        if model == "dlm2d":
            st = dlm2d.EvolvingState2D.from_tessellation(dlm2d.simulate2d(window, law, rng))
            return dlm2d.evolve2d(st, float(times[-1]), rng, times)[2]
        r = dlrm.simulate_dlrm(_dlrm_window(window, law.dim), law, mark, rng)
        f = _whole(r)
        return dlrm.evolve_xi(r, f, times, rng)[1]

    return np.array(map_replicates(one, ctx.seed, ctx.tag("paths"), replicates, ctx.threads))


def _whole(r):
    from .marks import TestFunction

    if r.dim == 1:
        return TestFunction.indicator([0.0], [r.window[0]])
    return TestFunction.indicator(r.window[:2], r.window[2:])


def check_time_covariance(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    mark = mark_of(cfg, law)
    model = cfg["model"]
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    lags = np.asarray(p.get("lags", [0.25 * k for k in range(9)]), dtype=float)
    times = np.asarray(p.get("times", lags.tolist()), dtype=float)
    paths = evolve_paths(model, law, mark, window, times, int(cfg["replicates"]), ctx)
    fit = estimate_time_covariance(paths, times, lags)
    rate = law.lam if mark is None else mark.effective_lam(law)
    th = _threshold(cfg)
    rows = [fit.report(rate, th, "decay rate")]
    sig = _sigma_sq(model, law, mark)
    rows.append(estimate_variance(paths[:, 0], measure_of(window, law.dim), sig, "lag-0 variance", th))
    ctx.meta["covariances"] = dict(zip(map(str, fit.lags), fit.covariances))
    return rows


def check_branch_cells(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    area = dlm2d.box_area(window)

    def one(rng):
        t = dlm2d.simulate2d(window, law, rng)
        return t.branch_count_in(window) / area, t.euler_cells_in(window) / area

    out = np.array(map_replicates(one, ctx.seed, ctx.tag("branch-cells"), int(cfg["replicates"]), ctx.threads))
    th = _threshold(cfg)
    rows = []
    if p.get("branch", True):
        rows.append(mean_report("branch points per area", out[:, 0], cf.beta3(law), th))
    cells = mean_report("cells per area", out[:, 1], cf.beta1(law), th)
    rel = p.get("cells_rel_tol")
    if rel is None:
        rows.append(cells)
    else:
        rows.append(cells.with_target(None))
        rows.append(BoundCheck("cells per area relative error", cells.value / cf.beta1(law) - 1, float(rel), cells.replicates,
                               "abs<="))
    return rows


def check_normality(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    mark = mark_of(cfg, law)
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    tot = window_totals(cfg["model"], law, mark, window, int(cfg["replicates"]), ctx, p.get("sample", "normality"))
    rep = normality_check(tot[:, 0])
    return [
        BoundCheck("standardized skewness", rep.skew, rep.skew_limit, rep.n, "abs<="),
        BoundCheck("excess kurtosis", rep.excess_kurtosis, rep.kurtosis_limit, rep.n, "abs<="),
        BoundCheck("KS distance to normal", rep.ks, rep.ks_limit, rep.n),
    ]


def polyline_of(d: dict) -> noodle.Polyline:
    kind = d.get("kind", "polyline")
    if kind == "segment":
        L = float(d.get("length", 1.0))
        return noodle.Polyline.segment((-L / 2, 0.0), (L / 2, 0.0))
    if kind == "square":
        return noodle.Polyline.square(float(d.get("perimeter", 1.0)))
    if kind == "semicircle":
        return noodle.Polyline.semicircle(float(d.get("length", 1.0)), int(d.get("segments", 256)))
    if kind == "polyline":
        return noodle.Polyline(np.asarray(d["vertices"], dtype=float), bool(d.get("closed", False)))
    raise UnsupportedCombination(f"unknown curve kind {kind!r}")


def check_noodles(cfg: dict, ctx: Context) -> list:
    p = cfg.get("params", {})
    samples = int(cfg.get("replicates", 10**6))
    th = _threshold(cfg)
    rows = []
    for k, item in enumerate(p.get("poincare", [])):
        a, b = polyline_of(item["a"]), polyline_of(item["b"])
        r = noodle.poincare_mc(a, b, samples, substream(ctx.seed, ctx.tag("poincare"), k))
        rows.append(EstimateReport(item.get("label", f"poincare[{k}]"), r.value, r.stderr, r.replicates, r.target, th))
    for k, item in enumerate(p.get("buffon", [])):
        a = polyline_of(item["curve"])
        r = noodle.buffon_noodle_mc(a, float(item.get("spacing", 1.0)), samples, substream(ctx.seed, ctx.tag("buffon"), k))
        rows.append(EstimateReport(item.get("label", f"buffon[{k}]"), r.value, r.stderr, r.replicates, r.target, th))
    if not rows:
        raise UnsupportedCombination("noodle check needs poincare or buffon items")
    return rows


def check_connectivity(cfg: dict, ctx: Context) -> list:
    law = law_of(cfg)
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    margin = float(p.get("margin", law.radius_bound))
    inner = dlm2d.erode(window, margin)
    iso = map_replicates(lambda r: dlm2d.connectivity_diagnostic(dlm2d.simulate2d(window, law, r), inner),
                         ctx.seed, ctx.tag("connectivity"), int(cfg["replicates"]), ctx.threads)
    iso = np.asarray(iso)
    frac = float(np.mean(iso > 0))
    ctx.meta["isolated_components"] = iso.tolist()
    return [BoundCheck("replicates with isolated components", frac, float(p.get("max_fraction", 0.05)), len(iso))]


def check_determinism(cfg: dict, ctx: Context, reference_root=None) -> list:
    """Run each listed config twice (or once against reference_root/<name>) and
    compare every artifact except meta.json byte for byte."""
    import tempfile
    from pathlib import Path

    from . import cli

    base = _config_dir(cfg.get("params", {}).get("base_dir", "configs/acceptance"))
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        for name in cfg["params"]["configs"]:
            path = Path(name) if Path(name).is_absolute() else base / name
            sub = cli.load_config(path)
            stem = sub.get("name", path.stem)
            runs = []
            if reference_root is not None:
                runs.append(Path(reference_root) / stem)
            while len(runs) < 2:
                out = Path(tmp) / f"{stem}-{len(runs)}"
                clear_cache()
                cli.run(sub, out=str(out), threads=ctx.threads)
                runs.append(out)
            a, b = (_artifact_bytes(r) for r in runs)
            differ = sorted(k for k in set(a) | set(b) if a.get(k) != b.get(k))
            ctx.meta.setdefault("differences", {})[stem] = differ
            rows.append(BoundCheck(f"{stem}: differing artifacts", float(len(differ)), 0.0, len(a), "<="))
    return rows


def _config_dir(name):
    """Directory of the listed configs: as given, else relative to the source checkout."""
    from pathlib import Path

    p = Path(name)
    if p.is_absolute() or p.is_dir():
        return p
    repo = Path(__file__).resolve().parents[2] / p
    return repo if repo.is_dir() else p


def _artifact_bytes(folder) -> dict:
    from pathlib import Path

    return {p.name: p.read_bytes() for p in sorted(Path(folder).iterdir()) if p.is_file() and p.name != "meta.json"}


CHECKS: dict[str, Callable[[dict, Context], list]] = {
    "determinism": check_determinism,
    "intensity": check_intensity,
    "pcf": check_pcf,
    "variance": check_variance,
    "interval-laws": check_interval_laws,
    "vacancy": check_vacancy,
    "time-covariance": check_time_covariance,
    "branch-cells": check_branch_cells,
    "normality": check_normality,
    "noodles": check_noodles,
    "connectivity": check_connectivity,
}


@dataclass
class Verification:
    name: str
    rows: list
    attempts: int
    first_failures: list
    meta: dict

    @property
    def passed(self) -> bool:
        return all(r.verdict != "fail" for r in self.rows)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def records(self) -> list[dict]:
        return [dict(r.to_dict(), attempt=self.attempts - 1) for r in self.rows]


def run_check(cfg: dict, threads: int = 1, retry: bool = True) -> Verification:
    """Run the config's check; on any failure rerun once on a fresh stream and keep the second result."""
    check = cfg.get("check")
    if check not in CHECKS:
        raise UnsupportedCombination(f"unknown check {check!r}")
    fn = CHECKS[check]
    ctx = Context(int(cfg["seed"]), 0, threads)
    rows = fn(cfg, ctx)
    if check == "determinism":
        retry = False
    failed = [r.name for r in rows if r.verdict == "fail"]
    if failed and retry and cfg.get("retry", True):
        ctx = Context(int(cfg["seed"]), 1, threads)
        rows = fn(cfg, ctx)
        return Verification(cfg.get("name", check), rows, 2, failed, ctx.meta)
    return Verification(cfg.get("name", check), rows, 1, [], ctx.meta)
