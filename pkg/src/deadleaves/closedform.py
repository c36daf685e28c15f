"""Closed-form targets: intensities, pair correlation, asymptotic variances,
covariance kernels and interval laws."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .grains import GrainLaw1D, GrainLaw2D, minkowski_difference_area, polygon_area
from .marks import IncompatibleMark, MarkMeasure, TestFunction

EPS_ABS = 1e-11
EPS_REL = 1e-11
LIMIT = 400
TAIL_QUANTILE = 0.99


def _quad(f, a, b, points=None) -> float:
    pts = None
    if points is not None and math.isfinite(b):
        pts = sorted(p for p in points if a < p < b) or None
    with warnings.catch_warnings():
        # roundoff warnings near the requested 1e-11 tolerance are expected
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=EPS_ABS, epsrel=EPS_REL, limit=LIMIT, points=pts)
    return float(val)


def _interval_law(law: GrainLaw1D):
    if not isinstance(law, GrainLaw1D):
        raise TypeError("needs a 1D grain law")
    if not law.is_interval:
        raise ValueError("formula requires single-interval leaves with F(0) = 0")
    return law.single


def _breaks(H) -> list[float]:
    out = [a for a, _ in H.atoms]
    if math.isfinite(H.upper):
        out.append(H.upper)
    if H.lower > 0:
        out.append(H.lower)
    return out


# ---------------------------------------------------------------------------
# intensities


def intensity_1d(law: GrainLaw1D) -> float:
    """Intensity of the cell endpoint process: E[H0(boundary)] / lambda."""
    return law.boundary_mass_mean() / law.lam


def intensity_2d(law: GrainLaw2D) -> float:
    """Boundary length per unit area."""
    return law.boundary_mass_mean() / law.lam


def alpha(law, mark: MarkMeasure) -> float:
    """Intensity of the dead leaves random measure: E|M| / lambda."""
    return mark.mean_mass(law) / mark.effective_lam(law)


# ---------------------------------------------------------------------------
# pair correlation


@dataclass(frozen=True)
class PairCorrelation:
    continuous: float
    atoms: tuple  # ((z, mass in pcf units), ...)


def pcf_1d(law: GrainLaw1D, z) -> np.ndarray:
    """Continuous part of the pair correlation of the endpoint process."""
    H = _interval_law(law)
    lam = law.lam
    z = np.asarray(z, dtype=float)
    lz = law.lambda_x(z)
    f = H.pdf(z)
    f = np.zeros_like(z) if f is None else f
    return lam * (1 + H.cdf(z)) / lz + lam**2 * f / (4 * lz)


def pcf_1d_atoms(law: GrainLaw1D) -> list[tuple[float, float]]:
    """Atoms of the pair correlation measure at leaf-length atoms, in pcf units.

    The mass times gamma^2 is the rate of ordered endpoint pairs at exactly
    that distance per unit length (1 / (2 lambda) for fixed lengths).
    """
    H = _interval_law(law)
    lam = law.lam
    return [(a, lam**2 * w / (4 * float(law.lambda_x(a)))) for a, w in H.atoms if a > 0]


def pair_rate_at_atom(law: GrainLaw1D, z: float) -> float:
    gamma = intensity_1d(law)
    return sum(m for a, m in pcf_1d_atoms(law) if a == z) * gamma**2


# ---------------------------------------------------------------------------
# asymptotic variance, d = 1


def sigma1_sq(law: GrainLaw1D) -> float:
    """Asymptotic variance of eta([0, n]) / n."""
    H = _interval_law(law)
    lam = law.lam
    nodes, w = H.nodes(128)
    head = 2 / lam + 2 * float(w @ (1 / law.lambda_x(nodes)))

    def raw(u):
        return (1 + float(H.cdf(u))) / (lam * float(law.lambda_x(u))) - 1 / lam**2

    def tail(u):
        K = float(H.excess(u))
        return (K - lam * float(H.sf(u))) / (lam**2 * (2 * lam - K))

    cut = float(H.quantile(TAIL_QUANTILE))
    bks = _breaks(H)
    body = _quad(raw, 0.0, cut, bks) if cut > 0 else 0.0
    rest = _quad(tail, cut, H.upper if math.isfinite(H.upper) else math.inf, bks) if cut < H.upper else 0.0
    return head + 8 * (body + rest)


def _plane_integral_1d(law: GrainLaw1D) -> float:
    """V = int (2 lambda / lambda_x - 1) dx over the line (= int gamma(x) / lambda_x dx)."""
    lam = law.lam
    R = law.radius_bound
    g = lambda x: 2 * lam / float(law.lambda_x(x)) - 1
    pts = _breaks(law.single) if law.is_interval else [o for o, _ in law.components]
    if math.isfinite(R):
        return 2 * _quad(g, 0.0, R, pts)
    return 2 * _quad(g, 0.0, math.inf)


def _interval_integral(law: GrainLaw1D, a: float, b: float) -> float:
    """int_a^b dy / lambda_{y}, for the signed displacement y."""
    if b <= a:
        return 0.0
    pts = []
    if law.is_interval:
        pts = [c for c in _breaks(law.single)] + [-c for c in _breaks(law.single)] + [0.0]
    else:
        for o, l in law.components:
            pts += [o, -o]
    return _quad(lambda y: 1.0 / float(law.lambda_x(y)), a, b, pts)


@dataclass(frozen=True)
class VarianceTerms:
    """sigma^2 = first + second - third."""

    first: float
    second: float
    third: float

    @property
    def value(self) -> float:
        return self.first + self.second - self.third


def _mark_terms_1d(law: GrainLaw1D, mark: MarkMeasure) -> VarianceTerms:
    lam_eff = mark.effective_lam(law)
    V = _plane_integral_1d(law)
    if mark.kind in ("colour_lebesgue", "density"):
        m1, m2 = mark.level_moments
        return VarianceTerms(m2 * V, m1**2 * V, 2 * m1**2 * V)
    if mark.kind == "seeds":
        offs = np.array([o[0] for o in mark.offsets])
        scale = 1 - mark.q
        pair = sum(1 / (scale * float(law.lambda_x(b - a))) for a in offs for b in offs)
        EM = mark.mean_mass(law)
        return VarianceTerms(mark.q * pair, EM**2 / lam_eff**2 * V, 0.0)
    if mark.kind != "boundary_surface":
        raise IncompatibleMark(f"{mark.kind} marks are not defined in one dimension")
    EM = law.boundary_mass_mean()
    lam = law.lam
    if law.is_interval:
        H = law.single
        # endpoints 0 and H: pairs (0,0), (H,H) give 1/lambda each, cross pairs 1/lambda_H
        nodes, w = H.nodes(128)
        v4 = 2 / lam + 2 * float(w @ (1 / law.lambda_x(nodes)))
        # each endpoint sees the leaf on one side: 2 E int_0^H dy / lambda_y per endpoint
        inner = 4 * _quad(lambda y: float(H.sf(y)) / float(law.lambda_x(y)), 0.0, H.upper, _breaks(H))
        v6 = EM / lam * inner
        return VarianceTerms(v4, EM**2 / lam**2 * V, v6)
    return _multi_component_terms(law, V)


def _multi_component_terms(law: GrainLaw1D, V: float) -> VarianceTerms:
    """Boundary marks of multi-interval leaves, by product quadrature over component lengths."""
    lam = law.lam
    EM = law.boundary_mass_mean()
    comps = law.components
    rules = [l.nodes(32) for _, l in comps]
    # endpoints of component k: o_k (always) and o_k + H_k (distinct unless H_k == 0)
    v4 = 0.0
    v6 = 0.0
    for k, (ok, lk) in enumerate(comps):
        hk, wk = rules[k]
        for m, (om, lm) in enumerate(comps):
            hm, wm = rules[m]
            if k == m:
                ends = lambda h: [ok] if h == 0 else [ok, ok + h]
                for h, w in zip(hk, wk):
                    e = ends(h)
                    v4 += w * sum(1 / float(law.lambda_x(b - a)) for a in e for b in e)
                    # interval of the same component
                    v6 += w * sum(2 * _interval_integral(law, ok - a, ok + h - a) for a in e)
                continue
            for h1, w1 in zip(hk, wk):
                e1 = [ok] if h1 == 0 else [ok, ok + h1]
                for h2, w2 in zip(hm, wm):
                    e2 = [om] if h2 == 0 else [om, om + h2]
                    v4 += w1 * w2 * sum(1 / float(law.lambda_x(b - a)) for a in e1 for b in e2)
                    v6 += w1 * w2 * sum(2 * _interval_integral(law, om - a, om + h2 - a) for a in e1)
    return VarianceTerms(v4, EM**2 / lam**2 * V, EM / lam * v6)


# ---------------------------------------------------------------------------
# asymptotic variance, d = 2


def _radial(law: GrainLaw2D) -> bool:
    return law.rotation_invariant or (law.is_disk)


def _lambda_fn(law: GrainLaw2D):
    """lambda at displacement vectors (..., 2)."""
    if _radial(law):
        return lambda x: law.radial_lambda(np.linalg.norm(np.asarray(x, dtype=float), axis=-1))
    return lambda x: law.lambda_x(x)


def plane_integral_2d(law: GrainLaw2D) -> float:
    """V = int (2 lambda / lambda_x - 1) dx over the plane."""
    lam = law.lam
    R = law.radius_bound
    if _radial(law):
        pts = [2 * a for a, _ in law.radius.atoms] if law.is_disk else None
        f = lambda r: r * (2 * lam / float(law.radial_lambda(r)) - 1)
        return 2 * math.pi * _quad(f, 0.0, 2 * R, pts)
    # fixed polygon: polar Gauss rule in angle, adaptive in radius
    th, wt = np.polynomial.legendre.leggauss(96)
    th = math.pi * (th + 1)
    wt = math.pi * wt
    total = 0.0
    for t, w in zip(th, wt):
        e = np.array([math.cos(t), math.sin(t)])
        f = lambda r: r * (2 * lam / float(law.lambda_x(r * e)) - 1)
        total += w * _quad(f, 0.0, 2 * R)
    return total


def _edge_nodes(v: np.ndarray, n: int):
    """Gauss nodes along each polygon edge: points (k, n, 2), weights (k, n)."""
    g, w = np.polynomial.legendre.leggauss(n)
    t = (g + 1) / 2
    a = v
    b = np.roll(v, -1, axis=0)
    L = np.linalg.norm(b - a, axis=1)
    pts = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    return pts, (w / 2)[None, :] * L[:, None]


def _polygon_polar_integral(v: np.ndarray, x: np.ndarray, G, n: int = 24) -> float:
    """int over the polygon of g(|y - x|) dy for a point x on or in the polygon,
    given G(rho) = int_0^rho g(s) s ds (vectorised)."""
    k = len(v)
    total = 0.0
    g, w = np.polynomial.legendre.leggauss(n)
    for m in range(k):
        a, b = v[m], v[(m + 1) % k]
        pa, pb = a - x, b - x
        cross = pa[0] * pb[1] - pa[1] * pb[0]
        if abs(cross) < 1e-14:
            continue  # x on this edge: zero-area triangle
        ta, tb = math.atan2(pa[1], pa[0]), math.atan2(pb[1], pb[0])
        dt = (tb - ta + math.pi) % (2 * math.pi) - math.pi
        th = ta + dt * (g + 1) / 2
        # distance from x to the line ab along direction th
        e = b - a
        nrm = np.array([e[1], -e[0]]) / np.linalg.norm(e)
        h = abs(float(pa @ nrm))
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        rho = h / np.abs(dirs @ nrm)
        total += float((w * dt / 2) @ G(rho))
    return total


@lru_cache(maxsize=32)
def _radial_G(law: GrainLaw2D, weight: str = "inv"):
    """Table of G(rho) = int_0^rho (1 / lambda_s) s ds on [0, 2R]."""
    from scipy.interpolate import CubicSpline

    R = law.radius_bound
    grid = np.linspace(0.0, 2 * R, 2049)
    vals = 1.0 / law.radial_lambda(grid)
    # cumulative integral with a fine Simpson rule between grid points
    mid = 0.5 * (grid[1:] + grid[:-1])
    vm = 1.0 / law.radial_lambda(mid)
    seg = (grid[1:] - grid[:-1]) / 6 * (grid[:-1] * vals[:-1] + 4 * mid * vm + grid[1:] * vals[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    spline = CubicSpline(grid, cum)
    tail_rate = 1.0 / (2 * law.lam)

    def G(rho):
        rho = np.asarray(rho, dtype=float)
        inside = np.minimum(rho, 2 * R)
        return spline(inside) + tail_rate * 0.5 * (np.maximum(rho, 2 * R) ** 2 - (2 * R) ** 2)

    return G


def sigma2_terms(law: GrainLaw2D) -> VarianceTerms:
    """(v1, v2, v3) for the boundary length measure."""
    lam = law.lam
    EH1 = law.boundary_mass_mean()
    v2 = (EH1 / lam) ** 2 * plane_integral_2d(law)
    if law.is_disk:
        r_nodes, r_w = law.radius.nodes(64)
        v1 = v3 = 0.0
        for r, w in zip(r_nodes, r_w):
            chord = lambda phi: 1.0 / float(law.radial_lambda(2 * r * math.sin(phi / 2)))
            v1 += w * 2 * math.pi * r * r * 2 * _quad(chord, 0.0, math.pi)
            inner = lambda rho: 2.0 / float(law.radial_lambda(rho)) * rho * 2 * math.acos(min(1.0, rho / (2 * r)))
            pts = [2 * a for a, _ in law.radius.atoms if 2 * a < 2 * r]
            v3 += w * 2 * math.pi * r * _quad(inner, 0.0, 2 * r, pts)
        return VarianceTerms(v1, v2, EH1 / lam * v3)
    v = law.vertices
    v1 = _polygon_boundary_pairs(law, v)
    v3 = EH1 / lam * _polygon_boundary_area(law, v, lambda y: 2.0 / y)
    return VarianceTerms(v1, v2, v3)


def _polygon_boundary_pairs(law: GrainLaw2D, v: np.ndarray, n: int = 48) -> float:
    """E int_{dS} int_{dS} 1 / lambda_{y - x} for polygons."""
    lam_fn = _lambda_fn(law)
    k = len(v)
    pts, wts = _edge_nodes(v, n)
    total = 0.0
    for a in range(k):
        for b in range(k):
            if a == b:
                L = float(np.linalg.norm(v[(a + 1) % k] - v[a]))
                e = (v[(a + 1) % k] - v[a]) / L
                f = lambda u: 2 * (L - u) / float(lam_fn(u * e))
                total += _quad(f, 0.0, L)
                continue
            d = pts[b][None, :, :] - pts[a][:, None, :]
            total += float(wts[a] @ (1.0 / lam_fn(d)) @ wts[b])
    return total


def _polygon_boundary_area(law: GrainLaw2D, v: np.ndarray, weight, n: int = 48) -> float:
    """E int_{dS} int_S weight(lambda_{y - x}) dy H1(dx) for polygons."""
    pts, wts = _edge_nodes(v, n)
    if _radial(law):
        G = _radial_G(law)
        # weight is 2 / lambda: G integrates 1 / lambda
        vals = np.array([[_polygon_polar_integral(v, p, G) for p in row] for row in pts])
        return float(np.sum(wts * 2 * vals))
    lam_fn = _lambda_fn(law)
    # fixed polygons: triangle fan quadrature of the direction-dependent integrand
    total = 0.0
    tri_pts, tri_w = _polygon_area_nodes(v, 24)
    for row, wr in zip(pts, wts):
        for p, w in zip(row, wr):
            total += w * float(tri_w @ weight(lam_fn(tri_pts - p)))
    return total


def _polygon_area_nodes(v: np.ndarray, n: int):
    """Collapsed-Gauss nodes over a convex polygon (fan from the centroid)."""
    g, w = np.polynomial.legendre.leggauss(n)
    s = (g + 1) / 2
    ws = w / 2
    c = v.mean(axis=0)
    out_p, out_w = [], []
    k = len(v)
    for m in range(k):
        a, b = v[m], v[(m + 1) % k]
        area2 = abs((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]))
        # (u, t) -> c + u (a - c) + u t (b - a), Jacobian u * area2
        U, T = np.meshgrid(s, s, indexing="ij")
        P = c + U[..., None] * (a - c) + (U * T)[..., None] * (b - a)
        W = np.outer(ws, ws) * U * area2
        out_p.append(P.reshape(-1, 2))
        out_w.append(W.ravel())
    return np.concatenate(out_p), np.concatenate(out_w)


def sigma2_sq(law: GrainLaw2D) -> float:
    return sigma2_terms(law).value


def _pair_integral_points(law: GrainLaw2D, pts: np.ndarray) -> float:
    lam_fn = _lambda_fn(law)
    d = pts[None, :, :] - pts[:, None, :]
    return float(np.sum(1.0 / lam_fn(d)))


def sigma0_terms(law, mark: MarkMeasure) -> VarianceTerms:
    """(v4, v5, v6) for the dead leaves random measure with the given mark."""
    mark.check(law)
    if law.dim == 1:
        return _mark_terms_1d(law, mark)
    lam_eff = mark.effective_lam(law)
    EM = mark.mean_mass(law)
    V = plane_integral_2d(law)
    if mark.kind == "boundary_surface":
        # same three integrals as the boundary length measure, written in the
        # generic notation: v4 = pair integral, v5 = plane term, v6 = cross term
        base = sigma2_terms(law)
        v5 = (EM / lam_eff) ** 2 * V
        return VarianceTerms(base.first, v5, base.third)
    if mark.kind in ("colour_lebesgue", "density"):
        m1, m2 = mark.level_moments
        return VarianceTerms(m2 * V, m1**2 * V, 2 * m1**2 * V)
    if mark.kind == "seeds":
        offs = np.array(mark.offsets, dtype=float)
        scale = 1 - mark.q
        lam_fn = _lambda_fn(law)
        d = offs[None, :, :] - offs[:, None, :]
        pair = float(np.sum(1.0 / (scale * lam_fn(d))))
        return VarianceTerms(mark.q * pair, (EM / lam_eff) ** 2 * V, 0.0)
    if mark.kind == "corner_counting":
        v = law.vertices
        v4 = _pair_integral_points(law, v)
        cross = 0.0
        if _radial(law):
            G = _radial_G(law)
            cross = sum(2 * _polygon_polar_integral(v, p, G) for p in v)
        else:
            lam_fn = _lambda_fn(law)
            tri_pts, tri_w = _polygon_area_nodes(v, 24)
            cross = sum(float(tri_w @ (2.0 / lam_fn(tri_pts - p))) for p in v)
        return VarianceTerms(v4, (EM / lam_eff) ** 2 * V, EM / lam_eff * cross)
    raise IncompatibleMark(mark.kind)


def sigma0_sq(law, mark: MarkMeasure) -> float:
    return sigma0_terms(law, mark).value


# ---------------------------------------------------------------------------
# branch points and cells


def beta3(law: GrainLaw2D) -> float:
    """Intensity of branch points."""
    lam = law.lam
    if law.rotation_invariant:
        return 2 * law.boundary_mass_mean() ** 2 / (math.pi * lam**2)
    if law.is_disk:
        r = law.radius.atoms[0][0]
        return 2 * math.pi * (2 * r) ** 2 / lam**2
    return 2 * minkowski_difference_area(law.vertices) / polygon_area(law.vertices) ** 2


def beta1(law: GrainLaw2D) -> float:
    """Intensity of cells; needs Jordan leaves with the non-containment property."""
    if not (law.jordan and law.non_containment):
        raise ValueError("cell intensity needs Jordan leaves with the non-containment property")
    return beta3(law) / 2


# ---------------------------------------------------------------------------
# interval laws


@dataclass(frozen=True)
class MixedLaw:
    """Law with a density part and atoms."""

    density: object
    atoms: tuple
    upper: float
    breaks: tuple = ()

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    @property
    def continuous_mass(self) -> float:
        return _quad(lambda x: float(self.density(x)), 0.0, self.upper, self.breaks)

    def continuous_cdf(self, x) -> np.ndarray:
        """Conditional CDF of the density part (tabulated, then interpolated)."""
        grid, cdf = self._cdf_table()
        return np.interp(np.asarray(x, dtype=float), grid, cdf, left=0.0, right=1.0)

    def _cdf_table(self, n: int = 4001):
        key = "_table"
        if key in self.__dict__:
            return self.__dict__[key]
        top = self.upper if math.isfinite(self.upper) else 60.0
        knots = sorted({0.0, top, *[b for b in self.breaks if 0 < b < top]})
        grid = np.unique(np.concatenate([np.linspace(a, b, n) for a, b in zip(knots[:-1], knots[1:])]))
        # density may jump at knots: integrate each cell with Gauss nodes strictly inside
        g, w = np.polynomial.legendre.leggauss(8)
        a, b = grid[:-1], grid[1:]
        x = (a[:, None] + b[:, None]) / 2 + (b - a)[:, None] / 2 * g[None, :]
        cell = (b - a) / 2 * (self.density(x) @ w)
        cdf = np.concatenate([[0.0], np.cumsum(cell)])
        cdf /= cdf[-1]
        object.__setattr__(self, key, (grid, cdf))
        return grid, cdf

    @property
    def mean(self) -> float:
        cont = _quad(lambda x: x * float(self.density(x)), 0.0, self.upper, self.breaks)
        return cont + sum(a * m for a, m in self.atoms)


def _pdf(H, x) -> np.ndarray:
    """Density of the continuous part of the length law (zero if purely atomic)."""
    f = H.pdf(x)
    return np.zeros_like(x) if f is None else np.asarray(f, dtype=float)


def exposed_interval_law(law: GrainLaw1D) -> MixedLaw:
    """Law of the length of the cell containing the origin."""
    H = _interval_law(law)
    lam = law.lam

    def dens(x):
        x = np.asarray(x, dtype=float)
        tail = lam * H.sf(x) + H.tail_mean(x)
        return 2 * x / (lam + x) ** 3 * tail + x * _pdf(H, x) / (x + lam)

    atoms = tuple((a, a * w / (a + lam)) for a, w in H.atoms if a > 0)
    return MixedLaw(dens, atoms, H.upper, tuple(_breaks(H)))


def typical_interval_law(law: GrainLaw1D) -> MixedLaw:
    """Law of the length of a typical cell."""
    H = _interval_law(law)
    lam = law.lam

    def dens(y):
        y = np.asarray(y, dtype=float)
        tail = lam * H.sf(y) + H.tail_mean(y)
        return lam / (lam + y) ** 3 * tail + lam * _pdf(H, y) / (2 * (y + lam))

    atoms = tuple((a, lam * w / (2 * (a + lam))) for a, w in H.atoms if a > 0)
    return MixedLaw(dens, atoms, H.upper, tuple(_breaks(H)))


def vacancy(law: GrainLaw1D, h: float) -> float:
    """P[no cell endpoint in [0, h]]."""
    H = _interval_law(law)
    return float(H.excess(h)) / (law.lam + h)


# ---------------------------------------------------------------------------
# covariance kernels


@dataclass(frozen=True)
class Kernel:
    kind: str
    sigma_sq: float
    lam: float

    def __call__(self, a, t: float, b, u: float) -> float:
        decay = math.exp(-self.lam * abs(u - t))
        if self.kind == "k1":
            return self.sigma_sq * min(float(a), float(b)) * decay
        fa = a if isinstance(a, TestFunction) else None
        fb = b if isinstance(b, TestFunction) else None
        inner = fa.inner(fb) if fa is not None and fb is not None else float(a) * float(b)
        return self.sigma_sq * inner * decay

    def matrix(self, args, times) -> np.ndarray:
        n = len(args)
        return np.array([[self(args[i], times[i], args[j], times[j]) for j in range(n)] for i in range(n)])


def kernel(kind: str, law, mark: MarkMeasure | None = None) -> Kernel:
    if kind == "k1":
        return Kernel("k1", sigma1_sq(law), law.lam)
    if kind == "k2":
        return Kernel("k2", sigma2_sq(law), law.lam)
    if kind == "k0":
        if mark is None:
            raise ValueError("k0 needs a mark measure")
        return Kernel("k0", sigma0_sq(law, mark), mark.effective_lam(law))
    raise ValueError(f"unknown kernel {kind!r}")


def targets() -> list[dict]:
    """Named closed-form targets with their values, for listing."""
    one = GrainLaw1D.fixed_length(1.0)
    disk = GrainLaw2D.disk(1.0)
    rot = GrainLaw2D.square(1.0)
    fixed = GrainLaw2D.square(1.0, random_rotation=False)
    X = exposed_interval_law(one)
    Y = typical_interval_law(one)
    return [
        {"name": "intensity_1d", "case": "fixed_length(1)", "value": intensity_1d(one), "formula": "E[H0(dS)] / lambda"},
        {"name": "pcf_1d", "case": "fixed_length(1), z=0.5", "value": float(pcf_1d(one, 0.5)), "formula": "lambda(1+F)/lambda_z + lambda^2 f/(4 lambda_z)"},
        {"name": "pair_rate_atom", "case": "fixed_length(1), z=1", "value": pair_rate_at_atom(one, 1.0), "formula": "1/(2 lambda)"},
        {"name": "sigma1_sq", "case": "fixed_length(1)", "value": sigma1_sq(one), "formula": "8 log 2 - 5"},
        {"name": "exposed_atom", "case": "fixed_length(1)", "value": X.atom_mass, "formula": "x nu{x}/(x + lambda)"},
        {"name": "exposed_mean", "case": "fixed_length(1)", "value": X.mean, "formula": "4 log 2 - 2"},
        {"name": "typical_atom", "case": "fixed_length(1)", "value": Y.atom_mass, "formula": "lambda nu{y}/(2(y + lambda))"},
        {"name": "vacancy", "case": "fixed_length(1), h=0.5", "value": vacancy(one, 0.5), "formula": "K(h)/(lambda + h)"},
        {"name": "intensity_2d", "case": "unit disks", "value": intensity_2d(disk), "formula": "E[H1(dS)] / lambda"},
        {"name": "beta3", "case": "unit disks", "value": beta3(disk), "formula": "2 (E H1(dS))^2 / (pi lambda^2)"},
        {"name": "beta1", "case": "rotated unit squares", "value": beta1(rot), "formula": "beta3 / 2"},
        {"name": "beta1", "case": "fixed unit square", "value": beta1(fixed), "formula": "H2(S + (-S)) / H2(S)^2"},
        {"name": "sigma2_sq", "case": "unit disks", "value": sigma2_sq(disk), "formula": "v1 + v2 - v3"},
        {"name": "alpha", "case": "colour p=0.3, unit disks", "value": alpha(disk, MarkMeasure.colour(0.3)), "formula": "E|M| / lambda"},
    ]
