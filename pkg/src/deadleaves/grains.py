"""Leaf shape distributions and the analytic grain quantities built on them.

A 1D leaf is a finite union of intervals anchored at the origin, a 2D leaf is
a disk centred at the origin or a convex polygon given about its centroid.
The arrival position of a leaf supplies the translation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

log = logging.getLogger(__name__)

TRUNCATION_LEVEL = 1e-9
N_ROTATIONS = 256
MAX_COMPONENTS = 8


# ---------------------------------------------------------------------------
# length laws


class LengthLaw:
    """Law of a nonnegative random length H."""

    name = "abstract"

    # subclasses define: mean, second_moment, upper, lower
    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def pdf(self, x):
        """Density of the absolutely continuous part, or None if there is none."""
        return None

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return []

    def min_mean(self, u):
        """E[min(u, H)] for u >= 0."""
        raise NotImplementedError

    def excess(self, h):
        """K(h) = E[(H - h)^+]."""
        return self.mean - self.min_mean(h)

    def tail_mean(self, x):
        """E[H 1{H > x}]."""
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def nodes(self, n: int = 64) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and weights for expectations E[g(H)]."""
        raise NotImplementedError

    def sim_upper(self) -> float:
        """Largest length the simulators will ever produce."""
        return self.upper

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.to_dict().items() if k != "law")
        return f"{type(self).__name__}({args})"


class Dirac(LengthLaw):
    name = "dirac"

    def __init__(self, value: float):
        if not value >= 0 or not math.isfinite(value):
            raise ValueError(f"length must be finite and >= 0, got {value}")
        self.value = float(value)
        self.mean = self.value
        self.second_moment = self.value**2
        self.upper = self.value
        self.lower = self.value

    def cdf(self, x):
        return np.where(np.asarray(x) >= self.value, 1.0, 0.0)

    @property
    def atoms(self):
        return [(self.value, 1.0)]

    def min_mean(self, u):
        return np.minimum(u, self.value)

    def tail_mean(self, x):
        return np.where(np.asarray(x) < self.value, self.value, 0.0)

    def quantile(self, p):
        return np.full_like(np.asarray(p, dtype=float), self.value)

    def sample(self, rng, size):
        return np.full(size, self.value)

    def nodes(self, n=64):
        return np.array([self.value]), np.array([1.0])

    def to_dict(self):
        return {"law": "dirac", "value": self.value}


class Uniform(LengthLaw):
    name = "uniform"

    def __init__(self, low: float, high: float):
        if not (0 <= low < high < math.inf):
            raise ValueError(f"need 0 <= low < high < inf, got {low}, {high}")
        self.low, self.high = float(low), float(high)
        self.mean = 0.5 * (low + high)
        self.second_moment = (high**3 - low**3) / (3 * (high - low))
        self.upper = self.high
        self.lower = self.low

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.low) / (self.high - self.low), 0.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x > self.low) & (x < self.high), 1.0 / (self.high - self.low), 0.0)

    def min_mean(self, u):
        # integral of the survival function over [0, u]
        u = np.asarray(u, dtype=float)
        a, b = self.low, self.high
        v = np.clip(u, a, b)
        mid = a + (v - a) - 0.5 * (v - a) ** 2 / (b - a)
        return np.where(u <= a, u, np.where(u >= b, self.mean, mid))

    def tail_mean(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.low, self.high
        v = np.clip(x, a, b)
        return (b**2 - v**2) / (2 * (b - a))

    def quantile(self, p):
        return self.low + np.asarray(p, dtype=float) * (self.high - self.low)

    def sample(self, rng, size):
        return rng.uniform(self.low, self.high, size)

    def nodes(self, n=64):
        x, w = np.polynomial.legendre.leggauss(n)
        return self.low + 0.5 * (x + 1) * (self.high - self.low), 0.5 * w

    def to_dict(self):
        return {"law": "uniform", "low": self.low, "high": self.high}


class Exponential(LengthLaw):
    """Exponential lengths; simulators truncate at the (1 - 1e-9) quantile."""

    name = "exponential"

    def __init__(self, mean: float):
        if not (0 < mean < math.inf):
            raise ValueError(f"mean must be positive and finite, got {mean}")
        self.scale = float(mean)
        self.mean = self.scale
        self.second_moment = 2 * self.scale**2
        self.upper = math.inf
        self.lower = 0.0
        self._cut = float(self.quantile(1 - TRUNCATION_LEVEL))

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-x / self.scale)

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return np.exp(-x / self.scale)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, np.exp(-x / self.scale) / self.scale, 0.0)

    def min_mean(self, u):
        return self.scale * -np.expm1(-np.maximum(u, 0.0) / self.scale)

    def excess(self, h):
        return self.scale * np.exp(-np.maximum(h, 0.0) / self.scale)

    def tail_mean(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return (x + self.scale) * np.exp(-x / self.scale)

    def quantile(self, p):
        return -self.scale * np.log1p(-np.asarray(p, dtype=float))

    def sample(self, rng, size):
        u = rng.random(size) * (1 - TRUNCATION_LEVEL)
        return self.quantile(u)

    def sim_upper(self):
        return self._cut

    def nodes(self, n=64):
        x, w = special.roots_laguerre(n)
        return self.scale * x, w

    def to_dict(self):
        return {"law": "exponential", "mean": self.scale}


def length_law_from_dict(d: dict) -> LengthLaw:
    kind = d.get("law")
    if kind == "dirac":
        return Dirac(d["value"])
    if kind == "uniform":
        return Uniform(d["low"], d["high"])
    if kind == "exponential":
        return Exponential(d["mean"])
    raise ValueError(f"unknown length law {kind!r}")


# ---------------------------------------------------------------------------
# 1D grain laws


@dataclass(frozen=True)
class GrainLaw1D:
    """A 1D leaf: components [offset_k, offset_k + H_k] with independent H_k.

    Offsets are fixed; components must stay disjoint for every admissible
    length, which is checked at construction.
    """

    components: tuple[tuple[float, LengthLaw], ...]
    kind: str = "length_law"

    def __post_init__(self):
        comps = self.components
        if not 1 <= len(comps) <= MAX_COMPONENTS:
            raise ValueError(f"need 1..{MAX_COMPONENTS} components, got {len(comps)}")
        if comps[0][0] != 0.0:
            raise ValueError("first component must be anchored at 0")
        for (o1, l1), (o2, _) in zip(comps, comps[1:]):
            if not o2 > o1 + l1.sim_upper():
                raise ValueError("components must be disjoint and sorted by offset")
        if not self.lam > 0:
            raise ValueError("mean leaf length must be positive")

    # constructors
    @classmethod
    def fixed_length(cls, length: float) -> "GrainLaw1D":
        if not length > 0:
            raise ValueError("fixed length must be > 0")
        return cls(((0.0, Dirac(length)),), kind="fixed_length")

    @classmethod
    def length_law(cls, law: LengthLaw) -> "GrainLaw1D":
        return cls(((0.0, law),), kind="length_law")

    @classmethod
    def multi_component(cls, comps: Sequence[tuple[float, LengthLaw]]) -> "GrainLaw1D":
        return cls(tuple((float(o), l) for o, l in comps), kind="multi_component")

    # basic quantities
    @property
    def dim(self) -> int:
        return 1

    @property
    def lam(self) -> float:
        return float(sum(l.mean for _, l in self.components))

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def n_zero_length(self) -> int:
        return sum(1 for _, l in self.components if isinstance(l, Dirac) and l.value == 0)

    @property
    def is_interval(self) -> bool:
        """Single component with F(0) = 0."""
        if len(self.components) != 1:
            return False
        law = self.components[0][1]
        return float(law.cdf(0.0)) == 0.0

    @property
    def single(self) -> LengthLaw:
        if len(self.components) != 1:
            raise ValueError("law has several components")
        return self.components[0][1]

    def boundary_mass_mean(self) -> float:
        return float(2 * self.n_components - self.n_zero_length)

    def boundary_mass_second_moment(self) -> float:
        return self.boundary_mass_mean() ** 2

    @property
    def radius_bound(self) -> float:
        o, l = self.components[-1]
        return o + l.upper

    @property
    def sim_radius_bound(self) -> float:
        o, l = self.components[-1]
        if not math.isfinite(l.upper):
            log.warning("unbounded length law truncated at its 1-%g quantile", TRUNCATION_LEVEL)
        return o + l.sim_upper()

    def covariogram(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        if len(self.components) == 1:
            law = self.single
            return law.mean - law.min_mean(x)
        total = np.zeros_like(x)
        for k, (ok, lk) in enumerate(self.components):
            for m, (om, lm) in enumerate(self.components):
                if k == m:
                    total = total + lk.mean - lk.min_mean(x)
                    continue
                ak, wk = lk.nodes()
                am, wm = lm.nodes()
                # E |[ok, ok+Hk] cap [om + x, om + x + Hm]|
                a = ak[:, None, None]
                b = am[None, :, None]
                xs = np.atleast_1d(x).ravel()[None, None, :]
                lo = np.maximum(ok, om + xs)
                hi = np.minimum(ok + a, om + xs + b)
                ov = np.maximum(hi - lo, 0.0)
                total = total + np.einsum("i,j,ijk->k", wk, wm, ov.reshape(len(ak), len(am), -1)).reshape(x.shape)
        return total

    def lambda_x(self, x):
        x = np.asarray(x, dtype=float)
        if len(self.components) == 1:
            return self.lam + self.single.min_mean(np.abs(x))
        return 2 * self.lam - self.covariogram(x)

    def sample_lengths(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Component lengths, shape (size, n_components)."""
        out = np.empty((size, self.n_components))
        for k, (_, law) in enumerate(self.components):
            out[:, k] = law.sample(rng, size)
        return out

    @property
    def offsets(self) -> np.ndarray:
        return np.array([o for o, _ in self.components])

    def to_dict(self) -> dict:
        if self.kind == "fixed_length":
            return {"kind": "fixed_length", "length": self.single.value}
        if self.kind == "length_law":
            return {"kind": "length_law", "length": self.single.to_dict()}
        return {
            "kind": "multi_component",
            "components": [{"offset": o, "length": l.to_dict()} for o, l in self.components],
        }


# ---------------------------------------------------------------------------
# 2D grain laws


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    @property
    def area(self):
        return math.pi * self.radius**2

    @property
    def perimeter(self):
        return 2 * math.pi * self.radius


@dataclass(frozen=True)
class Polygon:
    vertices: np.ndarray = field(repr=False)

    @property
    def area(self):
        return polygon_area(self.vertices)

    @property
    def perimeter(self):
        return polygon_perimeter(self.vertices)


def polygon_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_perimeter(v: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())


def polygon_centroid(v: np.ndarray) -> np.ndarray:
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    c = x * yn - xn * y
    a = 0.5 * c.sum()
    return np.array([((x + xn) * c).sum(), ((y + yn) * c).sum()]) / (6 * a)


def check_convex_ccw(v: np.ndarray) -> None:
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise ValueError("polygon needs an (k, 2) vertex array with k >= 3")
    e = np.roll(v, -1, axis=0) - v
    cr = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
    if polygon_area(v) <= 0:
        raise ValueError("polygon vertices must be listed counter-clockwise with positive area")
    if np.any(cr <= 1e-12 * np.abs(e).max() ** 2):
        raise ValueError("polygon must be strictly convex")


def rotate(v: np.ndarray, theta) -> np.ndarray:
    """Rotate points v (..., 2) by angles theta (broadcast over leading axes)."""
    c, s = np.cos(theta), np.sin(theta)
    x, y = v[..., 0], v[..., 1]
    return np.stack([c * x - s * y, s * x + c * y], axis=-1)


def lens_area(r, d):
    """Area of the intersection of two disks of equal radius r at distance d."""
    r = np.asarray(r, dtype=float)
    d = np.abs(np.asarray(d, dtype=float))
    q = np.clip(d / (2 * r), 0.0, 1.0)
    return 2 * r**2 * np.arccos(q) - 0.5 * d * np.sqrt(np.maximum(4 * r**2 - d**2, 0.0))


def convex_clip_area(p: np.ndarray, q: np.ndarray) -> float:
    """Area of the intersection of two convex CCW polygons (Sutherland-Hodgman)."""
    out = [tuple(pt) for pt in p]
    m = len(q)
    for k in range(m):
        if not out:
            return 0.0
        a, b = q[k], q[(k + 1) % m]
        ex, ey = b[0] - a[0], b[1] - a[1]
        inp, out = out, []
        side = [ex * (pt[1] - a[1]) - ey * (pt[0] - a[0]) for pt in inp]
        for i in range(len(inp)):
            cur, prv = inp[i], inp[i - 1]
            sc, sp = side[i], side[i - 1]
            if sc >= 0:
                if sp < 0:
                    t = sp / (sp - sc)
                    out.append((prv[0] + t * (cur[0] - prv[0]), prv[1] + t * (cur[1] - prv[1])))
                out.append(cur)
            elif sp >= 0:
                t = sp / (sp - sc)
                out.append((prv[0] + t * (cur[0] - prv[0]), prv[1] + t * (cur[1] - prv[1])))
    if len(out) < 3:
        return 0.0
    return max(polygon_area(np.array(out)), 0.0)


def translate_overlap_areas(v: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """H2(P cap (P + s)) for every shift s (vectorised through shapely)."""
    import shapely

    shifts = np.asarray(shifts, dtype=float).reshape(-1, 2)
    base = shapely.Polygon(v)
    moved = shapely.polygons(v[None, :, :] + shifts[:, None, :])
    return shapely.area(shapely.intersection(moved, base))


def minkowski_difference_area(v: np.ndarray) -> float:
    """H2(S + (-S)) for a convex polygon S."""
    from scipy.spatial import ConvexHull

    pts = (v[:, None, :] - v[None, :, :]).reshape(-1, 2)
    return float(ConvexHull(pts).volume)


@dataclass(frozen=True, eq=False)
class GrainLaw2D:
    """Disk or convex-polygon leaves.

    kind is "disk" (radius law), "convex_polygon" (vertices about the centroid,
    with or without uniform random rotation) or "fixed_set" (a deterministic
    disk or polygon).
    """

    kind: str
    radius: LengthLaw | None = None
    vertices: np.ndarray | None = field(default=None, repr=False)
    random_rotation: bool = False

    def __post_init__(self):
        if self.kind not in ("disk", "convex_polygon", "fixed_set"):
            raise ValueError(f"unsupported 2D grain kind {self.kind!r}")
        if self.is_disk:
            if self.radius is None or not self.radius.mean > 0:
                raise ValueError("disk law needs a radius law with positive mean")
            if self.kind == "fixed_set" and not isinstance(self.radius, Dirac):
                raise ValueError("fixed_set disks need a fixed radius")
        else:
            v = np.asarray(self.vertices, dtype=float)
            check_convex_ccw(v)
            v = v - polygon_centroid(v)
            object.__setattr__(self, "vertices", v)
            if self.kind == "fixed_set" and self.random_rotation:
                raise ValueError("fixed_set cannot carry a random rotation")
        object.__setattr__(self, "_cache", {})

    # constructors
    @classmethod
    def disk(cls, radius: float | LengthLaw = 1.0) -> "GrainLaw2D":
        r = radius if isinstance(radius, LengthLaw) else Dirac(radius)
        return cls("disk", radius=r)

    @classmethod
    def polygon(cls, vertices, random_rotation: bool = True) -> "GrainLaw2D":
        return cls("convex_polygon", vertices=np.asarray(vertices, dtype=float), random_rotation=random_rotation)

    @classmethod
    def fixed_polygon(cls, vertices) -> "GrainLaw2D":
        return cls("fixed_set", vertices=np.asarray(vertices, dtype=float))

    @classmethod
    def fixed_disk(cls, radius: float) -> "GrainLaw2D":
        return cls("fixed_set", radius=Dirac(radius))

    @classmethod
    def square(cls, side: float = 1.0, random_rotation: bool = True) -> "GrainLaw2D":
        h = side / 2
        v = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
        if random_rotation:
            return cls.polygon(v, True)
        return cls.fixed_polygon(v)

    # metadata
    @property
    def dim(self) -> int:
        return 2

    @property
    def is_disk(self) -> bool:
        return self.radius is not None and self.vertices is None

    @property
    def n_vertices(self) -> int:
        return 0 if self.is_disk else len(self.vertices)

    @property
    def rotation_invariant(self) -> bool:
        return self.is_disk or self.random_rotation

    @property
    def jordan(self) -> bool:
        return True

    @property
    def non_containment(self) -> bool:
        """Every leaf has the same area, so no translate fits strictly inside another."""
        return (not self.is_disk) or isinstance(self.radius, Dirac)

    # grain quantities
    @property
    def lam(self) -> float:
        if self.is_disk:
            return math.pi * self.radius.second_moment
        return polygon_area(self.vertices)

    def boundary_mass_mean(self) -> float:
        if self.is_disk:
            return 2 * math.pi * self.radius.mean
        return polygon_perimeter(self.vertices)

    def boundary_mass_second_moment(self) -> float:
        if self.is_disk:
            return 4 * math.pi**2 * self.radius.second_moment
        return polygon_perimeter(self.vertices) ** 2

    @property
    def radius_bound(self) -> float:
        if self.is_disk:
            return self.radius.upper
        return float(np.linalg.norm(self.vertices, axis=1).max())

    @property
    def sim_radius_bound(self) -> float:
        if self.is_disk:
            if not math.isfinite(self.radius.upper):
                log.warning("unbounded radius law truncated at its 1-%g quantile", TRUNCATION_LEVEL)
            return self.radius.sim_upper()
        return self.radius_bound

    @property
    def inradius_bound(self) -> float:
        """Largest inscribed radius any leaf can have."""
        if self.is_disk:
            return self.radius.sim_upper()
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        n = np.stack([e[:, 1], -e[:, 0]], axis=1) / np.linalg.norm(e, axis=1)[:, None]
        return float(np.min(np.einsum("ij,ij->i", n, v)))

    def covariogram(self, x) -> np.ndarray:
        """E[H2(S cap (S + x))] for displacements x of shape (..., 2)."""
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(x, axis=-1)
        if self.is_disk:
            return self.radial_covariogram(d)
        if self.random_rotation:
            return self.radial_covariogram(d)
        out = translate_overlap_areas(self.vertices, x.reshape(-1, 2))
        return out.reshape(x.shape[:-1])

    def radial_covariogram(self, d) -> np.ndarray:
        """Covariogram as a function of |x|, for rotation-invariant laws."""
        d = np.abs(np.asarray(d, dtype=float))
        if self.is_disk:
            r, w = self.radius.nodes()
            return np.tensordot(w, lens_area(r[:, None], d.reshape(1, -1)), axes=1).reshape(d.shape)
        if not self.random_rotation:
            raise ValueError("law is not rotation invariant")
        return self._rotated_table()(d)

    def _rotated_table(self):
        """Rotation-averaged polygon covariogram, tabulated on a fine radial grid."""
        if "table" in self._cache:
            return self._cache["table"]
        from scipy.interpolate import PchipInterpolator

        v = self.vertices
        R = self.radius_bound
        theta = -math.pi + 2 * math.pi * (np.arange(N_ROTATIONS) + 0.5) / N_ROTATIONS
        grid = np.linspace(0.0, 2 * R, 401)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        shifts = grid[:, None, None] * dirs[None, :, :]
        vals = translate_overlap_areas(v, shifts).reshape(len(grid), N_ROTATIONS).mean(axis=1)
        interp = PchipInterpolator(grid, vals, extrapolate=False)

        def table(d):
            d = np.asarray(d, dtype=float)
            out = interp(np.minimum(d, 2 * R))
            return np.where(d >= 2 * R, 0.0, np.nan_to_num(out))

        self._cache["table"] = table
        return table

    def lambda_x(self, x) -> np.ndarray:
        return 2 * self.lam - self.covariogram(x)

    def radial_lambda(self, d) -> np.ndarray:
        return 2 * self.lam - self.radial_covariogram(d)

    def sample_params(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Radii for disks, rotation angles for polygons (zeros when fixed)."""
        if self.is_disk:
            return self.radius.sample(rng, size)
        if self.random_rotation:
            # uniform on (-pi, pi]
            return math.pi - 2 * math.pi * rng.random(size)
        return np.zeros(size)

    def to_dict(self) -> dict:
        if self.is_disk:
            d = {"kind": self.kind, "radius": self.radius.to_dict()}
            return d
        return {
            "kind": self.kind,
            "vertices": self.vertices.tolist(),
            "random_rotation": self.random_rotation,
        }


def sample_shape(law, rng: np.random.Generator):
    """One leaf in canonical anchoring.

    1D: array of shape (k, 2) holding [start, end] per component.
    2D: a Disk or Polygon instance.
    """
    if isinstance(law, GrainLaw1D):
        lengths = law.sample_lengths(rng, 1)[0]
        starts = law.offsets
        return np.stack([starts, starts + lengths], axis=1)
    if law.is_disk:
        return Disk((0.0, 0.0), float(law.sample_params(rng, 1)[0]))
    theta = law.sample_params(rng, 1)[0]
    return Polygon(rotate(law.vertices, theta))


def lambda_x(law, x):
    return law.lambda_x(x)


def boundary_mass_mean(law) -> float:
    return law.boundary_mass_mean()


def law_from_dict(d: dict):
    """Build a grain law from its JSON description."""
    kind = d.get("kind")
    if kind == "fixed_length":
        return GrainLaw1D.fixed_length(float(d["length"]))
    if kind == "length_law":
        return GrainLaw1D.length_law(length_law_from_dict(d["length"]))
    if kind == "multi_component":
        return GrainLaw1D.multi_component(
            [(c["offset"], length_law_from_dict(c["length"])) for c in d["components"]]
        )
    if kind == "disk":
        r = d["radius"]
        return GrainLaw2D.disk(length_law_from_dict(r) if isinstance(r, dict) else float(r))
    if kind == "convex_polygon":
        return GrainLaw2D.polygon(d["vertices"], bool(d.get("random_rotation", True)))
    if kind == "square":
        return GrainLaw2D.square(float(d.get("side", 1.0)), bool(d.get("random_rotation", True)))
    if kind == "fixed_set":
        if "vertices" in d:
            return GrainLaw2D.fixed_polygon(d["vertices"])
        r = d["radius"]
        return GrainLaw2D.fixed_disk(float(r["value"] if isinstance(r, dict) else r))
    raise ValueError(f"unknown grain kind {kind!r}")
