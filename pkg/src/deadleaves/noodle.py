"""Crossings of polygonal curves, and Monte Carlo checks of the two-noodle
formula and of Buffon's noodle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stats import EstimateReport

TOUCH_TOL = 1e-12


class DegenerateCurve(ValueError):
    pass


@dataclass(frozen=True)
class Polyline:
    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) < 2:
            raise DegenerateCurve("a polyline needs at least two vertices")
        object.__setattr__(self, "vertices", v)
        if not self.length > 0:
            raise DegenerateCurve("polyline has zero length")

    @property
    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    @property
    def length(self) -> float:
        p, q = self.segments
        return float(np.linalg.norm(q - p, axis=1).sum())

    @property
    def centre(self) -> np.ndarray:
        v = self.vertices
        return (v.min(axis=0) + v.max(axis=0)) / 2

    def circumradius(self, about=None) -> float:
        c = self.centre if about is None else np.asarray(about, dtype=float)
        return float(np.linalg.norm(self.vertices - c, axis=1).max())

    def moved(self, theta: float = 0.0, shift=(0.0, 0.0)) -> "Polyline":
        """Rotation by theta about the origin followed by a translation."""
        c, s = math.cos(theta), math.sin(theta)
        v = self.vertices @ np.array([[c, s], [-s, c]]) + np.asarray(shift, dtype=float)
        return Polyline(v, self.closed)

    def scaled(self, k: float) -> "Polyline":
        return Polyline(self.vertices * k, self.closed)

    # common curves
    @classmethod
    def segment(cls, p, q) -> "Polyline":
        return cls(np.array([p, q], dtype=float))

    @classmethod
    def unit_segment(cls) -> "Polyline":
        return cls.segment((-0.5, 0.0), (0.5, 0.0))

    @classmethod
    def square(cls, perimeter: float = 1.0) -> "Polyline":
        h = perimeter / 8
        return cls(np.array([[-h, -h], [h, -h], [h, h], [-h, h]]), closed=True)

    @classmethod
    def arc(cls, length: float, angle: float, segments: int = 256) -> "Polyline":
        """Circular arc of the given length spanning the given angle, as a polyline
        rescaled so that its length equals the arc length."""
        r = length / angle
        t = np.linspace(-angle / 2, angle / 2, segments + 1)
        v = np.stack([r * np.sin(t), r * (1 - np.cos(t))], axis=1)
        poly = cls(v)
        return poly.scaled(length / poly.length)

    @classmethod
    def semicircle(cls, length: float = 1.0, segments: int = 256) -> "Polyline":
        return cls.arc(length, math.pi, segments)


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _pair_counts(p0, p1, q0, q1, tol: float = TOUCH_TOL):
    """Crossing and touch indicators for broadcast segment pairs p0p1, q0q1."""
    d1 = _orient(q0[..., 0], q0[..., 1], q1[..., 0], q1[..., 1], p0[..., 0], p0[..., 1])
    d2 = _orient(q0[..., 0], q0[..., 1], q1[..., 0], q1[..., 1], p1[..., 0], p1[..., 1])
    d3 = _orient(p0[..., 0], p0[..., 1], p1[..., 0], p1[..., 1], q0[..., 0], q0[..., 1])
    d4 = _orient(p0[..., 0], p0[..., 1], p1[..., 0], p1[..., 1], q1[..., 0], q1[..., 1])
    # scale-aware tolerance on the orientation determinants
    lp = np.hypot(p1[..., 0] - p0[..., 0], p1[..., 1] - p0[..., 1])
    lq = np.hypot(q1[..., 0] - q0[..., 0], q1[..., 1] - q0[..., 1])
    eq = tol * lq
    ep = tol * lp
    cross = (((d1 > eq) & (d2 < -eq)) | ((d1 < -eq) & (d2 > eq))) & (((d3 > ep) & (d4 < -ep)) | ((d3 < -ep) & (d4 > ep)))
    # touching: an endpoint within tol of the other segment, while the boxes meet
    near = (np.abs(d1) <= eq) | (np.abs(d2) <= eq) | (np.abs(d3) <= ep) | (np.abs(d4) <= ep)
    boxes = (
        (np.minimum(p0[..., 0], p1[..., 0]) <= np.maximum(q0[..., 0], q1[..., 0]) + tol)
        & (np.minimum(q0[..., 0], q1[..., 0]) <= np.maximum(p0[..., 0], p1[..., 0]) + tol)
        & (np.minimum(p0[..., 1], p1[..., 1]) <= np.maximum(q0[..., 1], q1[..., 1]) + tol)
        & (np.minimum(q0[..., 1], q1[..., 1]) <= np.maximum(p0[..., 1], p1[..., 1]) + tol)
    )
    straddle = ((d1 <= eq) & (d2 >= -eq) | (d1 >= -eq) & (d2 <= eq)) & ((d3 <= ep) & (d4 >= -ep) | (d3 >= -ep) & (d4 <= ep))
    touch = near & boxes & straddle & ~cross
    return cross, touch


def intersections(a: Polyline, b: Polyline, tol: float = TOUCH_TOL) -> tuple[int, int]:
    """(transversal crossings, touching configurations) between two polylines."""
    p0, p1 = a.segments
    q0, q1 = b.segments
    cross, touch = _pair_counts(p0[:, None], p1[:, None], q0[None], q1[None], tol)
    return int(cross.sum()), int(touch.sum())


def crossings(a: Polyline, b: Polyline) -> int:
    return intersections(a, b)[0]


def _chunks(total: int, size: int):
    for start in range(0, total, size):
        yield min(size, total - start)


def poincare_mc(a: Polyline, b: Polyline, samples: int, rng: np.random.Generator, chunk: int = 100_000,
                with_touches: bool = False):
    """Kinematic integral of crossings(a, rigid motion of b), estimated by
    uniform rotations and translations on a box that contains every useful
    translation.  Target 4 len(a) len(b)."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    c = b.centre
    bb = Polyline(b.vertices - c, b.closed)
    r = bb.circumradius(about=(0.0, 0.0)) + 1e-6
    lo = a.vertices.min(axis=0) - r
    hi = a.vertices.max(axis=0) + r
    area = float(np.prod(hi - lo))
    p0, p1 = a.segments
    q0, q1 = bb.segments
    counts = np.empty(samples)
    touches = 0
    done = 0
    for m in _chunks(samples, max(1, chunk // max(1, len(p0) * len(q0)))):
        theta = math.pi - 2 * math.pi * rng.random(m)
        x = lo + (hi - lo) * rng.random((m, 2))
        cs, sn = np.cos(theta)[:, None], np.sin(theta)[:, None]

        def move(q):
            return np.stack([cs * q[None, :, 0] - sn * q[None, :, 1], sn * q[None, :, 0] + cs * q[None, :, 1]], axis=-1) + x[:, None, :]

        Q0, Q1 = move(q0), move(q1)  # (m, nb, 2)
        cross, touch = _pair_counts(p0[None, :, None], p1[None, :, None], Q0[:, None], Q1[:, None])
        counts[done : done + m] = cross.sum(axis=(1, 2))
        touches += int(touch.sum())
        done += m
    scale = 2 * math.pi * area
    rep = EstimateReport("poincare", scale * counts.mean(), scale * counts.std(ddof=1) / math.sqrt(samples), samples,
                         4 * a.length * b.length)
    return (rep, touches) if with_touches else rep


def buffon_noodle_mc(a: Polyline, line_spacing: float, samples: int, rng: np.random.Generator,
                     chunk: int = 200_000) -> EstimateReport:
    """Mean number of crossings of a randomly placed curve with the lines
    y = k * spacing.  Target 2 len(a) / (pi * spacing)."""
    if not line_spacing > 0:
        raise ValueError("line spacing must be positive")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    v = a.vertices - a.centre
    if a.closed:
        v = np.vstack([v, v[:1]])
    counts = np.empty(samples)
    done = 0
    for m in _chunks(samples, max(1, chunk // len(v))):
        y = line_spacing * rng.random(m)
        theta = math.pi - 2 * math.pi * rng.random(m)
        h = np.sin(theta)[:, None] * v[None, :, 0] + np.cos(theta)[:, None] * v[None, :, 1] + y[:, None]
        k = np.floor(h / line_spacing)
        counts[done : done + m] = np.abs(np.diff(k, axis=1)).sum(axis=1)
        done += m
    return EstimateReport("buffon", counts.mean(), counts.std(ddof=1) / math.sqrt(samples), samples,
                          2 * a.length / (math.pi * line_spacing))
