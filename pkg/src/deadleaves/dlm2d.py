"""Perfect simulation of the planar dead leaves tessellation.

For every leaf the part of its boundary not covered by earlier leaves (in
reversed time) and lying in the window is kept as a set of visible pieces.
Window coverage is detected exactly: the window is uncovered at time t iff
some vertex of the boundary arrangement of the uncovered set survives at t,
and each candidate vertex (branch point, window-edge crossing, window corner)
is alive during [birth, first covering arrival).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._planar import (
    LOOP,
    NONE,
    TOL,
    WINDOW,
    Leaves,
    complement_of_pieces,
    concat_intervals,
    locate,
    union_complement,
)
from .engine import ReversedStream, SimulationWindow, forward_stream
from .grains import GrainLaw2D

# height direction for critical-point counting; generic w.r.t. axis-aligned edges
HEIGHT_ANGLE = 0.3141592653589793 * 1.2345
UP = np.array([math.cos(HEIGHT_ANGLE), math.sin(HEIGHT_ANGLE)])
RASTER = 2048


class DepthExhausted(RuntimeError):
    """The hierarchical coverage grid cannot resolve the window."""


def as_box(window) -> tuple[float, float, float, float]:
    if isinstance(window, SimulationWindow):
        return (window.lo[0], window.lo[1], window.hi[0], window.hi[1])
    if np.isscalar(window):
        return (0.0, 0.0, float(window), float(window))
    box = tuple(float(v) for v in window)
    if len(box) != 4 or box[2] < box[0] or box[3] < box[1]:
        raise ValueError("box must be (x0, y0, x1, y1)")
    return box


def erode(box, margin: float):
    x0, y0, x1, y1 = box
    out = (x0 + margin, y0 + margin, x1 - margin, y1 - margin)
    if out[2] <= out[0] or out[3] <= out[1]:
        raise ValueError("erosion margin leaves an empty window")
    return out


def box_area(box) -> float:
    return (box[2] - box[0]) * (box[3] - box[1])


def in_box(pts, box, tol: float = 0.0) -> np.ndarray:
    x0, y0, x1, y1 = box
    return (pts[:, 0] >= x0 - tol) & (pts[:, 0] <= x1 + tol) & (pts[:, 1] >= y0 - tol) & (pts[:, 1] <= y1 + tol)


@dataclass(frozen=True)
class BoundaryArc:
    leaf_id: int
    kind: str  # "arc" or "segment"
    params: tuple  # arc: (cx, cy, r, theta0, theta1); segment: (x0, y0, x1, y1)
    length: float


@dataclass(frozen=True)
class Pieces:
    leaf: np.ndarray
    s0: np.ndarray
    s1: np.ndarray
    t0: np.ndarray
    t1: np.ndarray

    def __len__(self):
        return len(self.leaf)

    def astuple(self):
        return self.leaf, self.s0, self.s1, self.t0, self.t1


def visible_pieces(leaves: Leaves, box) -> Pieces:
    """Visible boundary pieces of all leaves, clipped to the box."""
    meets = leaves.meets_box(box)
    cov = leaves.covered_intervals(targets=meets)
    out = leaves.outside_intervals(box, np.flatnonzero(meets))
    ints = concat_intervals(cov, out)
    return Pieces(*union_complement(leaves.n, *ints, leaves.period, has_boundary=np.flatnonzero(meets)))


def clip_pieces(leaves: Leaves, pieces: Pieces, box) -> Pieces:
    """Restrict pieces to a sub-box, keeping endpoint provenance."""
    if len(pieces) == 0:
        return pieces
    gaps = complement_of_pieces(*pieces.astuple(), leaves.period)
    owners = np.unique(pieces.leaf)
    out = leaves.outside_intervals(box, owners)
    ints = concat_intervals(gaps, out)
    return Pieces(*union_complement(leaves.n, *ints, leaves.period, has_boundary=owners))


def _endpoints(leaves: Leaves, pieces: Pieces):
    """All piece endpoints: (points, owner leaf, tag, which end, piece index)."""
    idx = np.arange(len(pieces))
    leaf = np.concatenate([pieces.leaf, pieces.leaf])
    s = np.concatenate([pieces.s0, pieces.s1])
    tag = np.concatenate([pieces.t0, pieces.t1])
    end = np.concatenate([np.zeros(len(pieces), int), np.ones(len(pieces), int)])
    pidx = np.concatenate([idx, idx])
    keep = tag != LOOP
    pts = leaves.points(leaf[keep], s[keep]) if keep.any() else np.empty((0, 2))
    return pts, leaf[keep], tag[keep], end[keep], pidx[keep], s[keep]


def coverage_time(leaves: Leaves, pieces: Pieces, box) -> tuple[float, np.ndarray]:
    """Exact coverage time of the box and the third leaf of each branch point."""
    pts, owner, tag, _, _, _ = _endpoints(leaves, pieces)
    corners = np.array([[box[0], box[1]], [box[2], box[1]], [box[2], box[3]], [box[0], box[3]]])
    allpts = np.concatenate([pts, corners])
    excl_a = np.concatenate([owner, np.full(4, -5)])
    excl_b = np.concatenate([np.where(tag >= 0, tag, -5), np.full(4, -5)])
    cover = leaves.first_cover(allpts, excl_a, excl_b)
    times = np.append(leaves.times, math.inf)
    death = times[np.minimum(cover, leaves.n)]
    birth = np.concatenate([leaves.times[owner], np.zeros(4)])
    order = np.argsort(birth, kind="stable")
    b, d = birth[order], death[order]
    reach = np.maximum.accumulate(d)
    gap = np.flatnonzero(b[1:] > reach[:-1])
    T = float(reach[gap[0]] if len(gap) else reach[-1])
    third = cover[: len(pts)][tag >= 0]
    return T, third


def _initial_horizon(law: GrainLaw2D, box) -> float:
    lam = law.lam
    H1 = law.boundary_mass_mean()
    beta3 = 2 * H1**2 / (math.pi * lam**2)
    A = box_area(box)
    Lw = 2 * ((box[2] - box[0]) + (box[3] - box[1]))

    def expected_alive(t):
        return (A * beta3 * lam**2 * t * t / 2 + Lw * 2 * H1 * t / math.pi + 4) * math.exp(-lam * t)

    t = 1.0 / lam
    while expected_alive(t) > 0.05 or t * lam < 2:
        t *= 1.05
    return t


@dataclass(frozen=True, eq=False)
class PlanarTessellation:
    """Visible boundary of the tessellation inside a box."""

    box: tuple[float, float, float, float]
    law: GrainLaw2D
    leaves: Leaves = field(repr=False)
    pieces: Pieces = field(repr=False)
    coverage_time: float
    branch_third: np.ndarray = field(repr=False)

    # -- basic inventory -----------------------------------------------------
    @property
    def window(self):
        return self.box

    @property
    def piece_lengths(self) -> np.ndarray:
        p = self.pieces
        return self.leaves.scale(p.leaf) * (p.s1 - p.s0)

    @cached_property
    def total_boundary_length(self) -> float:
        return float(self.piece_lengths.sum())

    @property
    def arcs(self) -> list[BoundaryArc]:
        out = []
        L = self.leaves
        p = self.pieces
        for k in range(len(p)):
            j = int(p.leaf[k])
            if L.is_disk:
                c = L.centers[j]
                out.append(
                    BoundaryArc(j, "arc", (c[0], c[1], L.radii[j], p.s0[k], p.s1[k]), float(L.radii[j] * (p.s1[k] - p.s0[k])))
                )
            else:
                for a, b in _split_at_corners(L.cum, p.s0[k], p.s1[k]):
                    q = L.points(np.array([j, j]), np.array([a, b]))
                    out.append(BoundaryArc(j, "segment", (q[0, 0], q[0, 1], q[1, 0], q[1, 1]), float(b - a)))
        return out

    def _branch(self, pieces: Pieces):
        pts, owner, tag, end, pidx, s = _endpoints(self.leaves, pieces)
        m = tag >= 0
        return pts[m], owner[m], tag[m], end[m], pidx[m], s[m]

    @cached_property
    def branch_points(self) -> np.ndarray:
        return self._branch(self.pieces)[0]

    @property
    def branch_leaves(self) -> np.ndarray:
        """Leaf triples (earlier boundary, later boundary, overlying leaf) per branch point."""
        _, owner, tag, _, _, _ = self._branch(self.pieces)
        third = np.where(self.branch_third == NONE, -1, self.branch_third)
        return np.stack([tag, owner, third], axis=1)

    # -- sub-box statistics --------------------------------------------------
    def clip(self, box) -> Pieces:
        box = as_box(box)
        if box == self.box:
            return self.pieces
        if box[0] < self.box[0] - 1e-12 or box[1] < self.box[1] - 1e-12 or box[2] > self.box[2] + 1e-12 or box[3] > self.box[3] + 1e-12:
            raise ValueError("sub-box must lie inside the simulation window")
        return clip_pieces(self.leaves, self.pieces, box)

    def boundary_length_in(self, box) -> float:
        p = self.clip(box)
        return float((self.leaves.scale(p.leaf) * (p.s1 - p.s0)).sum())

    def branch_count_in(self, box) -> int:
        return int(len(self._branch(self.clip(box))[0]))

    def intensity_sample(self, margin: float | None = None) -> tuple[float, float]:
        m = self.law.radius_bound if margin is None else margin
        box = erode(self.box, m)
        return self.boundary_length_in(box), box_area(box)

    def euler_cells_in(self, box) -> int:
        """Cell count estimate from critical points of a height function.

        Each cell is a topological disk, so its Euler characteristic 1 equals
        the sum over its boundary points of (1 - number of components of the
        cell's local sector lying below the point).  Summing over the points
        in the box gives an unbiased count per unit area.
        """
        L = self.leaves
        p = self.clip(box)
        total = 0
        # branch points: three rays
        pts, owner, tag, end, pidx, s = self._branch(p)
        if len(pts):
            into = L.tangents(owner, s) * np.where(end == 0, 1.0, -1.0)[:, None]
            ti = L.tangents(tag, L.param_of(tag, pts))
            down = (into @ UP < 0).astype(int) + (ti @ UP < 0).astype(int) + (-ti @ UP < 0).astype(int)
            total += int(np.sum(2 - down))
        order = np.lexsort((p.s0, p.leaf))
        pl, ps0, ps1 = p.leaf[order], p.s0[order], p.s1[order]
        owners = np.unique(p.leaf)
        loops = np.isin(owners, p.leaf[p.t0 == LOOP])
        if L.is_disk:
            top = math.atan2(UP[1], UP[0])
            for theta, value in ((top, -1), (top + math.pi, 1)):
                hit = locate(pl, ps0, ps1, owners, np.full(len(owners), theta), L.period, tol=0.0)
                total += value * int(np.sum((hit >= 0) | loops))
        else:
            k = len(L.edge_len)
            for m in range(k):
                hit = locate(pl, ps0, ps1, owners, np.full(len(owners), L.cum[m]), L.period, tol=0.0)
                j = owners[(hit >= 0) | loops]
                if len(j) == 0:
                    continue
                v = L.verts[j]
                nxt = v[:, (m + 1) % k] - v[:, m]
                prv = v[:, (m - 1) % k] - v[:, m]
                down = (nxt @ UP < 0).astype(int) + (prv @ UP < 0).astype(int)
                total += int(np.sum(1 - down))
        return total

    def split_points(self, pieces: Pieces):
        """Branch points lying inside pieces (the earlier boundary at each branch point)."""
        L = self.leaves
        pts, owner, tag, end, pidx, s = self._branch(pieces)
        order = np.lexsort((pieces.s0, pieces.leaf))
        sl, s0, s1 = pieces.leaf[order], pieces.s0[order], pieces.s1[order]
        if len(pts) == 0:
            return np.empty(0, int), np.empty(0)
        si = L.param_of(tag, pts)
        hit = locate(sl, s0, s1, tag, si, L.period, tol=0.0)
        ok = hit >= 0
        piece = order[hit[ok]]
        si = si[ok]
        si = np.where(si < pieces.s0[piece], si + L.period, si)
        return piece, si

    def sub_edges(self, box=None):
        """Pieces cut at the branch points lying on them.

        Returns (pieces, piece index, a, b) with one row per tessellation edge.
        """
        pieces = self.pieces if box is None else self.clip(box)
        piece, si = self.split_points(pieces)
        n = len(pieces)
        starts = np.concatenate([pieces.s0, si])
        owner = np.concatenate([np.arange(n), piece])
        order = np.lexsort((starts, owner))
        owner, starts = owner[order], starts[order]
        ends = np.empty_like(starts)
        ends[:-1] = starts[1:]
        last = np.ones(len(owner), bool)
        last[:-1] = owner[1:] != owner[:-1]
        ends[last] = pieces.s1[owner[last]]
        # a closed loop cut at k points has k edges: drop the seam start and
        # let the last edge run through the seam to the first cut
        first = np.ones(len(owner), bool)
        first[1:] = owner[1:] != owner[:-1]
        cut_loop = first & ~last & (pieces.t0[owner] == LOOP)
        li = np.flatnonzero(cut_loop)
        if len(li):
            last_idx = np.flatnonzero(last)
            lo = owner[last_idx]
            for i in li:
                j = last_idx[np.searchsorted(lo, owner[i])]
                ends[j] = ends[i] + self.leaves.period
            keep = ~cut_loop
            owner, starts, ends = owner[keep], starts[keep], ends[keep]
        return pieces, owner, starts, ends

    def edge_count_in(self, box) -> int:
        """Number of tessellation edges whose midpoint lies in the box."""
        pieces, owner, a, b = self.sub_edges()
        mid = self.leaves.points(pieces.leaf[owner], 0.5 * (a + b))
        return int(in_box(mid, as_box(box)).sum())

    def connectivity(self, box=None) -> tuple[int, int]:
        """(components, components not touching the box edge) of the arc graph in the box."""
        box = erode(self.box, self.law.radius_bound) if box is None else as_box(box)
        pieces = self.clip(box)
        n = len(pieces)
        if n == 0:
            return 0, 0
        L = self.leaves
        pts, owner, tag, end, pidx, s = self._branch(pieces)
        order = np.lexsort((pieces.s0, pieces.leaf))
        hit = locate(pieces.leaf[order], pieces.s0[order], pieces.s1[order], tag, L.param_of(tag, pts), L.period, tol=0.0)
        ok = hit >= 0
        a, b = pidx[ok], order[hit[ok]]
        g = coo_matrix((np.ones(len(a)), (a, b)), shape=(n, n))
        ncomp, label = connected_components(g, directed=False)
        touches = np.zeros(ncomp, bool)
        edge = (pieces.t0 == WINDOW) | (pieces.t1 == WINDOW)
        touches[label[edge]] = True
        return int(ncomp), int(np.sum(~touches))

    # -- raster cells ----------------------------------------------------------
    def raster(self, resolution: int = RASTER) -> np.ndarray:
        """Boolean image of the visible boundary over the window."""
        x0, y0, x1, y1 = self.box
        side = max(x1 - x0, y1 - y0)
        h = side / resolution
        nx = int(math.ceil((x1 - x0) / h))
        ny = int(math.ceil((y1 - y0) / h))
        img = np.zeros((ny, nx), bool)
        p = self.pieces
        L = self.leaves
        lengths = L.scale(p.leaf) * (p.s1 - p.s0)
        counts = np.maximum(np.ceil(lengths / (0.3 * h)).astype(int), 2)
        rep = np.repeat(np.arange(len(p)), counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        frac = offs / (counts[rep] - 1)
        s = p.s0[rep] + frac * (p.s1[rep] - p.s0[rep])
        pts = L.points(p.leaf[rep], s)
        ix = np.clip(((pts[:, 0] - x0) / h).astype(int), 0, nx - 1)
        iy = np.clip(((pts[:, 1] - y0) / h).astype(int), 0, ny - 1)
        img[iy, ix] = True
        return img

    def raster_cells(self, margin: float | None = None, resolution: int = RASTER) -> dict:
        """Flood-fill cell counts: faces fully inside the window, and faces whose
        centroid lies in the window eroded by margin (default 2R)."""
        img = self.raster(resolution)
        lab, n = ndimage.label(~img)
        if n == 0:
            return {"interior": 0, "centroid": 0, "eroded_area": 0.0}
        border = np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]]))
        interior = n - int(np.sum(border > 0))
        x0, y0, x1, y1 = self.box
        h = max(x1 - x0, y1 - y0) / resolution
        m = 2 * self.law.radius_bound if margin is None else margin
        eb = erode(self.box, m)
        cy, cx = np.array(ndimage.center_of_mass(np.ones_like(lab), lab, np.arange(1, n + 1))).T
        cent = np.stack([x0 + (cx + 0.5) * h, y0 + (cy + 0.5) * h], axis=1)
        return {"interior": interior, "centroid": int(in_box(cent, eb).sum()), "eroded_area": box_area(eb)}

    @cached_property
    def cell_count_interior(self) -> int:
        return self.raster_cells()["interior"]

    # -- patch areas (Green's theorem) ----------------------------------------
    def patch_areas(self, box=None) -> np.ndarray:
        """Area of the visible part of every leaf inside the box."""
        box = self.box if box is None else as_box(box)
        L = self.leaves
        pieces, owner, a, b = self.sub_edges(box)
        area = np.zeros(L.n)
        if len(owner):
            leaf = pieces.leaf[owner]
            g = _green(L, leaf, a, b)
            mid = L.points(leaf, 0.5 * (a + b))
            out_owner = L.first_cover(mid, leaf, np.full(len(leaf), -5))
            np.add.at(area, leaf, g)
            ok = out_owner != NONE
            np.add.at(area, out_owner[ok], -g[ok])
        # box boundary, split where pieces cross it
        pts, own, tag, _, _, _ = _endpoints(L, pieces)
        edge_pts = pts[tag == WINDOW]
        x0, y0, x1, y1 = box
        P = 2 * ((x1 - x0) + (y1 - y0))
        u = _box_param(edge_pts, box)
        u = np.unique(np.concatenate([u, [0.0, x1 - x0, x1 - x0 + y1 - y0, 2 * (x1 - x0) + y1 - y0]]))
        u_next = np.append(u[1:], u[0] + P)
        p0, p1 = _box_point(u, box), _box_point(u_next, box)
        midp = _box_point(0.5 * (u + u_next), box)
        own_seg = L.first_cover(midp, np.full(len(u), -5), np.full(len(u), -5))
        gseg = p0[:, 0] * p1[:, 1] - p1[:, 0] * p0[:, 1]
        ok = own_seg != NONE
        np.add.at(area, own_seg[ok], gseg[ok])
        return 0.5 * area

    # -- serialisation ---------------------------------------------------------
    def arc_rows(self) -> list[tuple]:
        rows = []
        for a in self.arcs:
            rows.append((a.leaf_id, a.kind, *[float(v) for v in a.params], a.length))
        return rows

    def branch_rows(self) -> list[tuple]:
        pts = self.branch_points
        tri = self.branch_leaves
        return [(float(p[0]), float(p[1]), int(t[0]), int(t[1]), int(t[2])) for p, t in zip(pts, tri)]


def _split_at_corners(cum, s0, s1):
    P = cum[-1]
    corners = np.concatenate([cum[:-1], cum[:-1] + P])
    inner = corners[(corners > s0 + TOL) & (corners < s1 - TOL)]
    cuts = np.concatenate([[s0], inner, [s1]])
    return list(zip(cuts[:-1], cuts[1:]))


def _green(L: Leaves, leaf, a, b) -> np.ndarray:
    """Integral of (x dy - y dx) along boundary pieces, counter-clockwise."""
    if L.is_disk:
        c = L.centers[leaf]
        r = L.radii[leaf]
        return r * r * (b - a) + r * (c[:, 0] * (np.sin(b) - np.sin(a)) - c[:, 1] * (np.cos(b) - np.cos(a)))
    out = np.zeros(len(leaf))
    P = L.period
    k = len(L.edge_len)
    # split at corners: integrate edge by edge over the two turns that can occur
    for turn in (0.0, P):
        for m in range(k):
            lo = np.maximum(a, L.cum[m] + turn)
            hi = np.minimum(b, L.cum[m + 1] + turn)
            sel = hi > lo
            if not sel.any():
                continue
            p = L.points(leaf[sel], lo[sel])
            q = L.points(leaf[sel], hi[sel])
            out[sel] += p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    return out


def _box_param(pts, box) -> np.ndarray:
    x0, y0, x1, y1 = box
    w, h = x1 - x0, y1 - y0
    x, y = pts[:, 0], pts[:, 1]
    d = np.stack([np.abs(y - y0), np.abs(x - x1), np.abs(y - y1), np.abs(x - x0)], axis=1)
    side = np.argmin(d, axis=1) if len(pts) else np.empty(0, int)
    return np.choose(side, [x - x0, w + (y - y0), w + h + (x1 - x), 2 * w + h + (y1 - y)]) if len(pts) else np.empty(0)


def _box_point(u, box) -> np.ndarray:
    x0, y0, x1, y1 = box
    w, h = x1 - x0, y1 - y0
    P = 2 * (w + h)
    u = np.mod(u, P)
    x = np.select([u <= w, u <= w + h, u <= 2 * w + h], [x0 + u, x1, x1 - (u - w - h)], x0)
    y = np.select([u <= w, u <= w + h, u <= 2 * w + h], [y0, y0 + (u - w), y1], y1 - (u - 2 * w - h))
    return np.stack([x, y], axis=1)


def tessellate2d(law: GrainLaw2D, box, centers, params, times) -> PlanarTessellation | None:
    """Tessellation of the box from leaves given in reversed-time order, or
    None if they do not cover it."""
    box = as_box(box)
    leaves = Leaves(law, centers, params, times)
    if leaves.n == 0:
        return None
    pieces = visible_pieces(leaves, box)
    T, third = coverage_time(leaves, pieces, box)
    if not math.isfinite(T):
        return None
    return _finish(law, box, leaves, pieces, T)


def _finish(law, box, leaves: Leaves, pieces: Pieces, T: float) -> PlanarTessellation:
    last = int(np.searchsorted(leaves.times, T, side="right"))
    if last < leaves.n:
        leaves = leaves.subset(slice(0, last))
        keep = pieces.leaf < last
        pieces = Pieces(*(x[keep] for x in pieces.astuple()))
    pts, owner, tag, _, _, _ = _endpoints(leaves, pieces)
    m = tag >= 0
    third = leaves.first_cover(pts[m], owner[m], tag[m])
    return PlanarTessellation(box, law, leaves, pieces, T, third)


def simulate2d(window, law: GrainLaw2D, rng: np.random.Generator, coverage: str = "exact", halo: float | None = None) -> PlanarTessellation:
    """Exact sample of the stationary tessellation restricted to the window box."""
    if not isinstance(law, GrainLaw2D):
        raise TypeError("simulate2d needs a 2D grain law")
    box = as_box(window)
    R = law.sim_radius_bound
    sw = SimulationWindow((box[0], box[1]), (box[2], box[3]), R if halo is None else halo)
    stream = ReversedStream(sw, law, rng)
    if coverage == "grid":
        T = coverage_stop_2d(box, stream)
        batch = stream.until(T)
        leaves = Leaves(law, batch.positions, batch.params, batch.times)
        pieces = visible_pieces(leaves, box)
        return _finish(law, box, leaves, pieces, T)
    if coverage != "exact":
        raise ValueError(f"unknown coverage rule {coverage!r}")
    T = _initial_horizon(law, box)
    while True:
        batch = stream.until(T)
        leaves = Leaves(law, batch.positions, batch.params, batch.times)
        if leaves.n:
            pieces = visible_pieces(leaves, box)
            Tc, _ = coverage_time(leaves, pieces, box)
            if Tc < T:
                return _finish(law, box, leaves, pieces, Tc)
        T *= 1.3


# ---------------------------------------------------------------------------
# hierarchical-grid coverage (conservative cross-check)


def coverage_stop_2d(window, stream: ReversedStream, rel_depth: float = 1e-4, horizon_factor: float = 50.0) -> float:
    """Coverage time from a quadtree of cells, each removed once a single leaf
    contains it.  Returns the time by which every cell is contained; this is
    never earlier than the exact coverage time."""
    box = as_box(window)
    law = stream.law
    side = max(box[2] - box[0], box[3] - box[1])
    min_side = rel_depth * side
    r_in = law.inradius_bound
    if min_side * math.sqrt(2) >= 2 * r_in:
        raise DepthExhausted("leaves are too small to contain cells at the finest grid level")
    # initial cells have half the inradius bound as side
    s0 = min(side, r_in / 2)
    nx = max(1, int(math.ceil((box[2] - box[0]) / s0)))
    ny = max(1, int(math.ceil((box[3] - box[1]) / s0)))
    hx, hy = (box[2] - box[0]) / nx, (box[3] - box[1]) / ny
    gx, gy = np.meshgrid(np.arange(nx), np.arange(ny))
    cells = np.stack([box[0] + gx.ravel() * hx, box[1] + gy.ravel() * hy], axis=1)
    size = np.tile([hx, hy], (len(cells), 1))
    quad = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float)
    T = 1.0 / law.lam
    limit = horizon_factor * (math.log(1 + box_area(box) / law.lam) + 2) / law.lam
    done_time = 0.0
    while True:
        batch = stream.until(T)
        leaves = Leaves(law, batch.positions, batch.params, batch.times) if len(batch) else None
        if len(cells) and leaves is not None:
            corners = cells[:, None, :] + np.array([[0, 0], [1, 0], [1, 1], [0, 1]])[None] * size[:, None, :]
            first = _first_containing(leaves, corners)
            hit = first != NONE
            if hit.any():
                done_time = max(done_time, float(leaves.times[first[hit]].max()))
            cells, size = cells[~hit], size[~hit]
            # refine one level per step, only where a leaf already covers the centre
            centre = cells + size / 2
            covered = leaves.first_cover(centre, np.full(len(cells), -5), np.full(len(cells), -5)) != NONE
            split = covered & (size[:, 0] / 2 >= min_side)
            if split.any():
                half = size[split] / 2
                kids = (cells[split][:, None, :] + quad[None] * half[:, None, :]).reshape(-1, 2)
                cells = np.concatenate([cells[~split], kids])
                size = np.concatenate([size[~split], np.repeat(half, 4, axis=0)])
        if not len(cells):
            return done_time
        if T > limit:
            raise DepthExhausted(f"{len(cells)} grid cells still uncovered at reversed time {T:.3g}")
        T *= 1.15


def _first_containing(leaves: Leaves, corners) -> np.ndarray:
    m = len(corners)
    centre = corners.mean(axis=1)
    best = np.full(m, NONE, dtype=np.int64)
    from scipy.spatial import cKDTree

    sdm = cKDTree(centre).sparse_distance_matrix(leaves.tree, leaves.rmax, output_type="ndarray")
    p, k = sdm["i"].astype(np.int64), sdm["j"].astype(np.int64)
    ok = np.ones(len(p), bool)
    for c in range(4):
        ok &= leaves.contains(k, corners[p, c], tol=0.0)
    np.minimum.at(best, p[ok], k[ok])
    return best


# ---------------------------------------------------------------------------
# forward evolution


@dataclass
class EvolvingState2D:
    law: GrainLaw2D
    time: float
    tess: PlanarTessellation
    centers: np.ndarray
    params: np.ndarray
    keys: np.ndarray

    @classmethod
    def from_tessellation(cls, tess: PlanarTessellation, time: float = 0.0) -> "EvolvingState2D":
        L = tess.leaves
        return cls(tess.law, time, tess, L.centers, L.params, L.times)


def evolve2d(state, until: float, rng: np.random.Generator, grid=None):
    """Apply forward arrivals on (state.time, until].

    Returns (new state, times, boundary lengths in the window at each grid time).
    """
    if isinstance(state, PlanarTessellation):
        state = EvolvingState2D.from_tessellation(state)
    if until < state.time:
        raise ValueError("until must not precede the current time")
    box = state.tess.box
    grid = np.asarray([until] if grid is None else grid, dtype=float)
    R = state.law.sim_radius_bound
    sw = SimulationWindow((box[0], box[1]), (box[2], box[3]), R)
    batch = forward_stream(sw, state.law, state.time, until, rng)
    values = np.empty(len(grid))
    current = state
    for i, u in enumerate(grid):
        current = _advance2d(state, batch, u)
        values[i] = current.tess.total_boundary_length
    if len(grid) == 0 or grid[-1] < until:
        current = _advance2d(state, batch, until)
    return current, grid, values


def _advance2d(state: EvolvingState2D, batch, u: float) -> EvolvingState2D:
    n_new = int(np.searchsorted(batch.times, u, side="right"))
    dt = u - state.time
    if n_new == 0:
        if dt == 0:
            return state
        return EvolvingState2D(state.law, u, state.tess, state.centers, state.params, state.keys + dt)
    c = np.concatenate([batch.positions[:n_new][::-1], state.centers])
    p = np.concatenate([batch.params[:n_new][::-1], state.params])
    k = np.concatenate([u - batch.times[:n_new][::-1], state.keys + dt])
    tess = tessellate2d(state.law, state.tess.box, c, p, k)
    assert tess is not None
    n = tess.leaves.n
    return EvolvingState2D(state.law, u, tess, c[:n], p[:n], k[:n])


def connectivity_diagnostic(tess: PlanarTessellation, box=None) -> int:
    """Number of arc components inside the (eroded) window that do not touch its edge."""
    return tess.connectivity(box)[1]
