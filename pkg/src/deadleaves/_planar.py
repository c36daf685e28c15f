"""Vectorised boundary bookkeeping for disks and convex polygons.

Every leaf boundary is a closed curve with a parameter s in [0, P): the polar
angle for circles (P = 2 pi) and arclength for polygons (P = perimeter).
Covered parts of a boundary are parameter intervals; interval endpoints carry
a tag saying what produced them:

    tag >= 0   the boundary of that (earlier) leaf
    WINDOW     the edge of a clipping box
    SEAM       an artificial cut at s = 0 / s = P or at a polygon corner
    LOOP       a fully visible closed boundary
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from .grains import GrainLaw2D, rotate

WINDOW = -1
SEAM = -2
LOOP = -3
TOL = 1e-10
NONE = np.iinfo(np.int64).max


class Leaves:
    """Leaf geometry in reversed-time order (index = arrival rank)."""

    def __init__(self, law: GrainLaw2D, centers: np.ndarray, params: np.ndarray, times: np.ndarray):
        self.law = law
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        self.params = np.asarray(params, dtype=float).reshape(-1)
        self.times = np.asarray(times, dtype=float).reshape(-1)
        self.n = len(self.times)
        self.is_disk = law.is_disk
        if self.is_disk:
            self.radii = self.params
            self.reach = self.radii
            self.period = 2 * math.pi
        else:
            base = law.vertices
            self.verts = rotate(base[None, :, :], self.params[:, None]) + self.centers[:, None, :]
            e = np.roll(base, -1, axis=0) - base
            self.edge_len = np.linalg.norm(e, axis=1)
            self.cum = np.concatenate([[0.0], np.cumsum(self.edge_len)])
            self.period = float(self.cum[-1])
            self.reach = np.full(self.n, law.radius_bound)
        self.rmax = float(self.reach.max()) if self.n else 0.0
        self._tree = None

    def subset(self, idx) -> "Leaves":
        return Leaves(self.law, self.centers[idx], self.params[idx], self.times[idx])

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.centers)
        return self._tree

    def scale(self, idx) -> np.ndarray:
        """Length per unit parameter."""
        return self.radii[idx] if self.is_disk else np.ones(np.shape(idx))

    # -- pointwise geometry ------------------------------------------------
    def _edge(self, s):
        m = np.searchsorted(self.cum, s, side="right") - 1
        return np.clip(m, 0, len(self.edge_len) - 1)

    def points(self, idx, s) -> np.ndarray:
        idx = np.asarray(idx)
        s = np.mod(np.asarray(s, dtype=float), self.period)
        if self.is_disk:
            r = self.radii[idx]
            return self.centers[idx] + r[..., None] * np.stack([np.cos(s), np.sin(s)], axis=-1)
        m = self._edge(s)
        k = len(self.edge_len)
        a = self.verts[idx, m]
        b = self.verts[idx, (m + 1) % k]
        t = (s - self.cum[m]) / self.edge_len[m]
        return a + t[..., None] * (b - a)

    def tangents(self, idx, s) -> np.ndarray:
        """Unit tangent in the counter-clockwise direction."""
        idx = np.asarray(idx)
        s = np.mod(np.asarray(s, dtype=float), self.period)
        if self.is_disk:
            return np.stack([-np.sin(s), np.cos(s)], axis=-1)
        m = self._edge(s)
        k = len(self.edge_len)
        d = self.verts[idx, (m + 1) % k] - self.verts[idx, m]
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def param_of(self, idx, pts) -> np.ndarray:
        """Boundary parameter of points lying on the boundary of leaf idx."""
        idx = np.asarray(idx)
        pts = np.asarray(pts, dtype=float)
        if self.is_disk:
            d = pts - self.centers[idx]
            return np.mod(np.arctan2(d[..., 1], d[..., 0]), 2 * math.pi)
        k = len(self.edge_len)
        a = self.verts[idx]  # (m, k, 2)
        b = np.roll(a, -1, axis=1)
        ab = b - a
        t = np.einsum("mkd,mkd->mk", pts[:, None, :] - a, ab) / np.einsum("mkd,mkd->mk", ab, ab)
        t = np.clip(t, 0.0, 1.0)
        proj = a + t[..., None] * ab
        dist = np.linalg.norm(proj - pts[:, None, :], axis=-1)
        m = np.argmin(dist, axis=1)
        tt = t[np.arange(len(m)), m]
        return np.mod(self.cum[m] + tt * self.edge_len[m], self.period)

    def contains(self, idx, pts, tol: float = 1e-12) -> np.ndarray:
        """Whether pts[i] lies in the open leaf idx[i]."""
        idx = np.asarray(idx)
        pts = np.asarray(pts, dtype=float)
        if self.is_disk:
            d = np.linalg.norm(pts - self.centers[idx], axis=-1)
            return d < self.radii[idx] - tol
        a = self.verts[idx]
        b = np.roll(a, -1, axis=1)
        cr = (b[..., 0] - a[..., 0]) * (pts[:, None, 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
            pts[:, None, 0] - a[..., 0]
        )
        return np.all(cr > tol * self.edge_len, axis=1)

    def meets_box(self, box) -> np.ndarray:
        x0, y0, x1, y1 = box
        c = self.centers
        gx = np.maximum(np.maximum(x0 - c[:, 0], c[:, 0] - x1), 0)
        gy = np.maximum(np.maximum(y0 - c[:, 1], c[:, 1] - y1), 0)
        return gx * gx + gy * gy < self.reach**2

    # -- covered intervals -------------------------------------------------
    def covered_intervals(self, targets=None):
        """Parameter intervals of boundaries covered by earlier leaves.

        targets: optional mask of leaves whose boundaries matter.
        Returns (leaf, a, b, tag_a, tag_b) with a <= b but possibly outside [0, P].
        """
        if self.n < 2:
            return _empty_intervals()
        pairs = self.tree.query_pairs(2 * self.rmax, output_type="ndarray")
        if len(pairs) == 0:
            return _empty_intervals()
        i, j = pairs[:, 0], pairs[:, 1]  # i < j, so i arrived first
        if targets is not None:
            keep = targets[j]
            i, j = i[keep], j[keep]
        if self.is_disk:
            return self._disk_intervals(i, j)
        return self._polygon_intervals(i, j)

    def _disk_intervals(self, i, j):
        d_vec = self.centers[i] - self.centers[j]
        d = np.hypot(d_vec[:, 0], d_vec[:, 1])
        ri, rj = self.radii[i], self.radii[j]
        hit = d < ri + rj
        i, j, d_vec, d, ri, rj = i[hit], j[hit], d_vec[hit], d[hit], ri[hit], rj[hit]
        full = d + rj <= ri
        inner = d + ri <= rj  # disk i sits inside circle j: covers none of it
        part = ~full & ~inner
        phi = np.arctan2(d_vec[part, 1], d_vec[part, 0])
        c = (d[part] ** 2 + rj[part] ** 2 - ri[part] ** 2) / (2 * d[part] * rj[part])
        w = np.arccos(np.clip(c, -1.0, 1.0))
        leaf = np.concatenate([j[full], j[part]])
        a = np.concatenate([np.zeros(full.sum()), phi - w])
        b = np.concatenate([np.full(full.sum(), 2 * math.pi), phi + w])
        tag = np.concatenate([i[full], i[part]])
        return leaf, a, b, tag, tag.copy()

    def _polygon_intervals(self, i, j, chunk: int = 40000):
        out = []
        k = len(self.edge_len)
        for start in range(0, len(i), chunk):
            ii, jj = i[start : start + chunk], j[start : start + chunk]
            d = np.linalg.norm(self.centers[ii] - self.centers[jj], axis=1)
            hit = d < self.reach[ii] + self.reach[jj]
            ii, jj = ii[hit], jj[hit]
            vi, vj = self.verts[ii], self.verts[jj]
            p0 = vj  # (P, k, 2) edge starts of the covered polygon
            dj = np.roll(vj, -1, axis=1) - vj
            ei = np.roll(vi, -1, axis=1) - vi  # (P, k, 2) edges of the covering polygon
            # A[p, m, q] = cross(e_q, p0_m - v_q), B[p, m, q] = cross(e_q, d_m)
            rel = p0[:, :, None, :] - vi[:, None, :, :]
            A = ei[:, None, :, 0] * rel[..., 1] - ei[:, None, :, 1] * rel[..., 0]
            B = ei[:, None, :, 0] * dj[:, :, None, 1] - ei[:, None, :, 1] * dj[:, :, None, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                root = -A / B
            lower = np.where(B > 0, root, -np.inf)
            upper = np.where(B < 0, root, np.inf)
            dead = np.any((B == 0) & (A <= 0), axis=2)
            q_lo = np.argmax(lower, axis=2)
            q_hi = np.argmin(upper, axis=2)
            lo = np.take_along_axis(lower, q_lo[..., None], 2)[..., 0]
            hi = np.take_along_axis(upper, q_hi[..., None], 2)[..., 0]
            tag_lo = np.where(lo > 0, ii[:, None], SEAM)
            tag_hi = np.where(hi < 1, ii[:, None], SEAM)
            lo = np.maximum(lo, 0.0)
            hi = np.minimum(hi, 1.0)
            ok = (hi > lo) & ~dead
            pidx, m = np.nonzero(ok)
            L = self.edge_len[m]
            out.append(
                (
                    jj[pidx],
                    self.cum[m] + lo[pidx, m] * L,
                    self.cum[m] + hi[pidx, m] * L,
                    tag_lo[pidx, m],
                    tag_hi[pidx, m],
                )
            )
        if not out:
            return _empty_intervals()
        return tuple(np.concatenate(z) for z in zip(*out))

    def outside_intervals(self, box, leaves=None):
        """Parameter intervals of boundaries lying outside the box."""
        x0, y0, x1, y1 = box
        idx = np.arange(self.n) if leaves is None else np.asarray(leaves)
        normals = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]])
        offsets = np.array([-x0, x1, -y0, y1])
        out = []
        if self.is_disk:
            c, r = self.centers[idx], self.radii[idx]
            for n, h in zip(normals, offsets):
                q = (h - c @ n) / r
                alpha = math.atan2(n[1], n[0])
                full = q < -1
                part = (q >= -1) & (q < 1)
                w = np.arccos(np.clip(q[part], -1, 1))
                out.append((idx[full], np.zeros(full.sum()), np.full(full.sum(), 2 * math.pi)))
                out.append((idx[part], alpha - w, alpha + w))
        else:
            k = len(self.edge_len)
            v = self.verts[idx]
            d = np.roll(v, -1, axis=1) - v
            for n, h in zip(normals, offsets):
                A = v @ n - h  # outside where A + s B > 0
                B = d @ n
                with np.errstate(divide="ignore", invalid="ignore"):
                    root = -A / B
                lo = np.where(B > 0, root, np.where(B < 0, -np.inf, np.where(A > 0, -np.inf, np.inf)))
                hi = np.where(B < 0, root, np.where(B > 0, np.inf, np.where(A > 0, np.inf, -np.inf)))
                lo, hi = np.maximum(lo, 0.0), np.minimum(hi, 1.0)
                p, m = np.nonzero(hi > lo)
                L = self.edge_len[m]
                out.append((idx[p], self.cum[m] + lo[p, m] * L, self.cum[m] + hi[p, m] * L))
        leaf = np.concatenate([o[0] for o in out]).astype(np.int64)
        a = np.concatenate([o[1] for o in out])
        b = np.concatenate([o[2] for o in out])
        tag = np.full(len(leaf), WINDOW, dtype=np.int64)
        return leaf, a, b, tag, tag.copy()

    def first_cover(self, pts, excl_a, excl_b, batch: int = 200000) -> np.ndarray:
        """Index of the earliest leaf containing each point in its interior,
        skipping the leaves excl_a / excl_b; NONE if there is none."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        best = np.full(len(pts), NONE, dtype=np.int64)
        if len(pts) == 0 or self.n == 0:
            return best
        ptree = cKDTree(pts)
        sdm = ptree.sparse_distance_matrix(self.tree, self.rmax, output_type="ndarray")
        p = sdm["i"].astype(np.int64)
        k = sdm["j"].astype(np.int64)
        ok = (k != excl_a[p]) & (k != excl_b[p])
        p, k = p[ok], k[ok]
        inside = np.empty(len(p), bool)
        for s in range(0, len(p), batch):
            inside[s : s + batch] = self.contains(k[s : s + batch], pts[p[s : s + batch]])
        p, k = p[inside], k[inside]
        np.minimum.at(best, p, k)
        return best


def _empty_intervals():
    z = np.empty(0)
    zi = np.empty(0, dtype=np.int64)
    return zi, z, z, zi, zi


def concat_intervals(*parts):
    return tuple(np.concatenate(z) for z in zip(*parts))


def union_complement(n_leaves, leaf, a, b, ta, tb, period: float, has_boundary=None, tol: float = TOL):
    """Visible pieces: complement of the union of covered intervals per leaf.

    Returns arrays (leaf, s0, s1, tag0, tag1) with 0 <= s0 < P and s1 > s0
    (s1 may exceed P when a piece wraps through s = 0).  Leaves listed in
    has_boundary that carry no interval at all come back as LOOP pieces.
    """
    P = period
    leaf = np.asarray(leaf, dtype=np.int64)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ta = np.asarray(ta, dtype=np.int64)
    tb = np.asarray(tb, dtype=np.int64)
    # wrap to [0, P]
    full = b - a >= P - tol
    a0 = np.mod(a, P)
    b0 = a0 + (b - a)
    a0 = np.where(full, 0.0, a0)
    b0 = np.where(full, P, b0)
    over = b0 > P
    L = np.concatenate([leaf, leaf[over]])
    A = np.concatenate([a0, np.zeros(over.sum())])
    B = np.concatenate([np.where(over, P, b0), b0[over] - P])
    TA = np.concatenate([ta, np.full(over.sum(), SEAM)])
    TB = np.concatenate([np.where(over, SEAM, tb), tb[over]])

    pieces = []
    if len(L):
        order = np.lexsort((A, L))
        L, A, B, TA, TB = L[order], A[order], B[order], TA[order], TB[order]
        span = 4 * P + 4
        cm = np.maximum.accumulate(B + L * span) - L * span
        first = np.empty(len(L), bool)
        first[0] = True
        first[1:] = L[1:] != L[:-1]
        start = first.copy()
        start[1:] |= A[1:] > cm[:-1] + tol
        sidx = np.flatnonzero(start)
        comp = np.cumsum(start) - 1
        c_leaf = L[sidx]
        c_a = A[sidx]
        c_ta = TA[sidx]
        c_b = np.maximum.reduceat(B, sidx)
        o2 = np.lexsort((B, comp))
        last = o2[np.r_[np.flatnonzero(np.diff(comp[o2])), len(o2) - 1]]
        c_tb = TB[last]
        nc = len(sidx)
        same = np.zeros(nc, bool)
        same[:-1] = c_leaf[1:] == c_leaf[:-1]
        # gaps between consecutive components of one leaf
        g = np.flatnonzero(same)
        pieces.append((c_leaf[g], c_b[g], c_a[g + 1], c_tb[g], c_ta[g + 1]))
        # gap through the seam: last component of a leaf to its first
        is_last = ~same
        is_first = np.ones(nc, bool)
        is_first[1:] = ~same[:-1]
        fl = np.flatnonzero(is_first)
        ll = np.flatnonzero(is_last)
        wrap_len = c_a[fl] + P - c_b[ll]
        w = wrap_len > tol
        s0 = c_b[ll][w]
        s1 = c_a[fl][w] + P
        shift = s0 >= P - tol
        pieces.append(
            (
                c_leaf[ll][w],
                np.where(shift, s0 - P, s0),
                np.where(shift, s1 - P, s1),
                c_tb[ll][w],
                c_ta[fl][w],
            )
        )
        touched = np.unique(c_leaf)
    else:
        touched = np.empty(0, dtype=np.int64)
    if has_boundary is not None:
        loose = np.setdiff1d(np.asarray(has_boundary, dtype=np.int64), touched)
        pieces.append(
            (loose, np.zeros(len(loose)), np.full(len(loose), P), np.full(len(loose), LOOP), np.full(len(loose), LOOP))
        )
    if not pieces:
        z = np.empty(0)
        zi = np.empty(0, dtype=np.int64)
        return zi, z, z, zi, zi
    out = [np.concatenate(z) for z in zip(*pieces)]
    keep = out[2] - out[1] > tol
    out = [o[keep] for o in out]
    order = np.lexsort((out[1], out[0]))
    return tuple(o[order] for o in out)


def complement_of_pieces(leaf, s0, s1, t0, t1, period: float):
    """Covered intervals implied by a set of pieces (gaps between pieces)."""
    if len(leaf) == 0:
        return _empty_intervals()
    order = np.lexsort((s0, leaf))
    leaf, s0, s1, t0, t1 = leaf[order], s0[order], s1[order], t0[order], t1[order]
    same = np.zeros(len(leaf), bool)
    same[:-1] = leaf[1:] == leaf[:-1]
    g = np.flatnonzero(same)
    parts = [(leaf[g], s1[g], s0[g + 1], t1[g], t0[g + 1])]
    is_first = np.ones(len(leaf), bool)
    is_first[1:] = ~same[:-1]
    fl, ll = np.flatnonzero(is_first), np.flatnonzero(~same)
    loop = t0[fl] == LOOP
    gap = s0[fl] + period - s1[ll]
    w = (gap > TOL) & ~loop
    parts.append((leaf[ll][w], s1[ll][w], s0[fl][w] + period, t1[ll][w], t0[fl][w]))
    return concat_intervals(*parts)


def locate(p_leaf, p_s0, p_s1, q_leaf, q_s, period: float, tol: float = TOL) -> np.ndarray:
    """Index of the piece containing boundary point (q_leaf, q_s), or -1.

    Pieces must be sorted by (leaf, s0).  A point counts as inside when it is
    at least tol away from both piece ends.
    """
    q_leaf = np.asarray(q_leaf, dtype=np.int64)
    q_s = np.mod(np.asarray(q_s, dtype=float), period)
    res = np.full(len(q_leaf), -1, dtype=np.int64)
    if len(p_leaf) == 0 or len(q_leaf) == 0:
        return res
    ul, rank = np.unique(p_leaf, return_inverse=True)
    span = 2 * period + 1
    key = rank * span + p_s0
    qr = np.searchsorted(ul, q_leaf)
    qr_c = np.clip(qr, 0, len(ul) - 1)
    known = ul[qr_c] == q_leaf
    for shift in (0.0, period):
        s = q_s + shift
        qk = qr_c * span + s
        pos = np.searchsorted(key, qk, side="right") - 1
        pos_c = np.clip(pos, 0, len(key) - 1)
        ok = known & (pos >= 0) & (p_leaf[pos_c] == q_leaf) & (s > p_s0[pos_c] + tol) & (s < p_s1[pos_c] - tol)
        res = np.where((res < 0) & ok, pos_c, res)
    return res
