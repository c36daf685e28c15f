"""Dead leaves random measures: each leaf carries a mark measure, restricted
to the part of the plane (or line) not covered by leaves that arrived later
in forward time (earlier in reversed time)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import dlm1d, dlm2d
from .engine import ReversedStream, SimulationWindow, forward_stream
from .marks import IncompatibleMark, MarkMeasure, TestFunction


@dataclass(frozen=True, eq=False)
class DLRMRealization:
    """One realization of the measure on a window, plus the leaf stack behind it.

    Leaf arrays are in reversed-time order (keys increasing); the tessellation
    uses a prefix of them.  Seeds are stored by base position and key.
    """

    law: object
    mark: MarkMeasure
    window: tuple  # (n,) in 1D, box in 2D
    tess: object
    positions: np.ndarray = field(repr=False)
    params: np.ndarray = field(repr=False)
    keys: np.ndarray = field(repr=False)
    levels: np.ndarray = field(repr=False)
    ids: np.ndarray = field(repr=False)
    seed_positions: np.ndarray = field(repr=False)
    seed_keys: np.ndarray = field(repr=False)
    time: float = 0.0

    @property
    def dim(self) -> int:
        return self.law.dim

    @property
    def n_leaves(self) -> int:
        return len(self.keys)

    # -- evaluation ------------------------------------------------------------
    def _boxes(self, f: TestFunction):
        """Test-function boxes intersected with the window (empty ones dropped)."""
        out = []
        if self.dim == 1:
            n = self.window[0]
            for (lo, hi), v in zip(f.boxes, f.values):
                a, b = max(lo[0], 0.0), min(hi[0], n)
                if b > a:
                    out.append(((a, b), v))
            return out
        x0, y0, x1, y1 = self.window
        for (lo, hi), v in zip(f.boxes, f.values):
            box = (max(lo[0], x0), max(lo[1], y0), min(hi[0], x1), min(hi[1], y1))
            if box[2] > box[0] and box[3] > box[1]:
                out.append((box, v))
        return out

    def evaluate(self, f: TestFunction) -> float:
        """xi(f) for a piecewise-constant f (restricted to the window)."""
        if f.dim != self.dim:
            raise ValueError("test function dimension does not match the model")
        kind = self.mark.kind
        boxes = self._boxes(f)
        if kind == "seeds":
            pts = self.visible_seeds()
            return float(f(pts).sum()) if len(pts) else 0.0
        total = 0.0
        for box, v in boxes:
            total += v * self._mass_in(box)
        return total

    def total(self) -> float:
        if self.dim == 1:
            return self.evaluate(TestFunction.indicator([0.0], [self.window[0]]))
        x0, y0, x1, y1 = self.window
        return self.evaluate(TestFunction.indicator([x0, y0], [x1, y1]))

    def _mass_in(self, box) -> float:
        kind = self.mark.kind
        t = self.tess
        if self.dim == 1:
            a, b = box
            if kind == "boundary_surface":
                e = t.eta
                return float(np.sum((e >= a) & (e < b)))
            lo = np.clip(t.breaks[:-1], a, b)
            hi = np.clip(t.breaks[1:], a, b)
            return float(self.levels[t.cell_leaf] @ (hi - lo))
        if kind == "boundary_surface":
            return t.boundary_length_in(box)
        if kind in ("colour_lebesgue", "density"):
            areas = t.patch_areas(box)[: len(self.levels)]
            return float(self.levels[: len(areas)] @ areas)
        if kind == "corner_counting":
            pts = self.visible_corners()
            return float(dlm2d.in_box(pts, box).sum()) if len(pts) else 0.0
        raise IncompatibleMark(kind)

    def visible_corners(self) -> np.ndarray:
        L = self.tess.leaves
        k = L.verts.shape[1]
        pts = L.verts.reshape(-1, 2)
        owner = np.repeat(np.arange(L.n), k)
        first = L.first_cover(pts, owner, np.full(len(owner), -5))
        visible = (first > owner) & dlm2d.in_box(pts, self.window)
        return pts[visible]

    def seed_atoms(self):
        """All seed atoms inside the window: (points, keys)."""
        offs = np.asarray(self.mark.offsets, dtype=float)
        if len(self.seed_keys) == 0:
            return np.empty((0, self.dim)), np.empty(0)
        pts = (self.seed_positions[:, None, :] + offs[None, :, :]).reshape(-1, self.dim)
        keys = np.repeat(self.seed_keys, len(offs))
        if self.dim == 1:
            inside = (pts[:, 0] >= 0) & (pts[:, 0] <= self.window[0])
        else:
            inside = dlm2d.in_box(pts, self.window)
        return pts[inside], keys[inside]

    def visible_seeds(self) -> np.ndarray:
        """Seed atoms not covered by a leaf that arrived before them in reversed time."""
        pts, keys = self.seed_atoms()
        if len(pts) == 0:
            return pts
        t = self.tess
        if self.dim == 1:
            i = np.clip(np.searchsorted(t.breaks, pts[:, 0], side="right") - 1, 0, t.n_cells - 1)
            cover_key = t.times[t.cell_leaf[i]]
        else:
            L = t.leaves
            first = L.first_cover(pts, np.full(len(pts), -5), np.full(len(pts), -5))
            cover_key = np.append(L.times, math.inf)[np.minimum(first, L.n)]
        return pts[keys < cover_key]

    def leaf_masses(self) -> dict[int, float]:
        """Visible mark mass per leaf id (seeds excluded)."""
        t = self.tess
        kind = self.mark.kind
        # the tessellation may keep leaves beyond the coverage time; none of them is visible
        n = len(self.keys)
        if self.dim == 1:
            if kind == "boundary_surface":
                # a break is an endpoint of the upper (smaller key) of its two cells;
                # breaks inside one leaf come from exposed point components and are skipped
                left, right = t.cell_leaf[:-1], t.cell_leaf[1:]
                upper = np.where(t.times[left] <= t.times[right], left, right)
                mass = np.bincount(upper[left != right], minlength=n)[:n].astype(float)
            else:
                mass = np.bincount(t.cell_leaf, weights=t.cell_lengths, minlength=n)[:n] * self.levels[:n]
        else:
            if kind == "boundary_surface":
                mass = np.bincount(t.pieces.leaf, weights=t.piece_lengths, minlength=n)[:n]
            else:
                mass = t.patch_areas()[:n] * self.levels[:n]
        return {int(self.ids[i]): float(mass[i]) for i in range(len(mass)) if mass[i] > 0}


# ---------------------------------------------------------------------------
# simulation


def _levels(mark: MarkMeasure, rng: np.random.Generator, size: int) -> np.ndarray:
    if mark.kind == "colour_lebesgue":
        return (rng.random(size) < mark.p).astype(float)
    if mark.kind == "density":
        idx = rng.choice(len(mark.values), size=size, p=np.asarray(mark.probs))
        return np.asarray(mark.values)[idx]
    return np.ones(size)


def _window_of(law, window):
    if law.dim == 1:
        n = float(window[0] if isinstance(window, (tuple, list)) else window)
        if not n > 0:
            raise ValueError("window length must be positive")
        return (n,)
    return dlm2d.as_box(window)


def _seed_halo(law, mark: MarkMeasure) -> float:
    R = law.sim_radius_bound
    if mark.kind != "seeds":
        return R
    offs = np.asarray(mark.offsets, dtype=float)
    return max(R, float(np.linalg.norm(offs, axis=1).max()))


def simulate_dlrm(window, law, mark: MarkMeasure, rng: np.random.Generator) -> DLRMRealization:
    """Stationary realization restricted to the window."""
    mark.check(law)
    win = _window_of(law, window)
    if mark.kind != "seeds":
        if law.dim == 1:
            tess = dlm1d.simulate(win[0], law, rng)
            pos, params, keys = tess.positions[:, None], tess.lengths, tess.times
        else:
            tess = dlm2d.simulate2d(win, law, rng)
            L = tess.leaves
            pos, params, keys = L.centers, L.params, L.times
        levels = _levels(mark, rng, len(keys))
        empty = np.empty((0, law.dim))
        return DLRMRealization(law, mark, win, tess, pos, params, keys, levels, np.arange(len(keys)), empty, np.empty(0))
    return _simulate_seeds(win, law, mark, rng)


def _simulate_seeds(win, law, mark: MarkMeasure, rng: np.random.Generator) -> DLRMRealization:
    halo = _seed_halo(law, mark)
    if law.dim == 1:
        sw = SimulationWindow.segment(win[0], halo)
        T = dlm1d._initial_horizon(win[0], law) / (1 - mark.q)
    else:
        sw = SimulationWindow((win[0], win[1]), (win[2], win[3]), halo)
        T = dlm2d._initial_horizon(law, win) / (1 - mark.q)
    stream = ReversedStream(sw, law, rng)
    types = np.empty(0, bool)
    while True:
        batch = stream.until(T)
        if len(batch) > len(types):
            # types are drawn in arrival order, so they do not depend on T
            types = np.concatenate([types, rng.random(len(batch) - len(types)) < mark.q])
        seed = types[: len(batch)]
        leaf = ~seed
        tess = _tessellate(law, win, batch.positions[leaf], batch.params[leaf], batch.times[leaf])
        if tess is not None:
            break
        T *= 1.5
    cover = tess.coverage_time
    keep_seed = seed & (batch.times < cover)
    pos, params, keys = batch.positions[leaf], batch.params[leaf], batch.times[leaf]
    return DLRMRealization(
        law, mark, win, tess, pos, params, keys, np.ones(len(keys)), np.arange(len(keys)),
        batch.positions[keep_seed], batch.times[keep_seed],
    )


def _tessellate(law, win, positions, params, keys):
    if law.dim == 1:
        if len(keys) == 0:
            return None
        return dlm1d.tessellate(win[0], positions[:, 0] if positions.ndim == 2 else positions, params, law.offsets, keys)
    if len(keys) == 0:
        return None
    return dlm2d.tessellate2d(law, win, positions, params, keys)


def evaluate_xi(window, law, mark: MarkMeasure, f: TestFunction, rng: np.random.Generator) -> float:
    """Simulate on the window and return xi(f)."""
    return simulate_dlrm(window, law, mark, rng).evaluate(f)


# ---------------------------------------------------------------------------
# forward evolution


def evolve_xi(real: DLRMRealization, f: TestFunction, grid, rng: np.random.Generator):
    """Forward dynamics on the grid times (measured from real.time).

    Returns (times, values, final realization).
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) == 0:
        return grid, np.empty(0), real
    t0 = real.time
    if np.any(np.diff(grid) < 0) or grid[0] < t0:
        raise ValueError("grid must be sorted and start at or after the current time")
    law, mark = real.law, real.mark
    halo = _seed_halo(law, mark)
    win = real.window
    if law.dim == 1:
        sw = SimulationWindow.segment(win[0], halo)
    else:
        sw = SimulationWindow((win[0], win[1]), (win[2], win[3]), halo)
    batch = forward_stream(sw, law, t0, float(grid[-1]), rng)
    is_seed = rng.random(len(batch)) < mark.q if mark.kind == "seeds" else np.zeros(len(batch), bool)
    levels = _levels(mark, rng, len(batch))
    next_id = int(real.ids.max()) + 1 if len(real.ids) else 0
    new_ids = next_id + np.arange(len(batch))
    values = np.empty(len(grid))
    current = real
    for i, u in enumerate(grid):
        current = _advance(real, batch, is_seed, levels, new_ids, float(u))
        values[i] = current.evaluate(f)
    return grid, values, current


def _advance(real: DLRMRealization, batch, is_seed, levels, new_ids, u: float) -> DLRMRealization:
    dt = u - real.time
    k = int(np.searchsorted(batch.times, u, side="right"))
    if k == 0:
        if dt == 0:
            return real
        return replace(real, keys=real.keys + dt, seed_keys=real.seed_keys + dt, time=u,
                       tess=_shift_tess(real, dt))
    order = np.arange(k)[::-1]  # latest forward arrival first
    leaf = ~is_seed[order]
    sel = order[leaf]
    pos = np.concatenate([batch.positions[sel], real.positions])
    params = np.concatenate([batch.params[sel], real.params])
    keys = np.concatenate([u - batch.times[sel], real.keys + dt])
    lev = np.concatenate([levels[sel], real.levels])
    ids = np.concatenate([new_ids[sel], real.ids])
    ssel = order[~leaf]
    spos = np.concatenate([batch.positions[ssel], real.seed_positions])
    skeys = np.concatenate([u - batch.times[ssel], real.seed_keys + dt])
    tess = _tessellate(real.law, real.window, pos, params, keys)
    assert tess is not None, "the previous picture already covers the window"
    cover = tess.coverage_time
    # leaves and seeds beyond the coverage time are hidden for good
    m = int(np.searchsorted(keys, cover, side="right"))
    sk = skeys < cover
    return DLRMRealization(
        real.law, real.mark, real.window, tess, pos[:m], params[:m], keys[:m], lev[:m], ids[:m],
        spos[sk], skeys[sk], u,
    )


def _shift_tess(real: DLRMRealization, dt: float):
    """Same picture with every key shifted by dt."""
    return _tessellate(real.law, real.window, real.positions, real.params, real.keys + dt)
