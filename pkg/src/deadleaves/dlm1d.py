"""Perfect simulation of the one-dimensional dead leaves tessellation.

Leaves are painted in reversed-time order onto the elementary segments cut
out by all component endpoints: a segment belongs to the first leaf that
covers it.  Breakpoints also act as slots so that zero-length components
(points) can be tested for exposure.  Painting runs in a numba kernel with a
"next unpainted slot" union-find, so each slot is written once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .engine import ArrivalBatch, ReversedStream, SimulationWindow, forward_stream
from .grains import GrainLaw1D

SLIVER = 1e-12


@njit(cache=True)
def _find(nxt, k):
    root = k
    while nxt[root] != root:
        root = nxt[root]
    while nxt[k] != root:
        nk = nxt[k]
        nxt[k] = root
        k = nk
    return root


@njit(cache=True)
def _paint(lo, hi, is_point, n_slots):
    """Assign each slot to the first component covering it.

    Positive components paint slots [lo, hi); point components test slot lo.
    Returns (owner per slot, exposed flag per point component).
    """
    owner = np.full(n_slots, -1, np.int64)
    nxt = np.arange(n_slots + 1)
    exposed = np.zeros(lo.shape[0], np.bool_)
    for c in range(lo.shape[0]):
        if is_point[c]:
            s = lo[c]
            if owner[s] == -1:
                owner[s] = c
                nxt[s] = s + 1
                exposed[c] = True
            continue
        k = _find(nxt, lo[c])
        while k < hi[c]:
            owner[k] = c
            nxt[k] = k + 1
            k = _find(nxt, k + 1)
    return owner, exposed


@dataclass(frozen=True)
class Tessellation1D:
    """Visible cells of [0, n] and the boundary point process eta."""

    n: float
    breaks: np.ndarray  # cell boundaries, breaks[0] = 0, breaks[-1] = n
    cell_leaf: np.ndarray  # exposing leaf (index into the leaf arrays)
    cell_component: np.ndarray
    cell_full: np.ndarray  # cell is a whole, unclipped leaf component
    eta: np.ndarray
    coverage_time: float
    # leaves in painting order, kept for rendering and evolution
    positions: np.ndarray = field(repr=False)
    lengths: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    leaf_visible: np.ndarray = field(repr=False)

    @property
    def window(self) -> tuple[float, float]:
        return (0.0, self.n)

    @property
    def n_cells(self) -> int:
        return len(self.cell_leaf)

    @property
    def cell_lengths(self) -> np.ndarray:
        return np.diff(self.breaks)

    @property
    def cell_edge(self) -> np.ndarray:
        e = np.zeros(self.n_cells, bool)
        e[0] = e[-1] = True
        return e

    @property
    def cells(self) -> list[tuple[tuple[float, float], int, bool]]:
        b = self.breaks
        return [
            ((float(b[i]), float(b[i + 1])), int(self.cell_leaf[i]), bool(self.cell_full[i]))
            for i in range(self.n_cells)
        ]

    def count_in(self, a: float, b: float) -> int:
        """Number of eta points in [a, b]."""
        e = self.eta
        return int(np.searchsorted(e, b, side="right") - np.searchsorted(e, a, side="left"))

    def intensity_sample(self, margin: float) -> tuple[float, float]:
        a, b = margin, self.n - margin
        if b <= a:
            raise ValueError("erosion margin leaves an empty window")
        return float(self.count_in(a, b)), b - a

    def full_pairs(self, a: float = 0.0, b: float | None = None) -> np.ndarray:
        """Left endpoints of whole visible components with left end in [a, b]."""
        b = self.n if b is None else b
        left = self.breaks[:-1][self.cell_full]
        return left[(left >= a) & (left <= b)]

    def to_rows(self) -> list[tuple]:
        b = self.breaks
        return [
            (float(b[i]), float(b[i + 1]), int(self.cell_leaf[i]), int(bool(self.cell_full[i])))
            for i in range(self.n_cells)
        ]


def tessellate(n: float, positions, lengths, offsets, times) -> Tessellation1D | None:
    """Paint leaves (already in reversed-time order) onto [0, n].

    Returns None when the leaves do not cover the window.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1)
    lengths = np.asarray(lengths, dtype=float).reshape(len(positions), -1)
    times = np.asarray(times, dtype=float)
    m, k = lengths.shape
    tol = SLIVER * n
    starts = positions[:, None] + offsets[None, :k]
    ends = starts + lengths
    leaf_of = np.repeat(np.arange(m), k)
    comp_of = np.tile(np.arange(k), m)
    s, e = starts.reshape(-1), ends.reshape(-1)
    point = e - s <= 0.0
    # keep components that meet the open window
    keep = np.where(point, (s > tol) & (s < n - tol), (e > 0) & (s < n))
    s, e, point = s[keep], e[keep], point[keep]
    leaf_of, comp_of = leaf_of[keep], comp_of[keep]
    cs, ce = np.clip(s, 0.0, n), np.clip(e, 0.0, n)

    allv = np.concatenate([[0.0, n], cs, ce])
    uniq, inv = np.unique(allv, return_inverse=True)
    # values closer than tol to their predecessor merge into it
    new_pt = np.concatenate([[True], np.diff(uniq) > tol])
    gidx = np.cumsum(new_pt) - 1
    grid = uniq[new_pt]
    grid[-1] = n
    n_seg = len(grid) - 1
    if n_seg < 1:
        return None
    mc = len(cs)
    a = gidx[inv[2 : 2 + mc]]
    b = gidx[inv[2 + mc :]]
    lo = np.where(point, 2 * a, 2 * a + 1)
    hi = np.where(point, 2 * a + 1, 2 * b)
    owner, exposed = _paint(lo.astype(np.int64), hi.astype(np.int64), point, 2 * n_seg + 1)
    seg_owner = owner[1::2]
    if np.any(seg_owner < 0):
        return None

    forced = np.zeros(n_seg + 1, bool)
    forced[a[point & exposed]] = True
    change = np.empty(n_seg + 1, bool)
    change[0] = change[-1] = True
    change[1:-1] = (seg_owner[1:] != seg_owner[:-1]) | forced[1:-1]
    bidx = np.flatnonzero(change)
    breaks = grid[bidx]
    run_owner = seg_owner[bidx[:-1]]
    run_lo, run_hi = bidx[:-1], bidx[1:]
    unclipped = (s[run_owner] >= 0) & (e[run_owner] <= n)
    full = unclipped & (run_lo == a[run_owner]) & (run_hi == b[run_owner])

    leaf_visible = np.zeros(m, bool)
    leaf_visible[leaf_of[run_owner]] = True
    leaf_visible[leaf_of[point & exposed]] = True
    cov = float(times[leaf_of[seg_owner]].max())
    return Tessellation1D(
        n=float(n),
        breaks=breaks,
        cell_leaf=leaf_of[run_owner],
        cell_component=comp_of[run_owner],
        cell_full=full,
        eta=breaks[1:-1].copy(),
        coverage_time=cov,
        positions=positions,
        lengths=lengths,
        offsets=np.asarray(offsets, dtype=float),
        times=times,
        leaf_visible=leaf_visible,
    )


def _initial_horizon(n: float, law: GrainLaw1D) -> float:
    lam = law.lam
    L = math.log1p(n / lam)
    return (L + math.log(max(L, 1.0)) + 3.0) / lam


def simulate(n: float, law: GrainLaw1D, rng: np.random.Generator, halo: float | None = None) -> Tessellation1D:
    """Exact sample of the stationary tessellation restricted to [0, n]."""
    if not n > 0:
        raise ValueError("window length must be positive")
    if law.lam <= 0 or law.n_zero_length == law.n_components:
        raise ValueError("leaves of zero length never cover the window")
    R = law.sim_radius_bound
    window = SimulationWindow.segment(n, R if halo is None else halo)
    stream = ReversedStream(window, law, rng)
    T = _initial_horizon(n, law)
    while True:
        batch = stream.until(T)
        tess = tessellate(n, batch.positions[:, 0], batch.params, law.offsets, batch.times)
        if tess is not None:
            return tess
        T *= 1.5


def cell_lengths_at_origin(tess: Tessellation1D, origin: float | None = None) -> float:
    """Length of the cell containing origin (default: window midpoint)."""
    o = tess.n / 2 if origin is None else float(origin)
    if not 0 < o < tess.n:
        raise ValueError("origin must lie inside the window")
    i = int(np.searchsorted(tess.breaks, o, side="right")) - 1
    return float(tess.breaks[i + 1] - tess.breaks[i])


def cell_at_origin_is_full(tess: Tessellation1D, origin: float | None = None) -> bool:
    o = tess.n / 2 if origin is None else float(origin)
    i = int(np.searchsorted(tess.breaks, o, side="right")) - 1
    return bool(tess.cell_full[i])


def typical_interval_sample(tess: Tessellation1D, rng: np.random.Generator | None = None) -> float:
    """Length of a uniformly chosen interior cell."""
    if tess.n_cells < 3:
        raise ValueError("need at least 3 cells")
    lengths = tess.cell_lengths[1:-1]
    if rng is None:
        return float(lengths[0]) if len(lengths) == 1 else float(lengths[len(lengths) // 2])
    return float(lengths[rng.integers(len(lengths))])


def vacancy_indicator(tess: Tessellation1D, h: float, origin: float | None = None) -> bool:
    """True iff eta has no point in [origin, origin + h]."""
    o = tess.n / 2 if origin is None else float(origin)
    if h < 0 or o <= 0 or o + h >= tess.n:
        raise ValueError("segment must lie inside the window")
    return tess.count_in(o, o + h) == 0


# ---------------------------------------------------------------------------
# forward evolution


@dataclass
class EvolvingState1D:
    """Current tessellation plus the stack of leaves that can still be seen.

    keys are reversed times measured from the current time: a leaf that
    arrived at forward time s has key t - s, leaves of the initial picture
    carry their reversed time plus the elapsed time.
    """

    law: GrainLaw1D
    time: float
    tess: Tessellation1D
    positions: np.ndarray
    lengths: np.ndarray
    keys: np.ndarray

    @classmethod
    def from_tessellation(cls, tess: Tessellation1D, law: GrainLaw1D, time: float = 0.0) -> "EvolvingState1D":
        vis = tess.leaf_visible
        return cls(law, time, tess, tess.positions[vis], tess.lengths[vis], tess.times[vis])

    @property
    def count(self) -> int:
        return len(self.tess.eta)


def _restack(state: EvolvingState1D, batch: ArrivalBatch, u: float):
    keep = batch.times <= u
    newx = batch.positions[keep, 0][::-1]
    newl = batch.params[keep][::-1]
    newk = u - batch.times[keep][::-1]
    x = np.concatenate([newx, state.positions])
    l = np.concatenate([newl, state.lengths])
    k = np.concatenate([newk, state.keys + (u - state.time)])
    return x, l, k


def evolve(state: EvolvingState1D, until: float, rng: np.random.Generator, grid=None):
    """Apply forward arrivals on (state.time, until].

    Returns (new state, times, counts) where counts[i] = eta_t([0, n]) at
    times[i] for each grid time (default: just `until`).
    """
    if until < state.time:
        raise ValueError("until must not precede the current time")
    tess = state.tess
    grid = np.asarray([until] if grid is None else grid, dtype=float)
    if np.any(grid < state.time) or np.any(grid > until) or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted inside [current time, until]")
    window = SimulationWindow.segment(tess.n, state.law.sim_radius_bound)
    batch = forward_stream(window, state.law, state.time, until, rng)
    # only leaves that meet the window can change it
    s = batch.positions[:, 0]
    reach = state.law.offsets[-1] + batch.params[:, -1] if len(batch) else s
    batch = batch.take((s + reach > 0) & (s < tess.n))
    counts = np.empty(len(grid), dtype=np.int64)
    current = state
    for i, u in enumerate(grid):
        current = _advance(state, batch, u)
        counts[i] = current.count
    if len(grid) == 0 or grid[-1] < until:
        current = _advance(state, batch, until)
    return current, grid, counts


def _advance(state: EvolvingState1D, batch: ArrivalBatch, u: float) -> EvolvingState1D:
    n_new = int(np.searchsorted(batch.times, u, side="right"))
    if n_new == 0:
        if u == state.time:
            return state
        return EvolvingState1D(state.law, u, state.tess, state.positions, state.lengths, state.keys + (u - state.time))
    x, l, k = _restack(state, batch, u)
    tess = tessellate(state.tess.n, x, l, state.law.offsets, k)
    assert tess is not None
    vis = tess.leaf_visible
    return EvolvingState1D(state.law, u, tess, x[vis], l[vis], k[vis])
