"""Space-time Poisson arrival streams and reproducible random substreams."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

BLOCK = 4096


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def substream(seed: int, *keys) -> np.random.Generator:
    """Independent generator keyed by (seed, keys...), e.g. (experiment, replicate, tag).

    Uses numpy's counter-based Philox bit generator seeded through SeedSequence.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SimulationWindow:
    """Axis-aligned box with a halo; positions are drawn on box + B(halo)."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    halo: float = 0.0

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or len(self.lo) not in (1, 2):
            raise ValueError("window must be a 1D or 2D box")
        if any(h < l for l, h in zip(self.lo, self.hi)) or self.halo < 0:
            raise ValueError("window box must have hi >= lo and a nonnegative halo")

    @classmethod
    def segment(cls, n: float, halo: float = 0.0) -> "SimulationWindow":
        return cls((0.0,), (float(n),), float(halo))

    @classmethod
    def square(cls, side: float, halo: float = 0.0) -> "SimulationWindow":
        return cls((0.0, 0.0), (float(side), float(side)), float(halo))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> np.ndarray:
        return np.subtract(self.hi, self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    @property
    def region_volume(self) -> float:
        """|box + B(halo)|."""
        h = self.halo
        if self.dim == 1:
            return float(self.sides[0] + 2 * h)
        a, b = self.sides
        return float(a * b + 2 * h * (a + b) + math.pi * h * h)

    def contains_region(self, pts: np.ndarray) -> np.ndarray:
        """Whether points lie in box + B(halo)."""
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        gap = np.maximum(lo - pts, 0) + np.maximum(pts - hi, 0)
        return np.einsum("ij,ij->i", gap, gap) <= self.halo**2


@dataclass(frozen=True)
class Arrival:
    position: np.ndarray
    time: float
    shape: object
    mark: object = None


@dataclass
class ArrivalBatch:
    """Arrivals as parallel arrays: positions (m, d), times (m,), params (m, ...)."""

    positions: np.ndarray
    times: np.ndarray
    params: np.ndarray

    def __len__(self):
        return len(self.times)

    def take(self, idx) -> "ArrivalBatch":
        return ArrivalBatch(self.positions[idx], self.times[idx], self.params[idx])

    @staticmethod
    def concat(batches) -> "ArrivalBatch":
        batches = list(batches)
        return ArrivalBatch(
            np.concatenate([b.positions for b in batches]),
            np.concatenate([b.times for b in batches]),
            np.concatenate([b.params for b in batches]),
        )


def _check(window: SimulationWindow, law) -> None:
    if law.dim != window.dim:
        raise ValueError("law and window dimensions differ")
    R = law.sim_radius_bound
    if not math.isfinite(R):
        raise ValueError("grain law needs a finite radius bound")
    if window.halo < R - 1e-12:
        raise ValueError(f"halo {window.halo} is smaller than the radius bound {R}")


def _params(law, rng, size):
    if law.dim == 1:
        return law.sample_lengths(rng, size)
    return law.sample_params(rng, size)


class ReversedStream:
    """Lazily generated time-ordered arrivals on box + B(halo) x [start, inf).

    Arrivals come from a rate-|bounding box| clock with uniform positions on
    the bounding box, thinned to box + B(halo).  Blocks of fixed size are
    drawn in a fixed order, so the sequence depends only on the generator,
    not on how it is consumed.
    """

    def __init__(self, window: SimulationWindow, law, rng: np.random.Generator, start: float = 0.0):
        _check(window, law)
        self.window, self.law, self.rng = window, law, rng
        h = window.halo
        self._lo = np.asarray(window.lo, dtype=float) - h
        self._hi = np.asarray(window.hi, dtype=float) + h
        self._rate = float(np.prod(self._hi - self._lo))
        self._blocks: list[ArrivalBatch] = []
        self._clock = float(start)
        self.empty = self._rate == 0.0

    @property
    def horizon(self) -> float:
        """Time up to which arrivals have been generated."""
        return math.inf if self.empty else self._clock

    def _grow(self) -> None:
        rng = self.rng
        gaps = rng.exponential(1.0 / self._rate, BLOCK)
        times = self._clock + np.cumsum(gaps)
        pos = self._lo + (self._hi - self._lo) * rng.random((BLOCK, self.window.dim))
        params = _params(self.law, rng, BLOCK)
        self._clock = float(times[-1])
        keep = self.window.contains_region(pos) if self.window.dim > 1 else slice(None)
        self._blocks.append(ArrivalBatch(pos[keep], times[keep], params[keep]))

    def until(self, t: float) -> ArrivalBatch:
        """All arrivals with time <= t, in time order."""
        if self.empty:
            return _empty_batch(self.law, self.window.dim)
        while self._clock < t:
            self._grow()
        out = ArrivalBatch.concat(self._blocks) if self._blocks else _empty_batch(self.law, self.window.dim)
        k = np.searchsorted(out.times, t, side="right")
        return out.take(slice(0, k))

    def __iter__(self) -> Iterator[Arrival]:
        if self.empty:
            return
        b = 0
        while True:
            while b >= len(self._blocks):
                self._grow()
            blk = self._blocks[b]
            for i in range(len(blk)):
                yield Arrival(blk.positions[i], float(blk.times[i]), blk.params[i])
            b += 1


def _empty_batch(law, dim) -> ArrivalBatch:
    shape = (0, law.n_components) if dim == 1 else (0,)
    return ArrivalBatch(np.empty((0, dim)), np.empty(0), np.empty(shape))


def reversed_stream(window: SimulationWindow, law, rng: np.random.Generator) -> ReversedStream:
    return ReversedStream(window, law, rng)


def forward_stream(window: SimulationWindow, law, t0: float, t1: float, rng: np.random.Generator) -> ArrivalBatch:
    """All arrivals with times in (t0, t1], in increasing time order."""
    if not t1 >= t0:
        raise ValueError("need t0 <= t1")
    _check(window, law)
    h = window.halo
    lo = np.asarray(window.lo, dtype=float) - h
    hi = np.asarray(window.hi, dtype=float) + h
    rate = float(np.prod(hi - lo))
    m = int(rng.poisson(rate * (t1 - t0)))
    times = np.sort(t0 + (t1 - t0) * (1.0 - rng.random(m)))
    pos = lo + (hi - lo) * rng.random((m, window.dim))
    params = _params(law, rng, m)
    batch = ArrivalBatch(pos, times, params)
    if window.dim > 1 and m:
        batch = batch.take(window.contains_region(pos))
    return batch
