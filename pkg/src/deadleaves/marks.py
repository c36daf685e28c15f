"""Mark measures carried by leaves, and piecewise-constant test functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MARK_KINDS = ("boundary_surface", "corner_counting", "colour_lebesgue", "seeds", "density")


class IncompatibleMark(ValueError):
    """Mark kind cannot be evaluated on the given grain law."""


@dataclass(frozen=True)
class MarkMeasure:
    """Mark attached to each leaf.

    boundary_surface   H_{d-1} on the leaf boundary
    corner_counting    unit atoms at polygon corners
    colour_lebesgue    Lebesgue measure on the leaf with probability p, else zero
    seeds              with probability q the arrival is a seed (empty leaf carrying
                       unit atoms at the fixed offsets), otherwise a leaf with no mark
    density            Lebesgue measure times a random level, constant on each leaf
    """

    kind: str
    p: float = 1.0
    q: float = 0.0
    offsets: tuple = ()
    values: tuple = ()
    probs: tuple = ()

    def __post_init__(self):
        if self.kind not in MARK_KINDS:
            raise ValueError(f"unknown mark kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("colour probability must lie in [0, 1]")
        if self.kind == "seeds":
            if not 0.0 < self.q < 1.0:
                raise ValueError("seed probability must lie in (0, 1): a model of seeds only has no leaves")
            if len(self.offsets) == 0:
                raise ValueError("seeds need at least one atom")
        if self.kind == "density":
            if len(self.values) == 0 or len(self.values) != len(self.probs):
                raise ValueError("density marks need matching values and probs")
            if abs(sum(self.probs) - 1.0) > 1e-9 or min(self.probs) < 0:
                raise ValueError("density level probabilities must sum to 1")

    # constructors
    @classmethod
    def boundary_surface(cls) -> "MarkMeasure":
        return cls("boundary_surface")

    @classmethod
    def corner_counting(cls) -> "MarkMeasure":
        return cls("corner_counting")

    @classmethod
    def colour(cls, p: float) -> "MarkMeasure":
        return cls("colour_lebesgue", p=float(p))

    @classmethod
    def seeds(cls, q: float, offsets=((0.0, 0.0),)) -> "MarkMeasure":
        offs = tuple(tuple(float(c) for c in np.atleast_1d(o)) for o in offsets)
        return cls("seeds", q=float(q), offsets=offs)

    @classmethod
    def density(cls, values, probs) -> "MarkMeasure":
        return cls("density", values=tuple(float(v) for v in values), probs=tuple(float(p) for p in probs))

    @classmethod
    def from_dict(cls, d: dict) -> "MarkMeasure":
        kind = d.get("kind")
        if kind == "boundary_surface":
            return cls.boundary_surface()
        if kind == "corner_counting":
            return cls.corner_counting()
        if kind in ("colour_lebesgue", "colour"):
            return cls.colour(d["p"])
        if kind == "seeds":
            return cls.seeds(d["q"], d.get("offsets", [[0.0, 0.0]]))
        if kind == "density":
            return cls.density(d["values"], d["probs"])
        raise ValueError(f"unknown mark kind {kind!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "colour_lebesgue":
            out["p"] = self.p
        if self.kind == "seeds":
            out["q"] = self.q
            out["offsets"] = [list(o) for o in self.offsets]
        if self.kind == "density":
            out["values"] = list(self.values)
            out["probs"] = list(self.probs)
        return out

    # level moments for Lebesgue-type marks
    @property
    def level_moments(self) -> tuple[float, float]:
        """(E V, E V^2) for the per-leaf level V multiplying Lebesgue measure."""
        if self.kind == "colour_lebesgue":
            return self.p, self.p
        if self.kind == "density":
            v, w = np.asarray(self.values), np.asarray(self.probs)
            return float(w @ v), float(w @ v**2)
        raise ValueError("mark is not of Lebesgue type")

    def check(self, law) -> None:
        """Raise IncompatibleMark if this mark cannot live on the law's leaves."""
        if self.kind == "corner_counting":
            if law.dim != 2 or law.is_disk:
                raise IncompatibleMark("corner counting needs polygon leaves")
        if self.kind == "seeds":
            d = len(self.offsets[0])
            if any(len(o) != d for o in self.offsets) or d != law.dim:
                raise IncompatibleMark("seed offsets must match the law dimension")
        if self.kind == "boundary_surface" and law.dim == 1 and not law.n_components:
            raise IncompatibleMark("empty leaves carry no boundary")

    def mean_mass(self, law) -> float:
        """E|M| under the arrival law (for seeds: per arrival of the thinned stream)."""
        self.check(law)
        if self.kind == "boundary_surface":
            return law.boundary_mass_mean()
        if self.kind == "corner_counting":
            return float(law.n_vertices)
        if self.kind == "seeds":
            return self.q * len(self.offsets)
        return self.level_moments[0] * law.lam

    def effective_lam(self, law) -> float:
        """Mean leaf measure of the arrival law (seeds have empty leaves)."""
        if self.kind == "seeds":
            return (1.0 - self.q) * law.lam
        return law.lam


@dataclass(frozen=True)
class TestFunction:
    """Piecewise-constant function: sum of value * indicator(box) over disjoint boxes.

    Boxes are (lo, hi) with lo, hi tuples of length d.  scaled(n) gives
    T_n f(x) = f(n^{-1/d} x).
    """

    boxes: tuple = ()
    values: tuple = ()

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if len(self.boxes) != len(self.values):
            raise ValueError("need one value per box")
        boxes = tuple((tuple(float(a) for a in lo), tuple(float(b) for b in hi)) for lo, hi in self.boxes)
        for lo, hi in boxes:
            if len(lo) != len(hi) or any(b < a for a, b in zip(lo, hi)):
                raise ValueError(f"bad box {lo}, {hi}")
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def indicator(cls, lo, hi) -> "TestFunction":
        return cls(((tuple(np.atleast_1d(lo)), tuple(np.atleast_1d(hi))),), (1.0,))

    @property
    def dim(self) -> int:
        return len(self.boxes[0][0]) if self.boxes else 0

    def scaled(self, n: float) -> "TestFunction":
        s = n ** (1.0 / self.dim)
        return TestFunction(
            tuple((tuple(s * a for a in lo), tuple(s * b for b in hi)) for lo, hi in self.boxes), self.values
        )

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return TestFunction(self.boxes + other.boxes, self.values + other.values)

    def __mul__(self, c: float) -> "TestFunction":
        return TestFunction(self.boxes, tuple(c * v for v in self.values))

    __rmul__ = __mul__

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[-1] != self.dim and self.dim == 1:
            x = x.reshape(-1, 1)
        out = np.zeros(len(x))
        for (lo, hi), v in zip(self.boxes, self.values):
            inside = np.all((x >= np.array(lo)) & (x < np.array(hi)), axis=1)
            out += v * inside
        return out

    @property
    def support(self) -> tuple:
        lo = np.min([b[0] for b in self.boxes], axis=0)
        hi = np.max([b[1] for b in self.boxes], axis=0)
        return tuple(lo), tuple(hi)

    def integral(self) -> float:
        return float(sum(v * math.prod(b - a for a, b in zip(lo, hi)) for (lo, hi), v in zip(self.boxes, self.values)))

    def inner(self, other: "TestFunction") -> float:
        """L2 inner product, exact for boxes."""
        total = 0.0
        for (lo1, hi1), v1 in zip(self.boxes, self.values):
            for (lo2, hi2), v2 in zip(other.boxes, other.values):
                side = [max(0.0, min(b1, b2) - max(a1, a2)) for a1, b1, a2, b2 in zip(lo1, hi1, lo2, hi2)]
                total += v1 * v2 * math.prod(side)
        return total

    def to_dict(self) -> dict:
        return {"boxes": [[list(lo), list(hi)] for lo, hi in self.boxes], "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "TestFunction":
        return cls(tuple((tuple(lo), tuple(hi)) for lo, hi in d["boxes"]), tuple(d.get("values", [1.0] * len(d["boxes"]))))
