#!/usr/bin/env python3
"""Write SVG pictures of a few tessellations to out/figures."""

from __future__ import annotations

import argparse
from pathlib import Path

from deadleaves import dlm1d, dlm2d
from deadleaves.engine import substream
from deadleaves.grains import GrainLaw1D, GrainLaw2D, Uniform
from deadleaves.render import render_svg

ROOT = Path(__file__).resolve().parents[1]

CASES = {
    "disks": lambda rng: dlm2d.simulate2d((0, 0, 10, 10), GrainLaw2D.disk(1.0), rng),
    "rotated_squares": lambda rng: dlm2d.simulate2d((0, 0, 8, 8), GrainLaw2D.square(1.0), rng),
    "fixed_squares": lambda rng: dlm2d.simulate2d((0, 0, 8, 8), GrainLaw2D.square(1.0, random_rotation=False), rng),
    "triangles": lambda rng: dlm2d.simulate2d((0, 0, 8, 8), GrainLaw2D.polygon([[0, 0], [1.5, 0], [0.4, 1.2]]), rng),
    "segments_1d": lambda rng: dlm1d.simulate(12.0, GrainLaw1D.length_law(Uniform(0.5, 1.5)), rng),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(ROOT / "out" / "figures"))
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--shade", action="store_true", help="fill planar cells with grey levels")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, make in CASES.items():
        t = make(substream(args.seed, "figure", name))
        path = out / f"{name}.svg"
        path.write_text(render_svg(t, shade=args.shade), encoding="utf-8")
        print(path)


if __name__ == "__main__":
    main()
