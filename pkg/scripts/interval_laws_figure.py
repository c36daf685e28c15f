#!/usr/bin/env python3
"""Tabulate the exposed and typical interval length laws against simulation.

Prints histogram densities of the continuous parts next to the closed forms,
plus the atom masses, for leaves of length 1 (or --low/--high uniform lengths).
"""

from __future__ import annotations

import argparse

import numpy as np

from deadleaves import closedform as cf
from deadleaves import dlm1d
from deadleaves.grains import GrainLaw1D, Uniform
from deadleaves.stats import map_replicates


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=4000)
    ap.add_argument("--low", type=float)
    ap.add_argument("--high", type=float)
    ap.add_argument("--seed", type=int, default=99)
    args = ap.parse_args()
    if args.low is not None and args.high is not None:
        law = GrainLaw1D.length_law(Uniform(args.low, args.high))
    else:
        law = GrainLaw1D.fixed_length(1.0)
    n = 20.0

    def one(rng):
        t = dlm1d.simulate(n, law, rng)
        return dlm1d.cell_lengths_at_origin(t), dlm1d.cell_at_origin_is_full(t)

    xs, full = map(np.array, zip(*map_replicates(one, args.seed, "X", args.replicates)))
    X = cf.exposed_interval_law(law)
    atoms = law.single.atoms
    print(f"atom mass: simulated {full.mean():.4f}, closed form {X.atom_mass:.4f}")
    cont = xs if not atoms else xs[~full]
    edges = np.linspace(0.0, float(np.quantile(cont, 0.99)), 13)
    hist, _ = np.histogram(cont, edges)
    dens = hist / (len(xs) * np.diff(edges))
    mid = 0.5 * (edges[1:] + edges[:-1])
    print(f"{'x':>6} {'sim':>8} {'formula':>8}")
    for m, d in zip(mid, dens):
        print(f"{m:6.3f} {d:8.4f} {float(X.density(m)):8.4f}")


if __name__ == "__main__":
    main()
