#!/usr/bin/env python3
"""Run the acceptance configs and print one pass/fail line per criterion.

    python scripts/run_acceptance.py [--only 1 2 9] [--out out/acceptance] [--threads N]

The determinism criterion compares a second run of every config against
the artifacts written by the first one, so it is run last.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from collections import defaultdict
from pathlib import Path

from deadleaves import cli, verify

ROOT = Path(__file__).resolve().parents[1]


def criterion_of(path: Path) -> int:
    return int(re.match(r"\d+", path.stem).group())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--configs", default=str(ROOT / "configs" / "acceptance"))
    ap.add_argument("--out", default=str(ROOT / "out" / "acceptance"))
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    args = ap.parse_args(argv)

    groups: dict[int, list[Path]] = defaultdict(list)
    for p in sorted(Path(args.configs).glob("*.json")):
        groups[criterion_of(p)].append(p)
    wanted = sorted(groups) if not args.only else sorted(set(args.only) & set(groups))
    out = Path(args.out)
    lines = []
    failed = False
    for n in [k for k in wanted if k != 13]:
        parts = []
        for path in groups[n]:
            cfg = cli.load_config(path)
            stem = cfg.get("name", path.stem)
            t0 = time.perf_counter()
            status = cli.run(cfg, out=str(out / stem), threads=args.threads)
            meta = json.loads((out / stem / "meta.json").read_text())
            parts.append((stem, status, time.perf_counter() - t0, meta.get("attempts", 1)))
        ok = all(s == 0 for _, s, _, _ in parts)
        failed |= not ok
        desc = ", ".join(f"{s} {'pass' if st == 0 else 'FAIL'} ({dt:.1f} s{', reseeded' if a > 1 else ''})"
                         for s, st, dt, a in parts)
        lines.append(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}")
        print(lines[-1], flush=True)

    if 13 in wanted:
        cfg = cli.load_config(groups[13][0])
        cfg = dict(cfg, params=dict(cfg["params"], base_dir=args.configs))
        have = all((out / cli.load_config(Path(args.configs) / c).get("name", Path(c).stem)).is_dir()
                   for c in cfg["params"]["configs"])
        ctx = verify.Context(int(cfg["seed"]), 0, args.threads)
        t0 = time.perf_counter()
        rows = verify.check_determinism(cfg, ctx, reference_root=out if have else None)
        bad = [r.name for r in rows if r.verdict == "fail"]
        failed |= bool(bad)
        lines.append(f"criterion 13: {'PASS' if not bad else 'FAIL'}  {len(rows)} configs rerun "
                     f"({time.perf_counter() - t0:.1f} s){'; differing: ' + ', '.join(bad) if bad else ''}")
        print(lines[-1], flush=True)

    (out / "summary.txt").parent.mkdir(parents=True, exist_ok=True)
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
