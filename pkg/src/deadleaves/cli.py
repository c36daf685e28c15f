"""Command line experiment runner.

    deadleaves {simulate,estimate,verify,evolve,render,run} --config PATH [--seed N]
               [--threads N] [--out DIR] [--format csv|json]
    deadleaves list-targets

Exit codes: 0 success, 1 runtime failure, 2 config/schema error,
3 unsupported combination, 4 a verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import closedform as cf
from . import dlm1d, dlm2d, dlrm
from .engine import substream
from .marks import IncompatibleMark
from .render import render_svg
from .stats import EstimateReport, estimate_intensity, estimate_variance
from .verify import (
    CHECKS,
    UnsupportedCombination,
    evolve_paths,
    law_of,
    mark_of,
    measure_of,
    run_check,
    window_of,
    window_totals,
    Context,
    _sigma_sq,
)

log = logging.getLogger("deadleaves")

TASKS = ("simulate", "estimate", "verify", "evolve", "render")
MODELS = ("dlm1d", "dlm2d", "dlrm", "noodle", "suite")

_length_law = {
    "type": "object",
    "required": ["law"],
    "properties": {
        "law": {"enum": ["dirac", "uniform", "exponential"]},
        "value": {"type": "number", "exclusiveMinimum": 0},
        "low": {"type": "number", "minimum": 0},
        "high": {"type": "number", "exclusiveMinimum": 0},
        "mean": {"type": "number", "exclusiveMinimum": 0},
    },
}

SCHEMA = {
    "type": "object",
    "required": ["seed", "model", "task"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "model": {"enum": list(MODELS)},
        "task": {"enum": list(TASKS)},
        "check": {"enum": sorted(CHECKS)},
        "law": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["fixed_length", "length_law", "multi_component", "disk", "convex_polygon", "square", "fixed_set"]},
                "length": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, _length_law]},
                "radius": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, _length_law]},
                "side": {"type": "number", "exclusiveMinimum": 0},
                "random_rotation": {"type": "boolean"},
                "vertices": {"type": "array", "minItems": 3, "items": {"type": "array", "minItems": 2, "maxItems": 2}},
                "components": {"type": "array", "minItems": 1},
            },
        },
        "mark": {
            "type": ["object", "null"],
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["boundary_surface", "corner_counting", "colour_lebesgue", "colour", "seeds", "density"]},
                "p": {"type": "number", "minimum": 0, "maximum": 1},
                "q": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "offsets": {"type": "array", "minItems": 1},
                "values": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                "probs": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
            },
        },
        "window": {
            "oneOf": [
                {"type": "number", "exclusiveMinimum": 0},
                {"type": "array", "minItems": 1, "maxItems": 2, "items": {"type": "number", "exclusiveMinimum": 0}},
            ]
        },
        "replicates": {"type": "integer", "minimum": 1},
        "threshold": {"type": "number", "exclusiveMinimum": 0},
        "retry": {"type": "boolean"},
        "params": {"type": "object"},
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "format": {"enum": ["csv", "json"]}},
        },
    },
    "allOf": [
        {"if": {"properties": {"task": {"const": "verify"}}}, "then": {"required": ["check"]}},
        {"if": {"properties": {"model": {"enum": ["dlm1d", "dlm2d", "dlrm"]}}}, "then": {"required": ["law", "window"]}},
        {"if": {"properties": {"model": {"const": "dlrm"}}}, "then": {"required": ["mark"]}},
    ],
}


class ConfigError(ValueError):
    pass


def load_config(path: str | os.PathLike) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from e
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config field '{where}': {e.message}")


# ---------------------------------------------------------------------------
# artifacts


class Artifacts:
    """Collects output files; everything but meta.json must be deterministic."""

    def __init__(self, out: Path, fmt: str):
        self.out = out
        self.fmt = fmt
        self.files: dict[str, str] = {}
        self.meta: dict = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def table(self, stem: str, header: list[str], rows: list) -> None:
        if self.fmt == "json":
            self.add(stem + ".json", json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\r\n")
            w.writerow(header)
            for r in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in r])
            self.add(stem + ".csv", buf.getvalue())

    def records(self, stem: str, records: list[dict]) -> None:
        if not records:
            self.table(stem, [], [])
            return
        header = list(records[0].keys())
        self.table(stem, header, [[_plain(r.get(k)) for k in header] for r in records])

    def write(self) -> list[Path]:
        self.out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, text in sorted(self.files.items()):
            p = self.out / name
            p.write_text(text, encoding="utf-8", newline="")
            paths.append(p)
        meta = dict(self.meta, written=datetime.now(timezone.utc).isoformat(), python=platform.python_version(),
                    numpy=np.__version__)
        (self.out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        return paths


def _plain(v):
    if v is None:
        return ""
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


# ---------------------------------------------------------------------------
# tasks


def task_simulate(cfg: dict, art: Artifacts, threads: int) -> int:
    law = law_of(cfg)
    window = window_of(cfg, law)
    rng = substream(int(cfg["seed"]), "simulate")
    model = cfg["model"]
    if model == "dlm1d":
        t = dlm1d.simulate(window, law, rng)
        art.table("cells", ["lo", "hi", "leaf", "full"], t.to_rows())
        summary = {"cells": t.n_cells, "eta": len(t.eta), "coverage_time": t.coverage_time}
    elif model == "dlm2d":
        t = dlm2d.simulate2d(window, law, rng)
        art.table("arcs", ["leaf", "kind", "p0", "p1", "p2", "p3", "p4", "length"], [_pad(r) for r in t.arc_rows()])
        art.table("branch_points", ["x", "y", "leaf_under", "leaf_over", "leaf_third"], t.branch_rows())
        summary = {"boundary_length": t.total_boundary_length, "branch_points": len(t.branch_points),
                   "coverage_time": t.coverage_time, "leaves": t.leaves.n}
    elif model == "dlrm":
        mark = mark_of(cfg, law)
        r = dlrm.simulate_dlrm((window,) if law.dim == 1 else window, law, mark, rng)
        masses = r.leaf_masses()
        art.table("leaf_masses", ["leaf", "mass"], sorted(masses.items()))
        summary = {"total": r.total(), "leaves": r.n_leaves}
        if mark.kind == "seeds":
            pts = r.visible_seeds()
            art.table("seeds", ["x"] if law.dim == 1 else ["x", "y"], pts.tolist())
            summary["visible_seeds"] = len(pts)
    else:
        raise UnsupportedCombination("simulate supports dlm1d, dlm2d and dlrm")
    art.add("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def _pad(row: tuple) -> tuple:
    # segments carry four coordinates, arcs five
    if row[1] == "segment":
        return (*row[:6], "", row[6])
    return row


def task_estimate(cfg: dict, art: Artifacts, threads: int) -> int:
    law = law_of(cfg)
    mark = mark_of(cfg, law)
    model = cfg["model"]
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    reps = int(cfg.get("replicates", 100))
    th = float(cfg.get("threshold", 3.0))
    stats = p.get("statistics", ["intensity", "variance"])
    out: list[EstimateReport] = []
    if "intensity" in stats:
        win = (window,) if model == "dlrm" and law.dim == 1 else window
        target = {"dlm1d": lambda: cf.intensity_1d(law), "dlm2d": lambda: cf.intensity_2d(law),
                  "dlrm": lambda: cf.alpha(law, mark)}[model]()
        r = estimate_intensity(model, law, win, reps, int(cfg["seed"]), mark, float(p.get("margin", 0.0)), target, threads)
        out.append(r.with_target(target, th))
    if "variance" in stats:
        tot = window_totals(model, law, mark, window, reps, Context(int(cfg["seed"]), 0, threads), "estimate")
        out.append(estimate_variance(tot[:, 0], measure_of(window, law.dim), _sigma_sq(model, law, mark), "variance", th))
    art.records("report", [r.to_dict() for r in out])
    for r in out:
        print(r.line())
    return 0


def task_verify(cfg: dict, art: Artifacts, threads: int) -> int:
    t0 = time.perf_counter()
    v = run_check(cfg, threads)
    elapsed = time.perf_counter() - t0
    art.records("report", v.records())
    if v.meta:
        art.add("details.json", json.dumps(v.meta, indent=2, sort_keys=True) + "\n")
    art.meta.update(runtime_seconds=elapsed, attempts=v.attempts, first_attempt_failures=v.first_failures)
    for r in v.rows:
        print(r.line())
    if v.attempts > 1:
        print(f"(reseeded once after: {', '.join(v.first_failures)})")
    limit = cfg.get("params", {}).get("max_runtime_seconds")
    slow = limit is not None and elapsed > float(limit)
    art.meta.update(runtime_limit_seconds=limit, runtime_ok=not slow)
    print(f"{v.name}: {v.verdict} in {elapsed:.1f} s" + (f" (over the {limit} s budget)" if slow else ""))
    return 0 if v.passed and not slow else 4


def task_evolve(cfg: dict, art: Artifacts, threads: int) -> int:
    law = law_of(cfg)
    mark = mark_of(cfg, law)
    window = window_of(cfg, law)
    p = cfg.get("params", {})
    times = np.asarray(p.get("times", [0.25 * k for k in range(9)]), dtype=float)
    paths = evolve_paths(cfg["model"], law, mark, window, times, int(cfg.get("replicates", 1)),
                         Context(int(cfg["seed"]), 0, threads))
    rows = [[i, float(t), float(v)] for i, row in enumerate(paths) for t, v in zip(times, row)]
    art.table("paths", ["replicate", "time", "total"], rows)
    return 0


def task_render(cfg: dict, art: Artifacts, threads: int) -> int:
    law = law_of(cfg)
    window = window_of(cfg, law)
    rng = substream(int(cfg["seed"]), "simulate")
    p = cfg.get("params", {})
    if cfg["model"] == "dlm1d":
        t = dlm1d.simulate(window, law, rng)
    elif cfg["model"] == "dlm2d":
        t = dlm2d.simulate2d(window, law, rng)
    else:
        raise UnsupportedCombination("render supports dlm1d and dlm2d")
    art.add("tessellation.svg", render_svg(t, shade=bool(p.get("shade", False)), size=float(p.get("size", 800))))
    return 0


HANDLERS = {"simulate": task_simulate, "estimate": task_estimate, "verify": task_verify,
            "evolve": task_evolve, "render": task_render}


def list_targets(fmt: str = "text") -> int:
    rows = cf.targets()
    if fmt == "json":
        print(json.dumps(rows, indent=2))
        return 0
    w = max(len(r["name"]) for r in rows)
    for r in rows:
        print(f"{r['name']:<{w}}  {r['value']:.10g}  {r['case']}  [{r['formula']}]")
    return 0


def run(cfg: dict, task: str | None = None, out: str | None = None, fmt: str | None = None, threads: int = 1) -> int:
    """Run one config and write its artifacts; returns the exit status."""
    task = task or cfg["task"]
    name = cfg.get("name", task)
    outdir = Path(out or cfg.get("output", {}).get("dir", os.path.join("out", name)))
    art = Artifacts(outdir, fmt or cfg.get("output", {}).get("format", "csv"))
    art.meta.update(config=cfg, task=task)
    t0 = time.perf_counter()
    status = HANDLERS[task](cfg, art, threads)
    art.meta.setdefault("runtime_seconds", time.perf_counter() - t0)
    art.write()
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deadleaves", description="Dead leaves model simulations and checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in (*TASKS, "run"):
        sp = sub.add_parser(name, help=f"{name} task from a JSON config" if name != "run" else "task named in the config")
        sp.add_argument("--config", required=True, help="experiment config (JSON)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--format", choices=["csv", "json"], help="table format")
        sp.add_argument("-v", "--verbose", action="store_true")
    lt = sub.add_parser("list-targets", help="print every closed-form target")
    lt.add_argument("--format", choices=["text", "json"], default="text")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-targets":
        return list_targets(args.format)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
            validate_config(cfg)
        task = cfg["task"] if args.command == "run" else args.command
        if task == "verify" and "check" not in cfg:
            raise ConfigError("config field 'check': required for verify tasks")
        return run(cfg, task, args.out, args.format, max(1, args.threads))
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (UnsupportedCombination, IncompatibleMark) as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # runtime failure
        log.debug("failure", exc_info=True)
        print(f"failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
