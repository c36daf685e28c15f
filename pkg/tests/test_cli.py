import json
import subprocess
import sys
from pathlib import Path

import pytest

from deadleaves import cli

ROOT = Path(__file__).resolve().parents[1]


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


BASE = {
    "name": "small",
    "seed": 3,
    "model": "dlm1d",
    "task": "simulate",
    "law": {"kind": "fixed_length", "length": 1.0},
    "window": 20,
}


def test_simulate_writes_artifacts(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", _write(tmp_path, BASE), "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["cells.csv", "meta.json", "summary.json"]
    text = (out / "cells.csv").read_bytes()
    assert text.startswith(b"lo,hi,leaf,full\r\n")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["cells"] == summary["eta"] + 1


def test_same_seed_same_bytes(tmp_path):
    path = _write(tmp_path, dict(BASE, model="dlm2d", law={"kind": "disk", "radius": 1.0}, window=4))
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["simulate", "--config", path, "--out", str(a)]) == 0
    assert cli.main(["simulate", "--config", path, "--out", str(b), "--threads", "3"]) == 0
    for name in ("arcs.csv", "branch_points.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_override_changes_output(tmp_path):
    path = _write(tmp_path, BASE)
    cli.main(["simulate", "--config", path, "--out", str(tmp_path / "a")])
    cli.main(["simulate", "--config", path, "--out", str(tmp_path / "b"), "--seed", "4"])
    assert (tmp_path / "a" / "cells.csv").read_bytes() != (tmp_path / "b" / "cells.csv").read_bytes()


def test_json_format(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", _write(tmp_path, BASE), "--out", str(out), "--format", "json"]) == 0
    rows = json.loads((out / "cells.json").read_text())
    assert set(rows[0]) == {"lo", "hi", "leaf", "full"}


@pytest.mark.parametrize("broken, field", [
    ({"seed": -1}, "seed"),
    ({"model": "dlm3d"}, "model"),
    ({"law": {"kind": "disk", "radius": -2}}, "law/radius"),
    ({"window": "big"}, "window"),
])
def test_schema_errors_name_the_field(tmp_path, capsys, broken, field):
    path = _write(tmp_path, dict(BASE, **broken))
    assert cli.main(["simulate", "--config", path, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert f"'{field}'" in err


def test_missing_field_and_bad_json(tmp_path, capsys):
    cfg = dict(BASE)
    del cfg["seed"]
    assert cli.main(["simulate", "--config", _write(tmp_path, cfg)]) == 2
    assert "seed" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["simulate", "--config", str(bad)]) == 2
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    verify = dict(BASE, task="verify")
    assert cli.main(["run", "--config", _write(tmp_path, verify)]) == 2


def test_unsupported_combinations(tmp_path):
    corners_on_disks = dict(BASE, model="dlrm", law={"kind": "disk", "radius": 1.0}, window=4,
                            mark={"kind": "corner_counting"})
    assert cli.main(["simulate", "--config", _write(tmp_path, corners_on_disks), "--out", str(tmp_path / "o")]) == 3
    disk_in_1d = dict(BASE, law={"kind": "disk", "radius": 1.0})
    assert cli.main(["simulate", "--config", _write(tmp_path, disk_in_1d, "b.json"), "--out", str(tmp_path / "o")]) == 3
    pcf_2d = dict(BASE, model="dlm2d", task="verify", check="pcf", law={"kind": "disk", "radius": 1.0}, replicates=2)
    assert cli.main(["verify", "--config", _write(tmp_path, pcf_2d, "c.json"), "--out", str(tmp_path / "o")]) == 3


def test_failed_verification_exits_4(tmp_path):
    # a wrong law for the check's target cannot pass: leaves of length 1 but a
    # threshold so small that sampling noise alone fails
    cfg = dict(BASE, task="verify", check="intensity", replicates=5, threshold=1e-9, retry=False, window=50)
    out = tmp_path / "v"
    assert cli.main(["verify", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 4
    report = (out / "report.csv").read_text()
    assert "fail" in report
    meta = json.loads((out / "meta.json").read_text())
    assert meta["attempts"] == 1


def test_runtime_budget_exceeded_exits_4(tmp_path):
    cfg = dict(BASE, task="verify", check="intensity", replicates=5, window=50, params={"max_runtime_seconds": 0.0})
    out = tmp_path / "v"
    assert cli.main(["verify", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 4
    meta = json.loads((out / "meta.json").read_text())
    assert meta["runtime_ok"] is False


def test_verify_retry_is_recorded(tmp_path):
    cfg = dict(BASE, task="verify", check="intensity", replicates=5, threshold=1e-9, window=50)
    out = tmp_path / "v"
    cli.main(["verify", "--config", _write(tmp_path, cfg), "--out", str(out)])
    meta = json.loads((out / "meta.json").read_text())
    assert meta["attempts"] == 2 and meta["first_attempt_failures"] == ["intensity"]


def test_estimate_evolve_render(tmp_path):
    est = dict(BASE, task="estimate", replicates=20, window=50)
    assert cli.main(["run", "--config", _write(tmp_path, est), "--out", str(tmp_path / "e")]) == 0
    assert (tmp_path / "e" / "report.csv").exists()
    ev = dict(BASE, task="evolve", replicates=2, params={"times": [0.0, 0.5, 1.0]})
    assert cli.main(["run", "--config", _write(tmp_path, ev, "ev.json"), "--out", str(tmp_path / "p")]) == 0
    lines = (tmp_path / "p" / "paths.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 3
    rd = dict(BASE, task="render")
    assert cli.main(["run", "--config", _write(tmp_path, rd, "rd.json"), "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "tessellation.svg").read_text().startswith("<?xml")


def test_list_targets(capsys):
    assert cli.main(["list-targets"]) == 0
    text = capsys.readouterr().out
    assert "sigma1_sq" in text and "0.5451774" in text
    assert cli.main(["list-targets", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert any(r["name"] == "beta3" for r in rows)


@pytest.mark.parametrize("path", sorted((ROOT / "configs").rglob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    cli.load_config(path)


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "deadleaves", "list-targets"], capture_output=True, text=True)
    assert res.returncode == 0 and "intensity_1d" in res.stdout
