import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from oracles import SCENARIO_CONFIGS as CONFIGS

from nsgalerkin.cli import main, run_scenario
from nsgalerkin.config import parse_config
from nsgalerkin.fields import read_snapshot


def _write(tmp_path, name, text):
    p = tmp_path / f"{name}.cfg"
    p.write_text(text)
    return str(p)


def _data_files(d: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


def test_simulate_taylor_green_matches_closed_form(tmp_path, capsys):
    cfg = _write(tmp_path, "tg", "grid.n = 16\nsim.nu = 0.1\nsim.dt = 1e-3\nsim.t_end = 1\nic = taylor_green\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    last = (tmp_path / "o" / "timeseries.csv").read_text().splitlines()[-1].split(",")
    t, energy = float(last[0]), float(last[1])
    assert t == 1.0
    assert 2 * energy == pytest.approx(2 * math.pi**2 * math.exp(-0.4), rel=1e-6)
    summary = json.loads(capsys.readouterr().out)
    assert summary["exit_code"] == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert "timeseries.csv" in manifest["artifacts"]


def test_uniqueness_epsilon_zero(tmp_path):
    text = CONFIGS["uniqueness"].replace("uniqueness.epsilon = 1e-3", "uniqueness.epsilon = 0")
    cfg = _write(tmp_path, "u", text)
    assert main(["uniqueness", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    cert = json.loads((tmp_path / "o" / "certificate.json").read_text())
    assert cert["holds"] is True and cert["epsilon"] == 0.0 and cert["max_ratio"] == 0.0
    assert {"C_used", "c_used", "config_hash"} <= set(cert)
    rows = (tmp_path / "o" / "gronwall.csv").read_text().splitlines()
    assert rows[0] == "t,w_energy,envelope"
    assert all(r.split(",")[1:] == ["0", "0"] for r in rows[1:])


def test_certify_large_amplitude_exit_two(tmp_path):
    text = "grid.dimension = 3\ngrid.n = 8\nsim.nu = 1\ncertify.c = 0.5\ncertify.amplitude = 100\n"
    cfg = _write(tmp_path, "c", text)
    assert main(["certify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    certs = json.loads((tmp_path / "o" / "certificates.json").read_text())
    assert certs[0]["holds"] is False and certs[0]["c_used"] == 0.5
    assert sum(certs[0]["pointwise_class_histogram"].values()) == 8**3


def test_certify_small_amplitude_with_trajectory(tmp_path):
    text = ("grid.dimension = 3\ngrid.n = 8\nbasis.k_max = 1\nsim.nu = 1\nsim.dt = 1e-2\nsim.t_end = 0.05\n"
            "certify.c = 0.5\ncertify.amplitude = 0.01\n")
    cfg = _write(tmp_path, "c", text)
    assert main(["certify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    certs = json.loads((tmp_path / "o" / "certificates.json").read_text())
    assert len(certs) == 6 and all(c["holds"] for c in certs)


def test_gns_prints_json(tmp_path, capsys):
    cfg = _write(tmp_path, "g", CONFIGS["gns"])
    assert main(["gns", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["sigma"] == "1/2" and out["verdict"] == "ok"
    assert out["c_lower"] >= 0.19497 - 1e-4


def test_gns_exclusion_reports_verdict(tmp_path, capsys):
    cfg = _write(tmp_path, "g", "gns.p0 = inf\ngns.p1 = 2\ngns.p2 = 2\n")
    assert main(["gns", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["exclusion_b"] is True and out["c_lower"] is None


def test_restrict_from_snapshot_file(tmp_path):
    from nsgalerkin.basis import build_basis
    from nsgalerkin.fields import write_snapshot
    b = build_basis(3, 2)
    snap = tmp_path / "u3d.snap"
    write_snapshot(snap, b.synthesize(np.random.default_rng(0).standard_normal(b.n_modes), 8))
    cfg = _write(tmp_path, "r", f"plane = 1,1,1,0\nrestrict.input = {snap}\nrestrict.n2d = 16\n")
    assert main(["restrict", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "restrict.json").read_text())
    assert report["elliptic_params"] == {"c11": 2.0, "c22": 2.0, "c12": 2.0}
    assert report["projected_residual"] <= 1e-12
    u = read_snapshot(tmp_path / "o" / "restricted.snap")
    assert u.grid.points_per_axis == 16 and u.n_components == 3


@pytest.mark.parametrize("scenario", sorted(CONFIGS))
def test_rerun_is_byte_identical(tmp_path, scenario):
    cfg = parse_config(CONFIGS[scenario], scenario)
    r1 = run_scenario(cfg, tmp_path / "a")
    r2 = run_scenario(cfg, tmp_path / "b")
    assert r1.exit_code == r2.exit_code
    a, b = _data_files(tmp_path / "a"), _data_files(tmp_path / "b")
    assert a and a == b


def test_seed_override_changes_random_data(tmp_path):
    cfg = _write(tmp_path, "s", CONFIGS["simulate"])
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"]) == 0
    assert _data_files(tmp_path / "a") != _data_files(tmp_path / "b")


@pytest.mark.parametrize("text", ["sim.nu = -1\n", "plane = 1,0,1,0\n", "bogus = 1\n"])
def test_errors_exit_one(tmp_path, capsys, text):
    cfg = _write(tmp_path, "bad", text)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "line 1" in capsys.readouterr().err


def test_missing_config_file_exit_one(tmp_path):
    assert main(["gns", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, "g", CONFIGS["gns"])
    proc = subprocess.run([sys.executable, "-m", "nsgalerkin", "gns", "--config", cfg, "--out",
                           str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sigma"] == "1/2"
