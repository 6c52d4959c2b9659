import json

import numpy as np

from nsgalerkin import io
from nsgalerkin.assembly import assemble_system
from nsgalerkin.basis import build_basis
from nsgalerkin.initial import seeded_random_coefficients
from nsgalerkin.integrate import SimConfig, run


def test_empty_series_header_only(tmp_path):
    p = io.write_timeseries(tmp_path / "ts.csv")
    assert p.read_text() == "t,energy,dirichlet,work,balance_residual,div_max\n"


def test_timeseries_rows_follow_snapshots(tmp_path):
    b = build_basis(2, 2)
    traj = run(SimConfig(nu=0.1, dt=1e-3, t_end=0.01, initial=seeded_random_coefficients(b, 0),
                         thin=5), assemble_system(b))
    p = io.write_timeseries(tmp_path / "ts.csv", traj)
    rows = p.read_text().splitlines()[1:]
    assert len(rows) == 3
    t, energy = (float(v) for v in rows[-1].split(",")[:2])
    assert t == traj.times[-1] and energy == traj.energy[-1]


def test_float_format_roundtrips():
    for x in (np.pi, 1e-300, -2.5e17, 0.1 + 0.2):
        assert float(io.fmt(x)) == x


def test_json_reparse_is_lossless(tmp_path):
    rng = np.random.default_rng(1)
    payload = {"values": rng.standard_normal(20), "inf": np.inf, "flag": np.bool_(True), "n": np.int64(3)}
    p = io.write_certificate(tmp_path / "c.json", payload, "abc")
    back = json.loads(p.read_text())
    assert back["values"] == payload["values"].tolist()
    assert back["inf"] == "inf" and back["flag"] is True and back["n"] == 3
    assert back["config_hash"] == "abc"


def test_certificate_list_embeds_hash(tmp_path):
    p = io.write_certificate(tmp_path / "l.json", [{"a": 1.0}, {"a": 2.0}], "h")
    assert [d["config_hash"] for d in json.loads(p.read_text())] == ["h", "h"]


def test_write_failure_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    try:
        io.write_json(blocker / "sub" / "x.json", {})
    except OSError as exc:
        assert "sub" in str(exc)
    else:
        raise AssertionError("expected OSError")
