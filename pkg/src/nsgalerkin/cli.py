"""Batch entry point: ``nsgalerkin <scenario> --config FILE [--out DIR] [--seed N]``.

Exit codes: 0 success, 2 a certificate was computed and fails, 1 any error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .assembly import GalerkinSystem, assemble_system
from .basis import BasisSet, build_basis
from .config import SCENARIOS, RunConfig, load_config
from .errors import NSGalerkinError
from .fields import Grid, read_snapshot, write_snapshot
from .gns import GNSParams, GNSVerdict, estimate_constant, validate_params
from .initial import (seeded_random_coefficients, single_mode_coefficients,
                      taylor_green_coefficients)
from .integrate import SimConfig, run
from .quadform import certificate
from .restrict import restrict_problem
from .uniqueness import perturbation_experiment

EXIT_OK, EXIT_ERROR, EXIT_CERT_FAILS = 0, 1, 2


@dataclass
class ScenarioReport:
    exit_code: int
    summary: dict
    artifacts: list[str] = field(default_factory=list)


# --- shared builders ----------------------------------------------------------

def build_run_basis(cfg: RunConfig, dimension: int | None = None) -> BasisSet:
    if cfg.plane is not None and dimension in (None, 2):
        return build_basis(2, cfg.basis_k_max, cfg.grid.period, plane=cfg.plane)
    return build_basis(dimension or cfg.grid.dimension, cfg.basis_k_max, cfg.grid.period)


def initial_coefficients(cfg: RunConfig, basis: BasisSet) -> np.ndarray:
    ic = cfg.ic
    if ic.name == "taylor_green":
        amp = ic.args[0] if ic.args else 1.0
        return amp * taylor_green_coefficients(basis)
    if ic.name == "single_mode":
        return single_mode_coefficients(basis, ic.args)
    seed, decay = ic.args
    return seeded_random_coefficients(basis, np.random.SeedSequence([cfg.seed, seed]), decay)


def forcing_coefficients(cfg: RunConfig, basis: BasisSet) -> np.ndarray | None:
    if cfg.forcing.name == "none":
        return None
    amp = cfg.forcing.args[0] if cfg.forcing.args else 1.0
    return amp * taylor_green_coefficients(basis)


def build_system(cfg: RunConfig, basis: BasisSet) -> tuple[GalerkinSystem, SimConfig]:
    system = assemble_system(basis, forcing=forcing_coefficients(cfg, basis))
    sim = SimConfig(nu=cfg.sim.nu, dt=cfg.sim.dt, t_end=cfg.sim.t_end,
                    initial=initial_coefficients(cfg, basis), plane=cfg.plane,
                    thin=cfg.outputs.thinning)
    return system, sim


def estimate_c(cfg: RunConfig, d: int) -> float:
    """Empirical Ladyzhenskaya-type constant (a lower bound) from the master seed."""
    grid = Grid(d, cfg.grid.n, cfg.grid.period)
    return estimate_constant(GNSParams.ladyzhenskaya(d), grid, cfg.gns.n_samples, seed=cfg.seed).c_lower


# --- scenarios ----------------------------------------------------------------

def _simulate(cfg: RunConfig, out: Path) -> ScenarioReport:
    basis = build_run_basis(cfg)
    system, sim = build_system(cfg, basis)
    traj = run(sim, system)
    paths = [io.write_timeseries(out / "timeseries.csv", traj),
             io.write_csv(out / "final_coefficients.csv", ("index", "coefficient"),
                          ((i, a) for i, a in enumerate(traj.final_state)))]
    summary = {
        "scenario": "simulate", "n_modes": basis.n_modes, "lambda1": basis.lambda1,
        "final_time": traj.times[-1], "final_energy": traj.energy[-1],
        "final_l2_norm_squared": 2.0 * traj.energy[-1],
        "max_abs_balance_residual": float(np.max(np.abs(traj.balance_residual))),
        "derivative_norm": traj.derivative_norm,
    }
    paths.append(io.write_certificate(out / "summary.json", summary, cfg.hash))
    return ScenarioReport(EXIT_OK, summary, [p.name for p in paths])


def _certify(cfg: RunConfig, out: Path) -> ScenarioReport:
    d = 2 if cfg.plane is not None else cfg.grid.dimension
    basis = build_run_basis(cfg, None if cfg.plane is not None else d)
    c = cfg.certify.c if cfg.certify.c is not None else estimate_c(cfg, d)
    lam = cfg.certify.lambda1 if cfg.certify.lambda1 is not None else basis.lambda1
    a0 = cfg.certify.amplitude * initial_coefficients(cfg, basis)
    points = cfg.grid.n
    if cfg.sim.dt is not None and cfg.sim.t_end is not None:
        system, sim = build_system(cfg, basis)
        traj = run(sim.replace(initial=a0), system)
        series = list(zip(traj.snapshot_times, traj.snapshots))
    else:
        series = [(0.0, a0)]
    certs = [certificate(basis.synthesize(a, points), c, cfg.sim.nu, lam, time=t).to_json()
             for t, a in series]
    holds = all(cert["holds"] for cert in certs)
    paths = [io.write_certificate(out / "certificates.json", certs, cfg.hash)]
    summary = {"scenario": "certify", "holds": holds, "c_used": c, "lambda1": lam,
               "n_certificates": len(certs), "max_lhs": max(x["lhs"] for x in certs)}
    return ScenarioReport(EXIT_OK if holds else EXIT_CERT_FAILS, summary, [p.name for p in paths])


def _uniqueness(cfg: RunConfig, out: Path) -> ScenarioReport:
    basis = build_run_basis(cfg)
    system, sim = build_system(cfg, basis)
    if cfg.uniqueness.mode_index >= basis.n_modes:
        raise NSGalerkinError(f"uniqueness.mode_index {cfg.uniqueness.mode_index} >= n_modes {basis.n_modes}")
    c = cfg.uniqueness.c if cfg.uniqueness.c is not None else estimate_c(cfg, basis.dimension)
    _, _, cert = perturbation_experiment(sim, system, cfg.uniqueness.epsilon,
                                         cfg.uniqueness.mode_index, c_estimate=c)
    payload = {**cert.to_json(cfg.uniqueness.epsilon), "c_used": c}
    paths = [io.write_gronwall(out / "gronwall.csv", cert),
             io.write_certificate(out / "certificate.json", payload, cfg.hash)]
    return ScenarioReport(EXIT_OK if cert.holds else EXIT_CERT_FAILS,
                          {"scenario": "uniqueness", **payload}, [p.name for p in paths])


def _restrict(cfg: RunConfig, out: Path) -> ScenarioReport:
    if cfg.restrict.input is not None:
        u3d = read_snapshot(cfg.restrict.input)
    else:
        basis3 = build_basis(3, cfg.basis_k_max, cfg.grid.period)
        u3d = basis3.synthesize(initial_coefficients(cfg, basis3), cfg.grid.n)
    if u3d.grid.dimension != 3:
        raise NSGalerkinError("restrict needs a 3D input field")
    n2d = cfg.restrict.n2d or u3d.grid.points_per_axis
    problem = restrict_problem(u3d, None, cfg.plane, Grid(2, n2d, u3d.grid.period))
    write_snapshot(out / "restricted.snap", problem.u0)
    write_snapshot(out / "restricted_projected.snap", problem.u0_projected)
    report = problem.report()
    io.write_certificate(out / "restrict.json", report, cfg.hash)
    return ScenarioReport(EXIT_OK, {"scenario": "restrict", **report},
                          ["restricted.snap", "restricted_projected.snap", "restrict.json"])


def gns_payload(cfg: RunConfig) -> dict:
    g = cfg.gns
    d = g.d if g.d is not None else cfg.grid.dimension
    params = GNSParams.solve(d, g.p0, g.p1, g.p2, g.s, g.m, power=g.power)
    verdict = validate_params(params)
    out = {"sigma": str(params.sigma), "sigma_float": float(params.sigma), "verdict": verdict.value,
           "exclusion_a": verdict is GNSVerdict.EXCLUSION_A,
           "exclusion_b": verdict is GNSVerdict.EXCLUSION_B,
           "params": params.as_dict(), "c_lower": None}
    if verdict is GNSVerdict.OK and d in (2, 3):
        est = estimate_constant(params, Grid(d, cfg.grid.n, cfg.grid.period), g.n_samples, seed=cfg.seed)
        out.update(c_lower=est.c_lower, sample_count=est.sample_count, probe_count=est.probe_count,
                   seed=est.seed)
    return out


def _gns(cfg: RunConfig, out: Path) -> ScenarioReport:
    payload = gns_payload(cfg)
    io.write_certificate(out / "gns.json", payload, cfg.hash)
    return ScenarioReport(EXIT_OK, {"scenario": "gns", **payload}, ["gns.json"])


_DISPATCH = {"simulate": _simulate, "certify": _certify, "uniqueness": _uniqueness,
             "restrict": _restrict, "gns": _gns}


def run_scenario(cfg: RunConfig, out_dir: str | Path | None = None) -> ScenarioReport:
    """Execute ``cfg.scenario``, write its artifacts plus ``manifest.json``.

    Errors propagate; :func:`main` maps them to exit code 1.
    """
    out = Path(out_dir if out_dir is not None else cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    report = _DISPATCH[cfg.scenario](cfg, out)
    report.summary["config_hash"] = cfg.hash
    report.summary["exit_code"] = report.exit_code
    io.write_manifest(out / "manifest.json", cfg.hash, report.artifacts,
                      {"scenario": cfg.scenario, "seed": cfg.seed, "exit_code": report.exit_code})
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsgalerkin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out", default=None, help="output directory (overrides outputs.directory)")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides seed)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.scenario)
        if args.seed is not None:
            if args.seed < 0:
                raise NSGalerkinError("--seed must be nonnegative")
            cfg = cfg.with_seed(args.seed)
        report = run_scenario(cfg, args.out)
    except (NSGalerkinError, OSError, ValueError, FloatingPointError) as exc:
        print(f"nsgalerkin {args.scenario}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.scenario == "gns":
        sys.stdout.write(io.dumps({k: v for k, v in report.summary.items() if k != "scenario"}))
    else:
        sys.stdout.write(io.dumps(report.summary))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
