"""Difference dynamics of two runs and the Gronwall uniqueness estimate.

For runs ``u`` and ``v`` of the same system, ``w = u - v`` obeys

    1/2 d/dt ||w||^2 + nu <-L w, w> + b(w, u, w) = 0,

where for plane-restricted runs ``b(w, u, w) = <(w1 - w3/a1) w, D1 u> +
<(w2 - w3/a2) w, D2 u>``. Bounding the trilinear term by
``c ||w|| ||grad w|| ||grad u||`` and absorbing ``nu ||grad w||^2`` with
Young's inequality gives ``y' <= 2 C ||grad u||^2 y`` for ``y = ||w||^2`` with
``C = c^2 / (4 nu)``, hence ``y(t) <= y(0) exp(2 C int_0^t ||grad u||^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import GalerkinSystem
from .basis import BasisSet
from .errors import IncompatibleRuns, MisalignedSeries
from .integrate import SimConfig, TrajectoryRecord, run


@dataclass(frozen=True, eq=False)
class DifferenceSeries:
    times: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    w_energy: np.ndarray = field(repr=False)

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(self.w_energy)


def _check_compatible(run_a: TrajectoryRecord, run_b: TrajectoryRecord) -> None:
    if run_a.dt != run_b.dt or run_a.nu != run_b.nu:
        raise IncompatibleRuns("runs differ in dt or nu")
    if run_a.snapshots.shape != run_b.snapshots.shape or \
            not np.array_equal(run_a.snapshot_steps, run_b.snapshot_steps):
        raise IncompatibleRuns("runs have different discretizations or sampling")


def difference_trajectory(run_a: TrajectoryRecord, run_b: TrajectoryRecord) -> DifferenceSeries:
    _check_compatible(run_a, run_b)
    w = run_a.snapshots - run_b.snapshots
    return DifferenceSeries(run_a.snapshot_times, w, np.sum(w * w, axis=1))


def w_energy_identity_residual(run_a: TrajectoryRecord, run_b: TrajectoryRecord,
                               system: GalerkinSystem) -> np.ndarray:
    """Residual of the difference energy identity at every stored snapshot.

    Needs unthinned runs (a snapshot at every step); the time derivative uses
    centred differences (second-order one-sided at the ends).
    """
    _check_compatible(run_a, run_b)
    if len(run_a.snapshot_steps) != len(run_a.times):
        raise IncompatibleRuns("the identity needs a snapshot at every step (thin = 1)")
    diff = difference_trajectory(run_a, run_b)
    half = 0.5 * diff.w_energy
    if not np.any(half):
        return np.zeros_like(half)
    stiff = system.stiffness_diagonal
    out = np.gradient(half, run_a.dt, edge_order=2)
    for n, (w, u) in enumerate(zip(diff.coefficients, run_a.snapshots)):
        out[n] += run_a.nu * (stiff * w) @ w + system.trilinear_form(w, u, w)
    return out


def gronwall_constant(c_estimate: float, nu: float) -> float:
    """C = c^2 / (4 nu), from absorbing nu ||grad w||^2 by Young's inequality."""
    if not c_estimate > 0 or not nu > 0:
        raise ValueError("c_estimate and nu must be positive")
    return c_estimate**2 / (4.0 * nu)


def plane_factor(plane) -> float:
    """1 + max(|1/a1|, |1/a2|): bound of the effective velocity by the velocity."""
    if plane is None:
        return 1.0
    return 1.0 + max(abs(1.0 / plane.a1), abs(1.0 / plane.a2))


def grad_energy(basis: BasisSet, coefficients: np.ndarray) -> np.ndarray:
    """||grad u||_2^2 in the grid variables for each coefficient row."""
    k2 = (2 * np.pi / basis.period) ** 2 * np.sum(basis.wavevectors.astype(float) ** 2, axis=1)
    return np.atleast_2d(coefficients) ** 2 @ k2


@dataclass(frozen=True, eq=False)
class GronwallCertificate:
    times: np.ndarray = field(repr=False)
    w_energy: np.ndarray = field(repr=False)
    envelope: np.ndarray = field(repr=False)
    C_used: float
    holds: bool
    max_ratio: float
    growth_factor: float

    def to_json(self, epsilon: float | None = None) -> dict:
        out = {"C_used": self.C_used, "max_ratio": self.max_ratio, "holds": self.holds,
               "growth_factor": self.growth_factor}
        if epsilon is not None:
            out = {"epsilon": epsilon, **out}
        return out


def gronwall_bound_check(run_u: TrajectoryRecord, w_series: DifferenceSeries, C: float,
                         basis: BasisSet, rtol: float = 1e-8) -> GronwallCertificate:
    """Compare ||w(t)||^2 with ||w(0)||^2 exp(2 C int_0^t ||grad u||^2 ds).

    The integral is accumulated with the trapezoid rule on the snapshot times.
    """
    times = run_u.snapshot_times
    if len(times) != len(w_series.times) or not np.array_equal(times, w_series.times):
        raise MisalignedSeries("w series and run are sampled at different times")
    g = grad_energy(basis, run_u.snapshots)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(times) * (g[1:] + g[:-1]))])
    factor = np.exp(2.0 * C * integral)
    y = w_series.w_energy
    envelope = y[0] * factor
    holds = bool(np.all(y <= envelope * (1.0 + rtol)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(envelope > 0, y / envelope, np.where(y > 0, np.inf, 0.0))
    return GronwallCertificate(
        times=times, w_energy=y, envelope=envelope, C_used=float(C), holds=holds,
        max_ratio=float(np.max(ratio)), growth_factor=float(factor[-1]),
    )


def perturbation_experiment(config: SimConfig, system: GalerkinSystem, epsilon: float,
                            mode_index: int = 0, C: float | None = None,
                            c_estimate: float | None = None):
    """Run base and initially perturbed configs; return (run_a, run_b, certificate).

    Either ``C`` or ``c_estimate`` must be given; ``c_estimate`` is scaled by
    :func:`plane_factor` and turned into ``C`` with :func:`gronwall_constant`.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if C is None:
        if c_estimate is None:
            raise ValueError("give C or c_estimate")
        C = gronwall_constant(c_estimate * plane_factor(system.basis.plane), config.nu)
    base = config.replace(thin=1)
    a0 = np.array(config.initial, dtype=float)
    a0[mode_index] += epsilon
    perturbed = base.replace(initial=a0)
    run_a = run(base, system, check_divergence=False)
    run_b = run(perturbed, system, check_divergence=False)
    cert = gronwall_bound_check(run_a, difference_trajectory(run_a, run_b), C, system.basis)
    return run_a, run_b, cert
