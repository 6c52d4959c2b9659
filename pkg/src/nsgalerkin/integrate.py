"""Fixed-step time integration of the Galerkin system with energy diagnostics.

The stiff diagonal viscous term is integrated exactly by an integrating factor
``E = exp(-nu * d * dt)``; the quadratic term and forcing use Heun's two-stage
method on the transformed variable:

    k1 = N(a_n, t_n)
    k2 = N(E (a_n + dt k1), t_n + dt)
    a_{n+1} = E a_n + dt/2 (E k1 + k2)

with ``N(a, t) = -sum_jk h_ijk a_j a_k + f(t)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import GalerkinSystem
from .errors import DivergedError, InvalidCoefficients, InvalidField
from .fields import divergence


@dataclass(frozen=True, eq=False)
class SimConfig:
    nu: float
    dt: float
    t_end: float
    initial: np.ndarray = field(repr=False)
    forcing: Callable[[float], np.ndarray] | np.ndarray | None = field(default=None, repr=False)
    plane: object | None = None
    thin: int = 1

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.dt > self.t_end:
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        if int(self.thin) != self.thin or self.thin < 1:
            raise ValueError(f"thin must be a positive integer, got {self.thin}")
        a = np.array(self.initial, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "initial", a)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    def replace(self, **changes) -> "SimConfig":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Diagnostics at every step; coefficient snapshots every ``thin`` steps."""

    nu: float
    dt: float
    times: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)
    dirichlet: np.ndarray = field(repr=False)
    work: np.ndarray = field(repr=False)
    forcing_norm: np.ndarray = field(repr=False)
    snapshot_steps: np.ndarray = field(repr=False)
    snapshots: np.ndarray = field(repr=False)
    div_max: np.ndarray = field(repr=False)
    derivative_norm: float = 0.0

    @property
    def snapshot_times(self) -> np.ndarray:
        return self.times[self.snapshot_steps]

    @property
    def final_state(self) -> np.ndarray:
        return self.snapshots[-1]

    @property
    def balance_residual(self) -> np.ndarray:
        return energy_balance_residual(self)


def _forcing_callable(forcing, n: int):
    if forcing is None:
        return None
    if callable(forcing):
        return forcing
    const = np.array(forcing, dtype=float)
    if const.shape != (n,):
        raise InvalidCoefficients(f"forcing has shape {const.shape}, expected ({n},)")
    return lambda t: const


class _Stepper:
    def __init__(self, system: GalerkinSystem, config: SimConfig):
        self.system = system
        self.dt = config.dt
        self.decay = np.exp(-config.nu * system.stiffness_diagonal * config.dt)
        force = _forcing_callable(config.forcing, system.n_modes)
        if force is None:
            force = system.forcing
        self.force = force

    def rhs(self, a: np.ndarray, t: float) -> np.ndarray:
        out = -self.system.nonlinear(a)
        if self.force is not None:
            out = out + self.force(t)
        return out

    def __call__(self, a: np.ndarray, t: float) -> np.ndarray:
        dt, e = self.dt, self.decay
        k1 = self.rhs(a, t)
        k2 = self.rhs(e * (a + dt * k1), t + dt)
        return e * a + 0.5 * dt * (e * k1 + k2)


def step(state: np.ndarray, system: GalerkinSystem, config: SimConfig, t: float = 0.0,
         step_index: int = 0) -> np.ndarray:
    """Advance ``state`` by one ``config.dt``; the input array is not modified."""
    a = np.asarray(state, dtype=float)
    if a.shape != (system.n_modes,):
        raise InvalidCoefficients(f"state has shape {a.shape}, expected ({system.n_modes},)")
    out = _Stepper(system, config)(a.copy(), t)
    if not np.all(np.isfinite(out)):
        raise DivergedError(step_index)
    return out


def max_divergence(system: GalerkinSystem, a: np.ndarray) -> float:
    basis = system.basis
    f = basis.synthesize(a)
    if basis.plane is not None:
        from .restrict import restricted_divergence
        return float(np.max(np.abs(restricted_divergence(f, basis.plane))))
    return float(np.max(np.abs(divergence(f))))


def cfl_number(system: GalerkinSystem, a: np.ndarray, dt: float) -> float:
    f = system.basis.synthesize(a)
    umax = float(np.sqrt(np.max(np.sum(f.components**2, axis=0))))
    return dt * umax * system.basis.k_max


def run(config: SimConfig, system: GalerkinSystem, check_divergence: bool = True) -> TrajectoryRecord:
    """Integrate from ``config.initial`` to ``config.t_end`` with fixed ``dt``."""
    n = system.n_modes
    a = np.array(config.initial, dtype=float)
    if a.shape != (n,):
        raise InvalidCoefficients(f"initial state has shape {a.shape}, expected ({n},)")
    stepper = _Stepper(system, config)
    cfl = cfl_number(system, a, config.dt)
    if cfl > 0.5:
        warnings.warn(f"CFL number {cfl:.3f} exceeds 0.5", RuntimeWarning, stacklevel=2)

    steps = config.n_steps
    dt = config.dt
    times = dt * np.arange(steps + 1)
    stiff = system.stiffness_diagonal
    energy = np.empty(steps + 1)
    dirichlet = np.empty(steps + 1)
    work = np.empty(steps + 1)
    fnorm = np.empty(steps + 1)
    snap_steps = list(range(0, steps + 1, config.thin))
    if snap_steps[-1] != steps:
        snap_steps.append(steps)
    snaps = np.empty((len(snap_steps), n))
    snap_pos = {s: i for i, s in enumerate(snap_steps)}
    deriv_sq = 0.0

    for i in range(steps + 1):
        t = times[i]
        f = stepper.force(t) if stepper.force is not None else np.zeros(n)
        energy[i] = 0.5 * a @ a
        dirichlet[i] = config.nu * (stiff * a) @ a
        work[i] = f @ a
        fnorm[i] = np.sqrt(f @ f)
        if i in snap_pos:
            snaps[snap_pos[i]] = a
        if i == steps:
            break
        new = stepper(a, t)
        if not np.all(np.isfinite(new)):
            raise DivergedError(i)
        diff = (new - a) / dt
        deriv_sq += dt * (diff @ diff)
        a = new

    div = np.array([max_divergence(system, s) for s in snaps]) if check_divergence \
        else np.zeros(len(snap_steps))
    for arr in (times, energy, dirichlet, work, fnorm, snaps, div):
        arr.flags.writeable = False
    return TrajectoryRecord(
        nu=config.nu, dt=dt, times=times, energy=energy, dirichlet=dirichlet, work=work,
        forcing_norm=fnorm, snapshot_steps=np.array(snap_steps), snapshots=snaps,
        div_max=div, derivative_norm=float(np.sqrt(deriv_sq)),
    )


def energy_balance_residual(trajectory: TrajectoryRecord) -> np.ndarray:
    """d/dt(1/2 ||u||^2) + nu ||grad u||^2 - <f, u> with centred differences.

    Interior points use centred differences, the two end points second-order
    one-sided differences.
    """
    e = trajectory.energy
    if len(e) < 3:
        raise InvalidField("energy balance needs at least 3 samples")
    de = np.gradient(e, trajectory.dt, edge_order=2)
    return de + trajectory.dirichlet - trajectory.work


def apriori_envelope(trajectory: TrajectoryRecord, lambda1: float) -> np.ndarray:
    """Upper bound for ||u(t)||_2 from the energy inequality.

    d/dt ||u|| <= -nu*lambda1*||u|| + ||f||, integrated with the exact decay
    factor and trapezoid weights on the forcing norm.
    """
    rate = trajectory.nu * lambda1
    dt = trajectory.dt
    decay = np.exp(-rate * dt)
    f = trajectory.forcing_norm
    env = np.empty_like(trajectory.energy)
    env[0] = np.sqrt(2.0 * trajectory.energy[0])
    for i in range(1, len(env)):
        env[i] = decay * env[i - 1] + 0.5 * dt * (decay * f[i - 1] + f[i])
    return env
