"""Named initial conditions as fields and as basis coefficients."""
from __future__ import annotations

import numpy as np

from .basis import BasisSet
from .errors import InvalidField
from .fields import Grid, PhysicalField


def taylor_green_field(grid: Grid) -> PhysicalField:
    """(sin x cos y, -cos x sin y) in 2D; the classical cos z-modulated vortex in 3D."""
    s = grid.wavenumber_scale
    if grid.dimension == 2:
        return PhysicalField.from_function(
            grid, lambda x, y: (np.sin(s * x) * np.cos(s * y), -np.cos(s * x) * np.sin(s * y)))
    return PhysicalField.from_function(
        grid, lambda x, y, z: (np.sin(s * x) * np.cos(s * y) * np.cos(s * z),
                               -np.cos(s * x) * np.sin(s * y) * np.cos(s * z), 0.0 * x))


def taylor_green_restricted(grid: Grid, plane) -> PhysicalField:
    """Stream function sin x sin y with zero third component on ``plane``."""
    from .restrict import solenoidal_from_stream

    s = grid.wavenumber_scale
    x, y = grid.coordinates()
    return solenoidal_from_stream(np.sin(s * x) * np.sin(s * y), 0.0 * x, plane, grid)


def taylor_green_coefficients(basis: BasisSet) -> np.ndarray:
    grid = basis.grid(max(basis.min_points, 4))
    if basis.plane is not None:
        return basis.analyze(taylor_green_restricted(grid, basis.plane))
    if basis.k_max < 1:
        raise InvalidField("Taylor-Green needs k_max >= 1")
    return basis.analyze(taylor_green_field(grid))


def single_mode_coefficients(basis: BasisSet, k, parity: str = "sin", polarization: int = 0,
                             amplitude: float = 1.0) -> np.ndarray:
    a = np.zeros(basis.n_modes)
    a[basis.index_of(k, parity, polarization)] = amplitude
    return a


def seeded_random_coefficients(basis: BasisSet, seed: int | np.random.SeedSequence, spectrum_decay: float = 1.0) -> np.ndarray:
    """Standard normal coefficients damped by |k|^-spectrum_decay."""
    rng = np.random.default_rng(seed)
    kmag = np.sqrt(np.sum(basis.wavevectors.astype(float) ** 2, axis=1))
    return rng.standard_normal(basis.n_modes) * kmag ** (-spectrum_decay)
