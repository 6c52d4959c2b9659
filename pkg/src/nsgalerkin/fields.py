"""Periodic grids, sampled velocity fields, spectral derivatives and norms.

All fields live on the periodic box [0, L)^d sampled at N uniform points per
axis. Derivatives are exact derivatives of the trigonometric interpolant, and
integrals use the trapezoid rule, which is exact for band-limited integrands
whose bandwidth is below the grid size.

Snapshot file layout (little-endian, no padding)::

    offset  size  type      content
    0       8     bytes     magic b"NSGSNAP1"
    8       4     uint32    dimension (2 or 3)
    12      4     uint32    points_per_axis N
    16      8     float64   period L
    24      4     uint32    component count C
    28      ...   float64   C * N**dimension samples, component-major,
                            each component row-major (C order, last axis fastest)
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidField

TWO_PI = 2.0 * np.pi

SNAPSHOT_MAGIC = b"NSGSNAP1"
_HEADER = struct.Struct("<8sIIdI")


@dataclass(frozen=True)
class Grid:
    dimension: int
    points_per_axis: int
    period: float = TWO_PI

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise InvalidField(f"dimension must be 2 or 3, got {self.dimension}")
        n = self.points_per_axis
        if int(n) != n or n < 4 or n % 2:
            raise InvalidField(f"points_per_axis must be an even integer >= 4, got {n}")
        if not self.period > 0:
            raise InvalidField(f"period must be positive, got {self.period}")
        object.__setattr__(self, "points_per_axis", int(n))
        object.__setattr__(self, "period", float(self.period))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimension

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    @property
    def volume(self) -> float:
        return self.period**self.dimension

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    @property
    def wavenumber_scale(self) -> float:
        """Physical wavenumber of integer mode 1, i.e. 2*pi/L."""
        return TWO_PI / self.period

    def coordinates(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.points_per_axis) * self.spacing
        return tuple(np.meshgrid(*([x] * self.dimension), indexing="ij"))

    def integer_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Broadcastable integer wavenumber arrays in FFT ordering."""
        n = self.points_per_axis
        k = np.fft.fftfreq(n, 1.0 / n)
        out = []
        for axis in range(self.dimension):
            shape = [1] * self.dimension
            shape[axis] = n
            out.append(k.reshape(shape))
        return tuple(out)

    def derivative_symbols(self) -> tuple[np.ndarray, ...]:
        """i*k for each axis with the Nyquist mode removed (odd derivatives)."""
        n = self.points_per_axis
        out = []
        for k in self.integer_wavenumbers():
            k = k.copy()
            k[k == -n // 2] = 0.0
            out.append(1j * self.wavenumber_scale * k)
        return tuple(out)

    def integrate(self, values: np.ndarray) -> float:
        """Trapezoid rule over the box for a scalar sample array."""
        return float(np.sum(values) * self.cell_volume)

    def with_points(self, points_per_axis: int) -> "Grid":
        return Grid(self.dimension, points_per_axis, self.period)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PhysicalField:
    """Velocity samples on a grid, shape ``(n_components, N, ..., N)``.

    The component count equals the grid dimension, except for plane-restricted
    fields which carry 3 components over 2 variables.
    """

    grid: Grid
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.ndim != self.grid.dimension + 1 or c.shape[1:] != self.grid.shape:
            raise InvalidField(
                f"components of shape {c.shape} do not match grid {self.grid.shape}"
            )
        if c.shape[0] not in (self.grid.dimension, 3):
            raise InvalidField(
                f"{c.shape[0]} components on a {self.grid.dimension}D grid"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidField("field samples must be finite")
        object.__setattr__(self, "components", _readonly(c))

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def __add__(self, other: "PhysicalField") -> "PhysicalField":
        _check_same_grid(self, other)
        return PhysicalField(self.grid, self.components + other.components)

    def __sub__(self, other: "PhysicalField") -> "PhysicalField":
        _check_same_grid(self, other)
        return PhysicalField(self.grid, self.components - other.components)

    def __mul__(self, alpha: float) -> "PhysicalField":
        return PhysicalField(self.grid, alpha * self.components)

    __rmul__ = __mul__

    def __neg__(self) -> "PhysicalField":
        return PhysicalField(self.grid, -self.components)

    @classmethod
    def zeros(cls, grid: Grid, n_components: int | None = None) -> "PhysicalField":
        n = grid.dimension if n_components is None else n_components
        return cls(grid, np.zeros((n,) + grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "PhysicalField":
        """Sample ``func(*coords) -> sequence of component arrays``."""
        coords = grid.coordinates()
        comps = [np.broadcast_to(np.asarray(c, dtype=float), grid.shape) for c in func(*coords)]
        return cls(grid, np.stack(comps))


def _check_same_grid(a: PhysicalField, b: PhysicalField) -> None:
    if a.grid != b.grid or a.n_components != b.n_components:
        raise InvalidField("fields live on different grids or have different component counts")


@dataclass(frozen=True, eq=False)
class GradientTensor:
    """``entries[i, k] = D_i v_k``; shape ``(dimension, n_components, *grid.shape)``."""

    grid: Grid
    entries: np.ndarray = field(repr=False)

    def trace(self) -> np.ndarray:
        d = min(self.entries.shape[0], self.entries.shape[1])
        return sum(self.entries[i, i] for i in range(d))

    def entry_norms(self) -> np.ndarray:
        """L2 norm of every entry D_i v_k over the box."""
        sq = np.sum(self.entries**2, axis=tuple(range(2, self.entries.ndim)))
        return np.sqrt(sq * self.grid.cell_volume)


@dataclass(frozen=True)
class NormReport:
    l2: float
    l4: float
    h1_semi: float


def forward(values: np.ndarray, dimension: int) -> np.ndarray:
    """Normalised FFT over the trailing axes: values = sum_k F_k exp(i k.x)."""
    axes = tuple(range(-dimension, 0))
    n = values.shape[-1]
    return np.fft.fftn(values, axes=axes) / n**dimension


def backward(spectrum: np.ndarray, dimension: int) -> np.ndarray:
    axes = tuple(range(-dimension, 0))
    n = spectrum.shape[-1]
    return np.fft.ifftn(spectrum, axes=axes).real * n**dimension


def resample(values: np.ndarray, dimension: int, points: int) -> np.ndarray:
    """Trigonometric interpolation of samples onto ``points`` per axis.

    Modes with |k| >= N/2 (the Nyquist plane) are dropped, so the result is
    the band-limited interpolant for both up- and down-sampling.
    """
    n = values.shape[-1]
    if points == n:
        return np.array(values, dtype=float)
    spec = forward(values, dimension)
    keep = min(n, points)
    kmax = keep // 2 - 1 if keep % 2 == 0 else keep // 2
    idx = np.concatenate([np.arange(0, kmax + 1), np.arange(-kmax, 0)])
    out = np.zeros(values.shape[:-dimension] + (points,) * dimension, dtype=complex)
    src = np.ix_(*([idx % n] * dimension))
    dst = np.ix_(*([idx % points] * dimension))
    lead = (slice(None),) * (values.ndim - dimension)
    out[lead + dst] = spec[lead + src]
    return backward(out, dimension)


def _validated(field_: PhysicalField) -> PhysicalField:
    if not isinstance(field_, PhysicalField):
        raise InvalidField(f"expected PhysicalField, got {type(field_).__name__}")
    return field_


def gradient(field_: PhysicalField) -> GradientTensor:
    f = _validated(field_)
    g = f.grid
    spec = forward(f.components, g.dimension)
    entries = np.stack([backward(sym * spec, g.dimension) for sym in g.derivative_symbols()])
    entries.flags.writeable = False
    return GradientTensor(g, entries)


def divergence(field_: PhysicalField) -> np.ndarray:
    f = _validated(field_)
    if f.n_components != f.grid.dimension:
        raise InvalidField(
            "divergence needs one component per axis; use restrict.restricted_divergence "
            "for plane-restricted fields"
        )
    spec = forward(f.components, f.grid.dimension)
    syms = f.grid.derivative_symbols()
    total = sum(syms[i] * spec[i] for i in range(f.grid.dimension))
    return backward(total, f.grid.dimension)


def l2_norm(field_: PhysicalField) -> float:
    f = _validated(field_)
    return float(np.sqrt(f.grid.integrate(np.sum(f.components**2, axis=0))))


def l2_norm_spectral(field_: PhysicalField) -> float:
    """L2 norm from Fourier coefficients (Parseval)."""
    f = _validated(field_)
    spec = forward(f.components, f.grid.dimension)
    return float(np.sqrt(f.grid.volume * np.sum(np.abs(spec) ** 2)))


def lp_norm(field_: PhysicalField, p: float) -> float:
    """L^p norm of the pointwise Euclidean magnitude of the field."""
    f = _validated(field_)
    return lp_norm_array(f.components, f.grid, p)


def lp_norm_array(values: np.ndarray, grid: Grid, p: float) -> float:
    """L^p norm of the Euclidean magnitude of a component stack ``(C, *grid.shape)``.

    Even integer p is evaluated on a grid refined by p/2 so the quadrature is
    exact for the trigonometric interpolant; other finite p use the stored
    samples, and p = inf takes the sample maximum.
    """
    if not p >= 1:
        raise InvalidField(f"L^p norms need p >= 1, got {p}")
    if np.isinf(p):
        return float(np.sqrt(np.max(np.sum(values**2, axis=0))))
    if p % 2 == 0 and p > 2:
        points = grid.points_per_axis * int(p) // 2
        values = resample(values, grid.dimension, points)
        grid = grid.with_points(points)
    mag2 = np.sum(values**2, axis=0)
    integrand = mag2 if p == 2 else mag2 ** (p / 2.0)
    return float(grid.integrate(integrand) ** (1.0 / p))


def h1_seminorm(field_: PhysicalField) -> float:
    grad = gradient(field_)
    return float(np.sqrt(np.sum(grad.entry_norms() ** 2)))


def norms(field_: PhysicalField) -> NormReport:
    f = _validated(field_)
    return NormReport(l2=l2_norm(f), l4=lp_norm(f, 4), h1_semi=h1_seminorm(f))


def inner(a: PhysicalField, b: PhysicalField) -> float:
    _check_same_grid(a, b)
    return a.grid.integrate(np.sum(a.components * b.components, axis=0))


def write_snapshot(path: str | Path, field_: PhysicalField) -> None:
    f = _validated(field_)
    g = f.grid
    header = _HEADER.pack(SNAPSHOT_MAGIC, g.dimension, g.points_per_axis, g.period, f.n_components)
    data = np.ascontiguousarray(f.components, dtype="<f8").tobytes(order="C")
    try:
        Path(path).write_bytes(header + data)
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc}") from exc


def read_snapshot(path: str | Path) -> PhysicalField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise InvalidField(f"{path}: truncated snapshot header")
    magic, dim, n, period, ncomp = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise InvalidField(f"{path}: bad magic {magic!r}")
    grid = Grid(dim, n, period)
    count = ncomp * n**dim
    expected = _HEADER.size + 8 * count
    if len(raw) != expected:
        raise InvalidField(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size, count=count)
    return PhysicalField(grid, data.reshape((ncomp,) + grid.shape))
