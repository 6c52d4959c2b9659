"""Real divergence-free trigonometric Galerkin bases on the periodic box.

Each mode is ``A * e * cos(s k.x)`` or ``A * e * sin(s k.x)`` with integer
wavevector ``k`` (taken from the half-space whose first nonzero entry is
positive), ``s = 2*pi/L``, ``A = sqrt(2/|box|)`` and a unit polarization ``e``
orthogonal to the effective wavevector ``q(k)``. For ordinary fields
``q(k) = k``; for fields restricted to a plane x3 = b - a1*x1 - a2*x2 the
third derivative is replaced by ``-D1/a1 - D2/a2`` and
``q(k) = (k1, k2, -(k1/a1 + k2/a2))``.

Mode ordering is by (eigenvalue, k lexicographic, polarization, parity) with
cos before sin. In complex-exponential terms, coefficient ``c`` of a cos mode
contributes ``c*A*e/2`` at +k and -k; a sin mode contributes ``-i*c*A*e/2`` at
+k and its conjugate at -k.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .errors import EmptyBasis, InvalidCoefficients, InvalidField
from .fields import TWO_PI, Grid, PhysicalField, backward, forward

COS, SIN = 0, 1
PARITY_NAMES = ("cos", "sin")


class PlaneLike(Protocol):
    a1: float
    a2: float


def effective_wavevectors(ks: np.ndarray, plane: PlaneLike | None = None) -> np.ndarray:
    """Integer-unit wavevectors acting on the velocity components."""
    ks = np.asarray(ks, dtype=float)
    if plane is None:
        return ks
    k3 = -(ks[..., 0] / plane.a1 + ks[..., 1] / plane.a2)
    return np.concatenate([ks[..., :2], k3[..., None]], axis=-1)


def stokes_eigenvalue(k, period: float = TWO_PI, plane: PlaneLike | None = None) -> float:
    """|2*pi*q(k)/L|^2; for a plane this is the restricted elliptic symbol."""
    q = effective_wavevectors(np.asarray(k, dtype=float), plane)
    return float((TWO_PI / period) ** 2 * np.dot(q, q))


def _half_space(dimension: int, k_max: int):
    for k in itertools.product(range(-k_max, k_max + 1), repeat=dimension):
        nz = [c for c in k if c != 0]
        if nz and nz[0] > 0:
            yield k


def _polarizations(q: np.ndarray) -> list[np.ndarray]:
    if q.size == 2:
        e = np.array([-q[1], q[0]])
        return [e / np.linalg.norm(e)]
    qn = q / np.linalg.norm(q)
    axis = int(np.argmin(np.abs(q)))
    r = np.zeros(3)
    r[axis] = 1.0
    e1 = np.cross(qn, r)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(qn, e1)
    return [e1, e2 / np.linalg.norm(e2)]


@dataclass(frozen=True, eq=False)
class BasisSet:
    dimension: int
    n_components: int
    k_max: int
    period: float
    wavevectors: np.ndarray = field(repr=False)
    polarizations: np.ndarray = field(repr=False)
    polarization_index: np.ndarray = field(repr=False)
    parity: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    plane: PlaneLike | None = None

    @property
    def n_modes(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues.min())

    @property
    def volume(self) -> float:
        return self.period**self.dimension

    @property
    def amplitude(self) -> float:
        return float(np.sqrt(2.0 / self.volume))

    @property
    def min_points(self) -> int:
        """Smallest even grid size that resolves every mode without Nyquist."""
        return 2 * self.k_max + 2

    @property
    def dealiased_points(self) -> int:
        """Zero-padded size ceil(3N/2) (rounded up to even) used for products."""
        m = -(-3 * self.min_points // 2)
        return m + (m % 2)

    def grid(self, points: int | None = None) -> Grid:
        return Grid(self.dimension, points or self.min_points, self.period)

    def effective_wavevectors(self) -> np.ndarray:
        return effective_wavevectors(self.wavevectors, self.plane)

    def index_of(self, k, parity: str | int = "sin", polarization: int = 0) -> int:
        par = PARITY_NAMES.index(parity) if isinstance(parity, str) else int(parity)
        k = np.asarray(k)
        hit = np.flatnonzero(
            np.all(self.wavevectors == k, axis=1)
            & (self.parity == par)
            & (self.polarization_index == polarization)
        )
        if hit.size == 0:
            raise KeyError(f"no mode k={tuple(k)} parity={par} polarization={polarization}")
        return int(hit[0])

    def manifest(self) -> str:
        """One line per mode: ``index k polarization parity eigenvalue``."""
        lines = []
        for i in range(self.n_modes):
            k = ",".join(str(int(c)) for c in self.wavevectors[i])
            pol = ",".join(f"{c + 0.0:.17g}" for c in self.polarizations[i])
            lines.append(
                f"{i} {k} {pol} {PARITY_NAMES[self.parity[i]]} {self.eigenvalues[i]:.17g}"
            )
        return "\n".join(lines) + "\n"

    # -- synthesis / analysis -------------------------------------------------

    def spectrum(self, coeffs: np.ndarray, points: int | None = None) -> np.ndarray:
        """Normalised Fourier coefficients of the synthesized field on ``points``^d."""
        coeffs = self._check_coeffs(coeffs)
        m = points or self.min_points
        if m < self.min_points:
            raise InvalidField(f"{m} points cannot resolve k_max={self.k_max}")
        w = 0.5 * self.amplitude * coeffs
        w = np.where(self.parity == COS, w + 0j, -1j * w)
        vec = w[:, None] * self.polarizations
        spec = np.zeros((self.n_components,) + (m,) * self.dimension, dtype=complex)
        pos = tuple((self.wavevectors % m).T)
        neg = tuple((-self.wavevectors % m).T)
        for c in range(self.n_components):
            np.add.at(spec[c], pos, vec[:, c])
            np.add.at(spec[c], neg, np.conj(vec[:, c]))
        return spec

    def synthesize(self, coeffs: np.ndarray, points: int | None = None) -> PhysicalField:
        spec = self.spectrum(coeffs, points)
        grid = self.grid(spec.shape[-1])
        return PhysicalField(grid, backward(spec, self.dimension))

    def analyze(self, field_: PhysicalField) -> np.ndarray:
        """L2 projection of ``field_`` onto every mode."""
        g = field_.grid
        if g.dimension != self.dimension or field_.n_components != self.n_components:
            raise InvalidField("field shape does not match basis")
        if not np.isclose(g.period, self.period, rtol=1e-14, atol=0):
            raise InvalidField("field period does not match basis")
        if g.points_per_axis < self.min_points:
            raise InvalidField(f"{g.points_per_axis} points cannot resolve k_max={self.k_max}")
        return self.analyze_spectrum(forward(field_.components, self.dimension))

    def analyze_spectrum(self, spec: np.ndarray) -> np.ndarray:
        m = spec.shape[-1]
        fk = spec[(slice(None),) + tuple((self.wavevectors % m).T)].T
        proj = np.sum(fk * self.polarizations, axis=1)
        scale = np.sqrt(2.0 * self.volume)
        return np.where(self.parity == COS, scale * proj.real, -scale * proj.imag)

    def mode_table(self, points: int) -> tuple[np.ndarray, np.ndarray]:
        """Every mode and its derivatives sampled directly on ``points``^d.

        Returns ``values`` of shape (n, n_components, P) and ``derivs`` of
        shape (n, dimension, n_components, P) with P = points**dimension.
        Derivatives are taken in the grid variables x1..x_dimension.
        """
        g = self.grid(points)
        s = g.wavenumber_scale
        x = np.stack([c.ravel() for c in g.coordinates()])
        theta = s * (self.wavevectors @ x)
        c, sn = np.cos(theta), np.sin(theta)
        cos_mode = (self.parity == COS)[:, None]
        scalar = self.amplitude * np.where(cos_mode, c, sn)
        dscalar = self.amplitude * np.where(cos_mode, -sn, c)
        values = self.polarizations[:, :, None] * scalar[:, None, :]
        kd = s * self.wavevectors.astype(float)
        derivs = kd[:, :, None, None] * self.polarizations[:, None, :, None] * dscalar[:, None, None, :]
        return values, derivs

    def _check_coeffs(self, coeffs) -> np.ndarray:
        a = np.asarray(coeffs, dtype=float)
        if a.shape != (self.n_modes,):
            raise InvalidCoefficients(
                f"expected {self.n_modes} coefficients, got shape {a.shape}"
            )
        return a


def build_basis(dimension: int, k_max: int, period: float = TWO_PI,
                plane: PlaneLike | None = None) -> BasisSet:
    """All real divergence-free modes with 0 < |k|_inf <= k_max.

    With ``plane`` the basis spans 3-component fields over 2 variables that
    satisfy the restricted divergence constraint.
    """
    if k_max < 1 or int(k_max) != k_max:
        raise EmptyBasis(f"k_max must be a positive integer, got {k_max}")
    if dimension not in (2, 3):
        raise InvalidField(f"dimension must be 2 or 3, got {dimension}")
    if plane is not None and dimension != 2:
        raise InvalidField("plane-restricted bases are two-dimensional")
    n_comp = 3 if plane is not None else dimension
    scale = (TWO_PI / period) ** 2

    rows = []
    for k in _half_space(dimension, int(k_max)):
        q = effective_wavevectors(np.array(k, dtype=float), plane)
        lam = scale * float(q @ q)
        # exact integer key for the plain Laplacian keeps ordering portable
        key = sum(c * c for c in k) if plane is None else round(float(q @ q), 12)
        for p, e in enumerate(_polarizations(q)):
            for par in (COS, SIN):
                rows.append(((key, k, p, par), k, e, p, par, lam))
    rows.sort(key=lambda r: r[0])
    return BasisSet(
        dimension=dimension,
        n_components=n_comp,
        k_max=int(k_max),
        period=float(period),
        wavevectors=np.array([r[1] for r in rows], dtype=int),
        polarizations=np.array([r[2] for r in rows], dtype=float),
        polarization_index=np.array([r[3] for r in rows], dtype=int),
        parity=np.array([r[4] for r in rows], dtype=int),
        eigenvalues=np.array([r[5] for r in rows], dtype=float),
        plane=plane,
    )


def leray_project(field_: PhysicalField, plane: PlaneLike | None = None) -> PhysicalField:
    """Remove, mode by mode, the component parallel to the effective wavevector.

    The mean (k = 0) is kept and Nyquist modes are discarded. A 3-component
    field over 2 variables needs ``plane``.
    """
    g = field_.grid
    if field_.n_components != g.dimension and plane is None:
        raise InvalidField("plane-restricted field requires a plane")
    spec = forward(field_.components, g.dimension)
    n = g.points_per_axis
    ks = np.stack(np.meshgrid(*([np.fft.fftfreq(n, 1.0 / n)] * g.dimension), indexing="ij"))
    q = ks if plane is None else np.moveaxis(effective_wavevectors(np.moveaxis(ks, 0, -1), plane), -1, 0)
    q2 = np.sum(q**2, axis=0)
    nonzero = q2 > 0
    safe = np.where(nonzero, q2, 1.0)
    qdot = np.sum(q * spec, axis=0)
    spec = spec - np.where(nonzero, q * qdot / safe, 0.0)
    nyquist = np.any(ks == -n // 2, axis=0)
    spec[:, nyquist] = 0.0
    return PhysicalField(g, backward(spec, g.dimension))
