"""Restriction of 3D fields and dynamics to a plane x3 = b - a1*x1 - a2*x2.

Along the plane the third derivative is replaced by ``-D1/a1 - D2/a2``, so the
restricted velocity keeps three components but depends on (x1, x2) only. The
Laplacian becomes ``(1 + a1^-2) D1^2 + (1 + a2^-2) D2^2 + 2 a1^-1 a2^-1 D1 D2``
and incompressibility becomes

    D1(u1 - u3/a1) + D2(u2 - u3/a2) = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .assembly import EllipticParams
from .basis import BasisSet, build_basis, leray_project
from .errors import DegeneratePlane, InvalidField, UnsupportedOrientation
from .fields import Grid, PhysicalField, backward, forward, l2_norm


@dataclass(frozen=True)
class Hyperplane:
    """Normalised plane x3 = b - a1*x1 - a2*x2 with a1, a2 nonzero."""

    a1: float
    a2: float
    b: float = 0.0

    def __post_init__(self):
        for name in ("a1", "a2"):
            v = float(getattr(self, name))
            if v == 0.0 or not np.isfinite(v):
                raise UnsupportedOrientation(f"normalised coefficient {name}={v} is not allowed")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "b", float(self.b))

    def height(self, x1, x2):
        return self.b - self.a1 * x1 - self.a2 * x2

    def elliptic(self) -> EllipticParams:
        return EllipticParams.from_plane(self)

    def as_dict(self) -> dict:
        return {"a1": self.a1, "a2": self.a2, "b": self.b}


def make_hyperplane(a1: float, a2: float, a3: float, b: float) -> Hyperplane:
    """Normalise a1*x1 + a2*x2 + a3*x3 = b by a3."""
    if a3 == 0:
        raise DegeneratePlane("a3 = 0: the plane is not a graph over (x1, x2)")
    n1, n2 = a1 / a3, a2 / a3
    if n1 == 0 or n2 == 0:
        raise UnsupportedOrientation(
            f"normalised coefficients ({n1}, {n2}) contain a zero; such planes are rejected"
        )
    return Hyperplane(n1, n2, b / a3)


@dataclass(frozen=True)
class D3Substitution:
    """D3 -> first[0]*D1 + first[1]*D2 and D3^2 -> s11*D1^2 + s22*D2^2 + s12*D1*D2."""

    first: tuple[Fraction, Fraction]
    second: tuple[Fraction, Fraction, Fraction]

    def compose_first(self) -> tuple[Fraction, Fraction, Fraction]:
        """Square of the first-order rule, as (D1^2, D2^2, D1*D2) coefficients."""
        p, q = self.first
        return (p * p, q * q, 2 * p * q)


def substitute_d3(plane: Hyperplane) -> D3Substitution:
    i1 = 1 / Fraction(plane.a1)
    i2 = 1 / Fraction(plane.a2)
    return D3Substitution(first=(-i1, -i2), second=(i1 * i1, i2 * i2, 2 * i1 * i2))


def restrict_field(u3d: PhysicalField, plane: Hyperplane, grid2d: Grid) -> PhysicalField:
    """Evaluate the trigonometric interpolant of ``u3d`` on the plane.

    Returns the 3 components sampled at (x1, x2, b - a1*x1 - a2*x2) on
    ``grid2d``, with periodic wrap. Nyquist modes of the input are dropped.
    """
    g3 = u3d.grid
    if g3.dimension != 3 or u3d.n_components != 3:
        raise InvalidField("restrict_field needs a 3-component field on a 3D grid")
    if grid2d.dimension != 2 or not np.isclose(grid2d.period, g3.period, rtol=1e-14, atol=0):
        raise InvalidField("grid2d must be two-dimensional with the same period")
    n, m = g3.points_per_axis, grid2d.points_per_axis
    spec = forward(u3d.components, 3)
    kmax = min(n, m) // 2 - 1
    idx = np.concatenate([np.arange(0, kmax + 1), np.arange(-kmax, 0)])
    k3 = np.fft.fftfreq(n, 1.0 / n)
    keep3 = np.abs(k3) < n // 2
    partial = np.zeros((3, m, m, n), dtype=complex)
    partial[np.ix_(range(3), idx % m, idx % m, np.flatnonzero(keep3))] = \
        spec[np.ix_(range(3), idx % n, idx % n, np.flatnonzero(keep3))]
    cols = np.fft.ifft2(partial, axes=(1, 2)) * m * m
    x1, x2 = grid2d.coordinates()
    x3 = plane.height(x1, x2)
    phase = np.exp(1j * g3.wavenumber_scale * x3[..., None] * k3[None, None, :])
    values = np.einsum("cijk,ijk->cij", cols, phase).real
    return PhysicalField(grid2d, values)


def restricted_divergence(u_l: PhysicalField, plane: Hyperplane) -> np.ndarray:
    g = u_l.grid
    if g.dimension != 2 or u_l.n_components != 3:
        raise InvalidField("restricted divergence needs 3 components over 2 variables")
    v1 = u_l.components[0] - u_l.components[2] / plane.a1
    v2 = u_l.components[1] - u_l.components[2] / plane.a2
    s1, s2 = g.derivative_symbols()
    return backward(s1 * forward(v1, 2) + s2 * forward(v2, 2), 2)


def solenoidal_from_stream(psi: np.ndarray, u_l3: np.ndarray, plane: Hyperplane,
                           grid: Grid) -> PhysicalField:
    """u1 = D2 psi + u3/a1, u2 = -D1 psi + u3/a2, u3 = u_l3; satisfies the constraint."""
    psi = np.broadcast_to(np.asarray(psi, dtype=float), grid.shape)
    u3 = np.broadcast_to(np.asarray(u_l3, dtype=float), grid.shape)
    s1, s2 = grid.derivative_symbols()
    ps = forward(psi, 2)
    d1 = backward(s1 * ps, 2)
    d2 = backward(s2 * ps, 2)
    return PhysicalField(grid, np.stack([d2 + u3 / plane.a1, -d1 + u3 / plane.a2, u3]))


def project_constraint(u_l: PhysicalField, plane: Hyperplane) -> tuple[PhysicalField, float]:
    """Mode-wise removal of the constraint-violating part; returns (field, removed L2 norm)."""
    projected = leray_project(u_l, plane)
    return projected, l2_norm(u_l - projected)


@dataclass(frozen=True, eq=False)
class RestrictedProblem:
    plane: Hyperplane
    elliptic: EllipticParams
    u0: PhysicalField = field(repr=False)
    u0_projected: PhysicalField = field(repr=False)
    forcing: PhysicalField | None = field(repr=False)
    constraint_residual: float
    projected_residual: float
    removed_norm: float

    @staticmethod
    def effective_velocity(u_l: PhysicalField, plane: Hyperplane) -> np.ndarray:
        c = u_l.components
        return np.stack([c[0] - c[2] / plane.a1, c[1] - c[2] / plane.a2])

    def basis(self, k_max: int) -> BasisSet:
        return build_basis(2, k_max, self.u0.grid.period, plane=self.plane)

    def initial_coefficients(self, basis: BasisSet) -> np.ndarray:
        return basis.analyze(self.u0_projected)

    def forcing_coefficients(self, basis: BasisSet) -> np.ndarray | None:
        return None if self.forcing is None else basis.analyze(self.forcing)

    def report(self) -> dict:
        e = self.elliptic
        return {
            "plane": self.plane.as_dict(),
            "elliptic_params": {"c11": e.c11, "c22": e.c22, "c12": e.c12},
            "constraint_residual": self.constraint_residual,
            "projected_residual": self.projected_residual,
            "removed_norm": self.removed_norm,
        }


def restrict_problem(u0_3d: PhysicalField, f_3d: PhysicalField | None, plane: Hyperplane,
                     grid2d: Grid) -> RestrictedProblem:
    u0 = restrict_field(u0_3d, plane, grid2d)
    projected, removed = project_constraint(u0, plane)
    f_l = None if f_3d is None else restrict_field(f_3d, plane, grid2d)
    return RestrictedProblem(
        plane=plane,
        elliptic=plane.elliptic(),
        u0=u0,
        u0_projected=projected,
        forcing=f_l,
        constraint_residual=float(np.max(np.abs(restricted_divergence(u0, plane)))),
        projected_residual=float(np.max(np.abs(restricted_divergence(projected, plane)))),
        removed_norm=removed,
    )
