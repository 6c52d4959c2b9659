"""Discrete Galerkin system: mass, stiffness, trilinear tensor, forcing.

With coefficients ``a`` on an orthonormal basis the semi-discrete equations are

    da_i/dt = -nu * d_i * a_i - sum_jk h_ijk a_j a_k + f_i

where ``d`` is the (diagonal) stiffness, ``h_ijk = b(w_j, w_k, w_i)`` and
``b(u, v, w) = <(adv(u) . grad) v, w>``. For ordinary fields ``adv(u) = u``;
for plane-restricted fields ``adv(u) = (u1 - u3/a1, u2 - u3/a2)`` acting on
(D1, D2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .basis import BasisSet, PlaneLike
from .errors import AliasingError, InvalidField, NonSolenoidalInput, NotElliptic
from .fields import PhysicalField, backward, forward, lp_norm, resample

DENSE_TRILINEAR_MAX = 200


@dataclass(frozen=True)
class EllipticParams:
    """Coefficients of c11*D1^2 + c22*D2^2 + c12*D1*D2 (before the factor nu)."""

    c11: float = 1.0
    c22: float = 1.0
    c12: float = 0.0

    @classmethod
    def laplacian(cls) -> "EllipticParams":
        return cls(1.0, 1.0, 0.0)

    @classmethod
    def from_plane(cls, plane: PlaneLike) -> "EllipticParams":
        i1, i2 = 1.0 / plane.a1, 1.0 / plane.a2
        return cls(1.0 + i1 * i1, 1.0 + i2 * i2, 2.0 * i1 * i2)

    def symbol(self, k) -> np.ndarray:
        """Symbol in integer wavenumber units (multiply by (2*pi/L)^2)."""
        k = np.asarray(k, dtype=float)
        return self.c11 * k[..., 0] ** 2 + self.c22 * k[..., 1] ** 2 + self.c12 * k[..., 0] * k[..., 1]

    @property
    def is_laplacian(self) -> bool:
        return (self.c11, self.c22, self.c12) == (1.0, 1.0, 0.0)


def effective_velocity(values: np.ndarray, plane: PlaneLike | None, dimension: int) -> np.ndarray:
    """Advecting velocity from component samples on axis -2 (..., n_components, P)."""
    if plane is None:
        return values[..., :dimension, :]
    u1 = values[..., 0, :] - values[..., 2, :] / plane.a1
    u2 = values[..., 1, :] - values[..., 2, :] / plane.a2
    return np.stack([u1, u2], axis=-2)


def _resolve_advection(basis: BasisSet, advection_map) -> PlaneLike | None:
    if advection_map is None:
        return basis.plane
    if isinstance(advection_map, str):
        if advection_map != "standard":
            raise ValueError(f"unknown advection map {advection_map!r}")
        if basis.n_components != basis.dimension:
            raise InvalidField("standard advection needs one component per axis")
        return None
    return advection_map


def assemble_mass(basis: BasisSet) -> np.ndarray:
    """Gram matrix <w_i, w_j> by exact quadrature."""
    values, _ = basis.mode_table(basis.min_points)
    flat = values.reshape(basis.n_modes, -1)
    return flat @ flat.T * basis.grid().cell_volume


def assemble_stiffness(basis: BasisSet, elliptic: EllipticParams | None = None) -> np.ndarray:
    """Diagonal stiffness matrix <-L w_j, w_i> for the elliptic operator L."""
    scale = (2.0 * np.pi / basis.period) ** 2
    if elliptic is None:
        diag = basis.eigenvalues.copy()
    elif basis.dimension == 2:
        diag = scale * elliptic.symbol(basis.wavevectors)
    elif elliptic.is_laplacian:
        diag = scale * np.sum(basis.wavevectors.astype(float) ** 2, axis=1)
    else:
        raise NotElliptic("anisotropic elliptic parameters are defined for 2D bases only")
    bad = np.flatnonzero(diag <= 0)
    if bad.size:
        k = tuple(basis.wavevectors[bad[0]])
        raise NotElliptic(f"nonpositive symbol {diag[bad[0]]:.3g} at k={k}")
    return np.diag(diag)


def assemble_trilinear(basis: BasisSet, advection_map=None, points: int | None = None) -> np.ndarray:
    """Dense tensor ``h[i, j, k] = <(adv(w_j) . grad) w_k, w_i>``.

    ``points`` is the quadrature grid; it must exceed 3*k_max so every triple
    product is integrated exactly. Defaults to the 3/2-padded grid.
    """
    plane = _resolve_advection(basis, advection_map)
    m = points or basis.dealiased_points
    if m <= 3 * basis.k_max:
        raise AliasingError(f"{m} quadrature points alias triple products at k_max={basis.k_max}")
    values, derivs = basis.mode_table(m)
    adv = effective_velocity(values, plane, basis.dimension)
    n = basis.n_modes
    cell = basis.grid(m).cell_volume
    h = np.empty((n, n, n))
    for j in range(n):
        conv = np.einsum("lp,klcp->kcp", adv[j], derivs)
        h[:, j, :] = np.einsum("kcp,icp->ik", conv, values) * cell
    return h


def nonlinear_pseudospectral(basis: BasisSet, a: np.ndarray, points: int | None = None,
                             advection_map=None) -> np.ndarray:
    """``sum_jk h_ijk a_j a_k`` without forming the tensor (dealiased products)."""
    plane = _resolve_advection(basis, advection_map)
    m = points or basis.dealiased_points
    if m <= 3 * basis.k_max:
        raise AliasingError(f"{m} points alias the quadratic term at k_max={basis.k_max}")
    d = basis.dimension
    spec = basis.spectrum(a, m)
    grid = basis.grid(m)
    u = backward(spec, d)
    syms = grid.derivative_symbols()
    du = [backward(sym * spec, d) for sym in syms]
    shape = u.shape
    adv = effective_velocity(u.reshape(shape[0], -1), plane, d)
    conv = sum(adv[l].reshape(shape[1:]) * du[l] for l in range(d))
    return basis.analyze_spectrum(forward(conv, d))


@dataclass(eq=False)
class GalerkinSystem:
    basis: BasisSet
    mass: np.ndarray = field(repr=False)
    stiffness: np.ndarray = field(repr=False)
    trilinear: np.ndarray | None = field(default=None, repr=False)
    forcing: Callable[[float], np.ndarray] | None = field(default=None, repr=False)
    advection: PlaneLike | None = None
    elliptic: EllipticParams | None = None

    @property
    def n_modes(self) -> int:
        return self.basis.n_modes

    @property
    def stiffness_diagonal(self) -> np.ndarray:
        return np.diag(self.stiffness)

    def nonlinear(self, a: np.ndarray) -> np.ndarray:
        if self.trilinear is not None:
            return np.einsum("ijk,j,k->i", self.trilinear, a, a)
        return nonlinear_pseudospectral(self.basis, a, advection_map=self.advection)

    def trilinear_form(self, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
        """b(u, v, w) for coefficient vectors."""
        if self.trilinear is not None:
            return float(np.einsum("ijk,i,j,k->", self.trilinear, w, u, v))
        grid_pts = self.basis.dealiased_points
        return _trilinear_quadrature(self.basis, u, v, w, self.advection, grid_pts)

    def force(self, t: float) -> np.ndarray:
        if self.forcing is None:
            return np.zeros(self.n_modes)
        return np.asarray(self.forcing(t), dtype=float)


def _trilinear_quadrature(basis, u, v, w, plane, m) -> float:
    d = basis.dimension
    grid = basis.grid(m)
    su, sv = basis.spectrum(u, m), basis.spectrum(v, m)
    uu = backward(su, d)
    wv = backward(basis.spectrum(w, m), d)
    dv = [backward(sym * sv, d) for sym in grid.derivative_symbols()]
    adv = effective_velocity(uu.reshape(uu.shape[0], -1), plane, d)
    conv = sum(adv[l].reshape(uu.shape[1:]) * dv[l] for l in range(d))
    return grid.integrate(np.sum(conv * wv, axis=0))


def assemble_system(basis: BasisSet, elliptic: EllipticParams | None = None,
                    forcing: Callable[[float], np.ndarray] | np.ndarray | None = None,
                    dense_max: int = DENSE_TRILINEAR_MAX) -> GalerkinSystem:
    """Assemble the Galerkin system; the tensor is dense only for small bases."""
    if forcing is not None and not callable(forcing):
        const = np.array(forcing, dtype=float)
        if const.shape != (basis.n_modes,):
            raise InvalidField(f"forcing has shape {const.shape}, expected ({basis.n_modes},)")
        forcing = lambda t, _c=const: _c  # noqa: E731
    tri = assemble_trilinear(basis) if basis.n_modes <= dense_max else None
    return GalerkinSystem(
        basis=basis,
        mass=np.eye(basis.n_modes),
        stiffness=assemble_stiffness(basis, elliptic),
        trilinear=tri,
        forcing=forcing,
        advection=basis.plane,
        elliptic=elliptic,
    )


def project_forcing(f: PhysicalField | Sequence[PhysicalField], basis: BasisSet) -> np.ndarray:
    """``<f(t), w_i>`` for one field (shape (n,)) or a time series (shape (T, n))."""
    if isinstance(f, PhysicalField):
        return basis.analyze(f)
    return np.stack([basis.analyze(fi) for fi in f])


def write_trilinear(path: str | Path, h: np.ndarray, rtol: float = 1e-14) -> None:
    """Text dump ``i j k value`` of entries above ``rtol * max|h|``."""
    cut = rtol * (np.abs(h).max() if h.size else 0.0)
    idx = np.argwhere(np.abs(h) > cut)
    lines = [f"{i} {j} {k} {h[i, j, k]:.17g}" for i, j, k in idx]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def boundedness_ratio(system: GalerkinSystem, u: np.ndarray, v: np.ndarray) -> float:
    """|b(u, u, v)| / (||u||_4^2 * ||grad v||_2); nan when the denominator vanishes."""
    basis = system.basis
    num = abs(system.trilinear_form(u, u, v))
    l4 = lp_norm(basis.synthesize(u), 4)
    grad_v = float(np.sqrt(np.sum(basis.eigenvalues * v**2))) if basis.plane is None else \
        _grad2_norm(basis, v)
    den = l4**2 * grad_v
    return num / den if den > 0 else float("nan")


def _grad2_norm(basis: BasisSet, a: np.ndarray) -> float:
    """||(D1, D2) u||_2 in the grid variables only."""
    k2 = (2 * np.pi / basis.period) ** 2 * np.sum(basis.wavevectors.astype(float) ** 2, axis=1)
    return float(np.sqrt(np.sum(k2 * a**2)))


def estimate_boundedness_constant(system: GalerkinSystem, n_samples: int = 20, seed: int = 0) -> float:
    """Largest observed ratio |b(u,u,v)| / (||u||_4^2 ||v||_V) over seeded pairs."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_samples):
        u, v = rng.standard_normal((2, system.n_modes))
        r = boundedness_ratio(system, u, v)
        if np.isfinite(r):
            best = max(best, r)
    return best


@dataclass(frozen=True)
class CoercivityReport:
    dirichlet_energy: float
    advection_term: float
    lhs: float
    holds: bool


def coercivity_check(u_l: PhysicalField, plane: PlaneLike, nu: float = 1.0,
                     tol: float = 1e-10) -> CoercivityReport:
    """Compare <-L u + B u, u> with nu * sum ||D1 u_i||^2 + ||D2 u_i||^2.

    ``L`` is the restricted elliptic operator and ``B`` the restricted
    advection; ``u_l`` must satisfy the restricted divergence constraint.
    """
    from .restrict import restricted_divergence

    g = u_l.grid
    if u_l.n_components != 3 or g.dimension != 2:
        raise InvalidField("coercivity check needs a 3-component field over 2 variables")
    div = restricted_divergence(u_l, plane)
    if np.max(np.abs(div)) > tol:
        raise NonSolenoidalInput(f"restricted divergence {np.max(np.abs(div)):.3e} exceeds {tol}")

    spec = forward(u_l.components, 2)
    s1, s2 = g.derivative_symbols()
    d1 = backward(s1 * spec, 2)
    d2 = backward(s2 * spec, 2)
    d3 = -d1 / plane.a1 - d2 / plane.a2
    dirichlet = nu * g.integrate(np.sum(d1**2 + d2**2, axis=0))
    extra = nu * g.integrate(np.sum(d3**2, axis=0))

    m = -(-3 * g.points_per_axis // 2)
    m += m % 2
    fine = g.with_points(m)
    up = resample(u_l.components, 2, m)
    d1p, d2p = resample(d1, 2, m), resample(d2, 2, m)
    v1 = up[0] - up[2] / plane.a1
    v2 = up[1] - up[2] / plane.a2
    advection = fine.integrate(np.sum((v1 * d1p + v2 * d2p) * up, axis=0))

    lhs = dirichlet + extra + advection
    return CoercivityReport(
        dirichlet_energy=float(dirichlet),
        advection_term=float(advection),
        lhs=float(lhs),
        holds=bool(lhs >= dirichlet - tol),
    )
