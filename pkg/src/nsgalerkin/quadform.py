"""Pointwise quadratic form of the symmetrized velocity gradient.

For a velocity ``v`` and a difference field ``w`` the form is
``F = sum_jk D_j v_k w_k w_j = w^T S w`` with ``S`` the symmetric part of the
gradient. Completing squares gives ``F = a1 wb1^2 + a2 wb2^2 + a3 wb3^2`` with

    a1 = S11,  a2 = S22 - S12^2 / S11,  a3 = det(S) / det(S[:2, :2])

(the quotients of leading principal minors) and ``wb = L^T w`` for the unit
lower-triangular ``L`` of the LDL^T factorization.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .errors import DimensionError, InvalidField
from .fields import GradientTensor, PhysicalField, gradient, resample

DEGENERATE_RTOL = 1e-12
CLASSIFY_RTOL = 1e-12


class Definiteness(enum.IntEnum):
    ZERO = 0
    POSITIVE_SEMIDEFINITE = 1
    NEGATIVE_SEMIDEFINITE = 2
    INDEFINITE = 3


@dataclass(frozen=True, eq=False)
class SymmetrizedGradient:
    """Symmetric 3x3 matrices, shape ``(*points, 3, 3)``; ``grid`` is None for bare matrices."""

    matrices: np.ndarray = field(repr=False)
    grid: object | None = None

    def norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.matrices**2, axis=(-2, -1)))


def symmetrize(grad: GradientTensor | np.ndarray) -> SymmetrizedGradient:
    """``S_ik = (D_i v_k + D_k v_i) / 2``; input entries are indexed [i, k, ...]."""
    grid = grad.grid if isinstance(grad, GradientTensor) else None
    e = np.asarray(grad.entries if isinstance(grad, GradientTensor) else grad, dtype=float)
    if e.shape[:2] != (3, 3):
        raise DimensionError(f"symmetrized gradient is defined for 3x3 gradients, got {e.shape[:2]}")
    m = np.moveaxis(e, (0, 1), (-2, -1))
    return SymmetrizedGradient(0.5 * (m + np.swapaxes(m, -1, -2)), grid)


@dataclass(frozen=True, eq=False)
class LDLFactors:
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    lower: np.ndarray = field(repr=False)
    degenerate: np.ndarray = field(repr=False)

    def transform(self, w: np.ndarray) -> np.ndarray:
        """``wb = L^T w`` for vectors on the last axis."""
        return np.einsum("...ji,...j->...i", self.lower, w)

    def form(self, w: np.ndarray) -> np.ndarray:
        """``sum_j a_j wb_j^2``; NaN where the pivots are degenerate."""
        wb = self.transform(w)
        return self.a1 * wb[..., 0] ** 2 + self.a2 * wb[..., 1] ** 2 + self.a3 * wb[..., 2] ** 2


def _as_matrices(sym) -> np.ndarray:
    m = sym.matrices if isinstance(sym, SymmetrizedGradient) else np.asarray(sym, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise DimensionError(f"expected 3x3 matrices, got trailing shape {m.shape[-2:]}")
    return m


def ldl_coefficients(sym: SymmetrizedGradient | np.ndarray) -> LDLFactors:
    """Pivots a1, a2, a3 and the completing-square transform.

    Where ``|det S[:1,:1]| <= 1e-12 ||S||`` or ``|det S[:2,:2]| <= 1e-12 ||S||^2``
    the factorization is flagged degenerate and a1..a3 are NaN; use
    :func:`classify` there.
    """
    m = _as_matrices(sym)
    s11, s12, s13 = m[..., 0, 0], m[..., 0, 1], m[..., 0, 2]
    s22, s23 = m[..., 1, 1], m[..., 1, 2]
    scale = np.sqrt(np.sum(m**2, axis=(-2, -1)))
    minor1 = s11
    minor2 = s11 * s22 - s12 * s12
    degenerate = (np.abs(minor1) <= DEGENERATE_RTOL * scale) | (
        np.abs(minor2) <= DEGENERATE_RTOL * scale**2
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        a1 = s11
        a2 = s22 - (2.0 * s12) ** 2 / (4.0 * a1)
        a3 = np.linalg.det(m) / minor2
        l21 = s12 / s11
        l31 = s13 / s11
        l32 = (s23 - s12 * s13 / s11) / a2
    nan = np.where(degenerate, np.nan, 1.0)
    lower = np.zeros(m.shape)
    lower[..., 0, 0] = lower[..., 1, 1] = lower[..., 2, 2] = 1.0
    lower[..., 1, 0] = l21 * nan
    lower[..., 2, 0] = l31 * nan
    lower[..., 2, 1] = l32 * nan
    return LDLFactors(a1 * nan, a2 * nan, a3 * nan, lower, np.asarray(degenerate))


def classify(sym: SymmetrizedGradient | np.ndarray, atol: float = 0.0):
    """Eigenvalue-based definiteness.

    Returns a :class:`Definiteness` for a single matrix, otherwise an integer
    array of codes. Eigenvalues within ``1e-12 * max|eig|`` of zero count as
    zero; matrices whose largest |eigenvalue| is ``<= atol`` are ZERO.
    """
    m = _as_matrices(sym)
    eig = np.linalg.eigvalsh(m)
    scale = np.max(np.abs(eig), axis=-1)
    tol = CLASSIFY_RTOL * scale
    psd = np.all(eig >= -tol[..., None], axis=-1)
    nsd = np.all(eig <= tol[..., None], axis=-1)
    codes = np.full(scale.shape, int(Definiteness.INDEFINITE))
    codes = np.where(psd, int(Definiteness.POSITIVE_SEMIDEFINITE), codes)
    codes = np.where(nsd, int(Definiteness.NEGATIVE_SEMIDEFINITE), codes)
    codes = np.where((scale <= atol) | (psd & nsd), int(Definiteness.ZERO), codes)
    if m.ndim == 2:
        return Definiteness(int(codes))
    return codes


def class_histogram(codes: np.ndarray) -> dict[str, int]:
    counts = np.bincount(np.ravel(codes), minlength=len(Definiteness))
    return {d.name: int(counts[d]) for d in Definiteness}


def integral_form(sym: SymmetrizedGradient, w: PhysicalField) -> float:
    """Quadrature of ``w^T S w`` over the box, on a 3/2-refined grid."""
    if sym.grid is None:
        raise InvalidField("integral_form needs a symmetrized gradient sampled on a grid")
    g = w.grid
    if g != sym.grid or w.n_components != 3:
        raise InvalidField("symmetrized gradient and w live on different grids")
    m = -(-3 * g.points_per_axis // 2)
    m += m % 2
    entries = np.moveaxis(sym.matrices, (-2, -1), (0, 1)).reshape((9,) + g.shape)
    s_fine = resample(entries, g.dimension, m).reshape((3, 3) + (m,) * g.dimension)
    w_fine = resample(w.components, g.dimension, m)
    integrand = np.einsum("j...,jk...,k...->...", w_fine, s_fine, w_fine)
    return g.with_points(m).integrate(integrand)


@dataclass(frozen=True)
class QuadFormCertificate:
    time: float
    lhs: float
    rhs: float
    holds: bool
    c_used: float
    lambda1: float
    nu: float
    pointwise_class_histogram: dict = field(default_factory=dict)
    integral_F_sign: int | None = None

    def to_json(self) -> dict:
        return asdict(self)


def gradient_norm_sum(v: PhysicalField) -> float:
    """sum_ij ||D_i v_j||_2 over all gradient entries."""
    return float(np.sum(gradient(v).entry_norms()))


def certificate(v: PhysicalField, c_estimate: float, nu: float, lambda1: float,
                time: float = 0.0, w: PhysicalField | None = None) -> QuadFormCertificate:
    """Uniqueness criterion nu * lambda1^(1/4) >= c^2 * sum_ij ||D_i v_j||_2 at one time."""
    grad = gradient(v)
    lhs = c_estimate**2 * float(np.sum(grad.entry_norms()))
    rhs = nu * lambda1**0.25
    hist: dict = {}
    sign = None
    if grad.entries.shape[:2] == (3, 3):
        sym = symmetrize(grad)
        norm = sym.norm()
        codes = classify(sym, atol=CLASSIFY_RTOL * float(norm.max()))
        hist = class_histogram(codes)
        if w is not None:
            sign = int(np.sign(integral_form(sym, w)))
    return QuadFormCertificate(
        time=float(time), lhs=lhs, rhs=float(rhs), holds=bool(rhs >= lhs),
        c_used=float(c_estimate), lambda1=float(lambda1), nu=float(nu),
        pointwise_class_histogram=hist, integral_F_sign=sign,
    )


def criterion_theorem31(trajectory: Iterable[tuple[float, PhysicalField]], c_estimate: float,
                        nu: float, lambda1: float) -> list[QuadFormCertificate]:
    """Per-snapshot criterion certificates for a sequence of (time, field) pairs."""
    return [certificate(v, c_estimate, nu, lambda1, time=t) for t, v in trajectory]


def amplitude_threshold(v: PhysicalField, c_estimate: float, nu: float, lambda1: float) -> float:
    """Scale s* at which the criterion for s*v switches from holding to failing."""
    total = gradient_norm_sum(v)
    if total == 0:
        return float("inf")
    return nu * lambda1**0.25 / (c_estimate**2 * total)
