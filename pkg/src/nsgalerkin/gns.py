"""Gagliardo-Nirenberg-Sobolev interpolation inequalities on the torus.

    ||u||_{p0,s} <= C * (||D^m u||_{p1})^sigma * ||u||_{p2}^(1 - sigma),
    d/p0 - s = sigma*(d/p1 - m) + (1 - sigma)*d/p2,   s/m <= sigma <= 1.

Derivative norms use the Euclidean combination of all derivatives of a given
order (for m = 1 this is ||grad u||_p). Setting ``power = 2`` compares the
squared sides, which is the usual Ladyzhenskaya form ``||u||_4^2 <= c
||u||_2 ||grad u||_2`` in two dimensions.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .basis import build_basis
from .errors import DegenerateBalance, InvalidField, OutOfRange, ZeroFieldRatio
from .fields import Grid, PhysicalField, backward, forward, lp_norm_array

BALANCE_TOL = 1e-12


def _inverse(p) -> Fraction:
    if p == math.inf:
        return Fraction(0)
    return 1 / Fraction(p)


def _check_ranges(d, p0, p1, p2, s, m) -> None:
    if d < 1 or int(d) != d:
        raise OutOfRange(f"dimension must be a positive integer, got {d}")
    for name, p in (("p0", p0), ("p1", p1), ("p2", p2)):
        if not (p == math.inf or 1 <= p < math.inf):
            raise OutOfRange(f"{name} must lie in [1, inf], got {p}")
    if int(s) != s or int(m) != m or not 0 <= s < m:
        raise OutOfRange(f"need integers 0 <= s < m, got s={s}, m={m}")


def solve_sigma(d: int, p0, p1, p2, s: int, m: int) -> Fraction:
    """Interpolation exponent from the scaling balance (exact rational arithmetic)."""
    _check_ranges(d, p0, p1, p2, s, m)
    i0, i1, i2 = _inverse(p0), _inverse(p1), _inverse(p2)
    denom = d * i1 - m - d * i2
    if denom == 0:
        raise DegenerateBalance("d/p1 - m - d/p2 = 0: sigma is undetermined")
    sigma = (d * i0 - s - d * i2) / denom
    if not Fraction(s, m) <= sigma <= 1:
        raise OutOfRange(f"sigma = {sigma} lies outside [{Fraction(s, m)}, 1]")
    return sigma


class GNSVerdict(enum.Enum):
    OK = "ok"
    EXCLUSION_A = "exclusion_a"
    EXCLUSION_B = "exclusion_b"


@dataclass(frozen=True)
class GNSParams:
    d: int
    p0: float
    p1: float
    p2: float
    s: int
    m: int
    sigma: Fraction
    power: int = 1

    def __post_init__(self):
        _check_ranges(self.d, self.p0, self.p1, self.p2, self.s, self.m)
        sigma = Fraction(self.sigma)
        object.__setattr__(self, "sigma", sigma)
        lhs = self.d * _inverse(self.p0) - self.s
        rhs = sigma * (self.d * _inverse(self.p1) - self.m) + (1 - sigma) * self.d * _inverse(self.p2)
        if abs(float(lhs - rhs)) > BALANCE_TOL:
            raise DegenerateBalance(f"sigma={sigma} violates the scaling balance by {float(lhs - rhs):.3e}")

    @classmethod
    def solve(cls, d: int, p0, p1, p2, s: int = 0, m: int = 1, power: int = 1) -> "GNSParams":
        return cls(d, p0, p1, p2, s, m, solve_sigma(d, p0, p1, p2, s, m), power)

    @classmethod
    def ladyzhenskaya(cls, d: int = 2) -> "GNSParams":
        """||u||_4^2 <= c ||u||_2^(2-2 sigma) ||grad u||_2^(2 sigma); sigma = d/4."""
        return cls.solve(d, 4, 2, 2, 0, 1, power=2)

    def as_dict(self) -> dict:
        enc = lambda p: "inf" if p == math.inf else p  # noqa: E731
        return {"d": self.d, "p0": enc(self.p0), "p1": enc(self.p1), "p2": enc(self.p2),
                "s": self.s, "m": self.m, "sigma": str(self.sigma), "power": self.power}


def validate_params(params: GNSParams) -> GNSVerdict:
    """Flag the two parameter families where the plain inequality is unavailable.

    A: s = 0, s < d/p1, p2 = inf -- needs decay at infinity or u in some L^q.
    B: 1 <= p1 < inf, m - s - d/p1 = 0, p0 = inf, sigma = 1 -- fails.
    """
    p = params
    if (p.p1 != math.inf and p.m - p.s - p.d * _inverse(p.p1) == 0
            and p.p0 == math.inf and p.sigma == 1):
        return GNSVerdict.EXCLUSION_B
    if p.s == 0 and p.s < p.d * _inverse(p.p1) and p.p2 == math.inf:
        return GNSVerdict.EXCLUSION_A
    return GNSVerdict.OK


def derivatives(field_: PhysicalField, order: int) -> np.ndarray:
    """Stack of all ordered derivatives D_{i1}..D_{i_order} of all components."""
    g = field_.grid
    if order == 0:
        return np.array(field_.components)
    spec = forward(field_.components, g.dimension)
    syms = g.derivative_symbols()
    out = []
    for combo in itertools.product(range(g.dimension), repeat=order):
        mult = functools.reduce(np.multiply, (syms[i] for i in combo))
        out.append(backward(mult * spec, g.dimension))
    return np.concatenate(out)


@dataclass(frozen=True)
class GNSReport:
    lhs: float
    rhs: float
    ratio: float
    holds: bool


def gns_ratio(field_: PhysicalField, params: GNSParams) -> tuple[float, float]:
    """(lhs, base) with lhs = ||u||_{p0,s}^power and base = rhs without the constant."""
    if field_.grid.dimension != params.d:
        raise InvalidField(f"field dimension {field_.grid.dimension} != d={params.d}")
    g = field_.grid
    sigma = float(params.sigma)
    lhs = lp_norm_array(derivatives(field_, params.s), g, params.p0)
    top = lp_norm_array(derivatives(field_, params.m), g, params.p1)
    low = lp_norm_array(field_.components, g, params.p2)
    base = top**sigma * low ** (1.0 - sigma)
    return lhs**params.power, base**params.power


def check_inequality(field_: PhysicalField, params: GNSParams, c: float) -> GNSReport:
    lhs, base = gns_ratio(field_, params)
    if base == 0:
        raise ZeroFieldRatio("right-hand side vanishes; the ratio is undefined for this field")
    ratio = lhs / base
    return GNSReport(lhs=lhs, rhs=c * base, ratio=ratio, holds=bool(ratio <= c))


@dataclass(frozen=True)
class ConstantEstimate:
    c_lower: float
    sample_count: int
    probe_count: int
    seed: int
    params: GNSParams
    ratios: tuple[float, ...] = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {"c_lower": self.c_lower, "sample_count": self.sample_count,
                "probe_count": self.probe_count, "seed": self.seed,
                "params": self.params.as_dict(), "is_lower_bound": True}


def probe_fields(grid: Grid) -> list[PhysicalField]:
    """Deterministic probes: a sin mode per wavevector with |k|^2 <= 2, plus Taylor-Green."""
    basis = build_basis(grid.dimension, 1, grid.period)
    probes = []
    seen = set()
    for i in range(basis.n_modes):
        k = tuple(basis.wavevectors[i])
        if basis.parity[i] == 1 and basis.polarization_index[i] == 0 and k not in seen \
                and sum(c * c for c in k) <= 2:
            seen.add(k)
            e = np.zeros(basis.n_modes)
            e[i] = 1.0
            probes.append(basis.synthesize(e, grid.points_per_axis))
    s = grid.wavenumber_scale
    if grid.dimension == 2:
        tg = lambda x, y: (np.sin(s * x) * np.cos(s * y), -np.cos(s * x) * np.sin(s * y))  # noqa: E731
    else:
        tg = lambda x, y, z: (np.sin(s * x) * np.cos(s * y) * np.cos(s * z),  # noqa: E731
                              -np.cos(s * x) * np.sin(s * y) * np.cos(s * z), 0 * x)
    probes.append(PhysicalField.from_function(grid, tg))
    return probes


def sample_fields(grid: Grid, n_samples: int, seed: int, k_max: int | None = None) -> Iterator[PhysicalField]:
    """Seeded random band-limited divergence-free fields, one child stream per sample.

    Coefficients are standard normal on the basis with |k|_inf <= k_max.
    Sample i depends only on (seed, i), so prefixes are stable when
    ``n_samples`` grows.
    """
    k_max = k_max or min(3, grid.points_per_axis // 2 - 1)
    basis = build_basis(grid.dimension, k_max, grid.period)
    for child in np.random.SeedSequence(seed).spawn(n_samples):
        rng = np.random.default_rng(child)
        yield basis.synthesize(rng.standard_normal(basis.n_modes), grid.points_per_axis)


def estimate_constant(params: GNSParams, grid: Grid, n_samples: int, seed: int = 0,
                      k_max: int | None = None, include_probes: bool = True) -> ConstantEstimate:
    """Largest observed ratio over probes and seeded samples: a lower bound on C."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if grid.dimension != params.d:
        raise InvalidField(f"grid dimension {grid.dimension} != d={params.d}")
    fields_ = list(probe_fields(grid)) if include_probes else []
    n_probe = len(fields_)
    fields_.extend(sample_fields(grid, n_samples, seed, k_max))
    ratios = []
    for f in fields_:
        lhs, base = gns_ratio(f, params)
        if base > 0:
            ratios.append(lhs / base)
    return ConstantEstimate(
        c_lower=float(max(ratios)), sample_count=n_samples, probe_count=n_probe,
        seed=seed, params=params, ratios=tuple(ratios),
    )
