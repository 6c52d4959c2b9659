import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsgalerkin.assembly import assemble_mass
from nsgalerkin.basis import COS, SIN, build_basis, leray_project, stokes_eigenvalue
from nsgalerkin.errors import EmptyBasis
from nsgalerkin.fields import Grid, PhysicalField, divergence, l2_norm
from nsgalerkin.restrict import Hyperplane, restricted_divergence


def test_two_dimensional_kmax1_enumeration():
    b = build_basis(2, 1)
    ks = {tuple(k) for k in b.wavevectors}
    assert ks == {(1, 0), (0, 1), (1, 1), (1, -1)}
    # each wavevector carries a cos and a sin mode
    assert b.n_modes == 8
    assert np.all(np.bincount(b.parity) == 4)
    grid = b.grid(8)
    for i in range(b.n_modes):
        e = np.zeros(b.n_modes)
        e[i] = 1.0
        assert l2_norm(b.synthesize(e, 8)) == pytest.approx(1.0, abs=1e-14)
    assert b.lambda1 == 1.0
    assert grid.points_per_axis == 8


def test_ordering_is_documented():
    b = build_basis(2, 1)
    lines = b.manifest().splitlines()
    assert lines[:4] == ["0 0,1 -1,0 cos 1", "1 0,1 -1,0 sin 1", "2 1,0 0,1 cos 1", "3 1,0 0,1 sin 1"]
    assert np.all(np.diff(b.eigenvalues) >= 0)
    # within a wavevector cos precedes sin
    assert list(b.parity[:2]) == [COS, SIN]


@pytest.mark.parametrize("dim,kmax", [(2, 3), (3, 2)])
def test_gram_identity(dim, kmax):
    b = build_basis(dim, kmax)
    assert np.max(np.abs(assemble_mass(b) - np.eye(b.n_modes))) <= 1e-13


def test_gram_identity_restricted():
    b = build_basis(2, 2, plane=Hyperplane(1.0, 2.0))
    assert np.max(np.abs(assemble_mass(b) - np.eye(b.n_modes))) <= 1e-13
    assert b.lambda1 > 0


def test_three_dimensional_two_polarizations():
    b = build_basis(3, 1)
    # 13 half-space wavevectors, 2 polarizations, 2 parities
    assert b.n_modes == 13 * 2 * 2
    assert np.allclose(np.einsum("ij,ij->i", b.wavevectors, b.polarizations), 0, atol=1e-15)


def test_empty_basis():
    with pytest.raises(EmptyBasis):
        build_basis(2, 0)


@pytest.mark.parametrize("k,period,expected", [((1, 0), 2 * np.pi, 1.0), ((1, 1), 2 * np.pi, 2.0),
                                                ((1, 0), np.pi, 4.0)])
def test_stokes_eigenvalue(k, period, expected):
    assert stokes_eigenvalue(k, period) == pytest.approx(expected, rel=1e-15)


def test_period_scales_lambda1():
    assert build_basis(2, 2, period=np.pi).lambda1 == pytest.approx(4.0)


def test_unit_vector_synthesizes_mode():
    b = build_basis(2, 2)
    i = b.index_of((1, 0), "sin")
    e = np.zeros(b.n_modes)
    e[i] = 1.0
    f = b.synthesize(e, 8)
    x, y = f.grid.coordinates()
    amp = np.sqrt(2) / (2 * np.pi)
    # polarization of k=(1,0) is (0, 1)
    assert np.max(np.abs(f.components[1] - amp * np.sin(x))) < 1e-14
    assert np.max(np.abs(f.components[0])) < 1e-14


@given(st.integers(0, 2**31 - 1))
def test_roundtrip_random_coefficients(seed):
    b = build_basis(3, 2)
    a = np.random.default_rng(seed).standard_normal(b.n_modes)
    assert np.max(np.abs(b.analyze(b.synthesize(a, 8)) - a)) <= 1e-13


def test_analyze_zero():
    b = build_basis(2, 2)
    assert not np.any(b.analyze(PhysicalField.zeros(b.grid(8))))


def test_synthesized_fields_are_solenoidal(rng):
    b = build_basis(3, 2)
    f = b.synthesize(rng.standard_normal(b.n_modes), 8)
    assert np.max(np.abs(divergence(f))) <= 1e-12


def test_leray_kills_gradients():
    g = Grid(2, 16)
    f = PhysicalField.from_function(g, lambda x, y: (np.cos(x) * np.sin(y), np.sin(x) * np.cos(y)))
    assert np.max(np.abs(leray_project(f).components)) <= 1e-12


def test_leray_fixes_solenoidal_fields():
    g = Grid(2, 16)
    f = PhysicalField.from_function(g, lambda x, y: (np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)))
    assert np.max(np.abs(leray_project(f).components - f.components)) <= 1e-14


def test_leray_modewise_oracle():
    # (sin x1, 0) is a pure k=(1,0) mode parallel to k: it projects to zero.
    g = Grid(2, 16)
    f = PhysicalField.from_function(g, lambda x, y: (np.sin(x), 0 * y))
    assert np.max(np.abs(leray_project(f).components)) <= 1e-14
    # (sin(x1 + x2), 0): k=(1,1), k_perp=(1,-1)/sqrt2; projection = k_perp (k_perp . e1) sin = (1,-1)/2 sin
    f = PhysicalField.from_function(g, lambda x, y: (np.sin(x + y), 0 * y))
    x, y = g.coordinates()
    p = leray_project(f).components
    assert np.max(np.abs(p[0] - 0.5 * np.sin(x + y))) <= 1e-14
    assert np.max(np.abs(p[1] + 0.5 * np.sin(x + y))) <= 1e-14


@given(st.integers(0, 2**31 - 1))
def test_leray_idempotent_and_solenoidal(seed):
    g = Grid(3, 8)
    f = PhysicalField(g, np.random.default_rng(seed).standard_normal((3, 8, 8, 8)))
    p = leray_project(f)
    assert np.max(np.abs(divergence(p))) <= 1e-12
    assert np.max(np.abs(leray_project(p).components - p.components)) <= 1e-14


def test_restricted_leray_satisfies_constraint(rng):
    plane = Hyperplane(1.0, -2.0)
    g = Grid(2, 16)
    f = PhysicalField(g, rng.standard_normal((3, 16, 16)))
    p = leray_project(f, plane)
    assert np.max(np.abs(restricted_divergence(p, plane))) <= 1e-12
