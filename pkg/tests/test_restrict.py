from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsgalerkin.assembly import EllipticParams, assemble_stiffness, assemble_system
from nsgalerkin.basis import build_basis
from nsgalerkin.errors import DegeneratePlane, UnsupportedOrientation
from nsgalerkin.fields import Grid, PhysicalField
from nsgalerkin.integrate import SimConfig, run
from nsgalerkin.restrict import (Hyperplane, make_hyperplane, project_constraint, restrict_field,
                                 restrict_problem, restricted_divergence, solenoidal_from_stream,
                                 substitute_d3)

nonzero = st.floats(0.2, 5.0).flatmap(lambda x: st.sampled_from([x, -x]))


def test_make_hyperplane_examples():
    assert make_hyperplane(1, 1, 1, 0) == Hyperplane(1.0, 1.0, 0.0)
    assert make_hyperplane(2, 4, 2, 6) == Hyperplane(1.0, 2.0, 3.0)
    with pytest.raises(UnsupportedOrientation):
        make_hyperplane(1, 0, 1, 0)
    with pytest.raises(DegeneratePlane):
        make_hyperplane(1, 1, 0, 0)
    with pytest.raises(UnsupportedOrientation):
        Hyperplane(0.0, 1.0)


def test_substitute_d3_examples():
    s = substitute_d3(Hyperplane(1.0, 1.0))
    assert s.first == (-1, -1)
    s = substitute_d3(Hyperplane(1.0, 2.0))
    assert s.second == (Fraction(1), Fraction(1, 4), Fraction(1))


@given(nonzero, nonzero)
def test_substitute_d3_self_consistent(a1, a2):
    s = substitute_d3(Hyperplane(a1, a2))
    assert s.compose_first() == s.second


def test_restrict_constant_and_linearity(rng):
    g3, g2 = Grid(3, 8), Grid(2, 8)
    const = PhysicalField(g3, np.broadcast_to(np.array([1.0, -2.0, 0.5])[:, None, None, None], (3, 8, 8, 8)))
    out = restrict_field(const, Hyperplane(1.0, 2.0, 0.3), g2)
    assert np.max(np.abs(out.components - np.array([1.0, -2.0, 0.5])[:, None, None])) < 1e-14
    u = PhysicalField(g3, rng.standard_normal((3, 8, 8, 8)))
    plane = Hyperplane(1.0, -1.0, 0.2)
    assert np.max(np.abs(restrict_field(2.5 * u, plane, g2).components
                         - 2.5 * restrict_field(u, plane, g2).components)) <= 1e-14 * 2.5 * 10


def test_restrict_closed_form_composition():
    g3, g2 = Grid(3, 32), Grid(2, 32)
    u = PhysicalField.from_function(g3, lambda x, y, z: (np.sin(z), 0 * x, 0 * y))
    out = restrict_field(u, Hyperplane(1.0, 1.0, 0.0), g2)
    x, y = g2.coordinates()
    assert np.max(np.abs(out.components[0] - np.sin(-x - y))) <= 1e-10


def test_restricted_divergence_examples():
    g = Grid(2, 16)
    plane = Hyperplane(1.0, 1.0, 0.0)
    c = PhysicalField(g, np.ones((3, 16, 16)))
    assert np.max(np.abs(restricted_divergence(c, plane))) < 1e-14
    x, _ = g.coordinates()
    u = PhysicalField.from_function(g, lambda x, y: (np.sin(x), 0 * y, 0 * x))
    assert np.max(np.abs(restricted_divergence(u, plane) - np.cos(x))) <= 1e-12


def test_stream_function_examples():
    g = Grid(2, 16)
    plane = Hyperplane(1.0, 1.0, 0.0)
    z = solenoidal_from_stream(0.0, 0.0, plane, g)
    assert not np.any(z.components)
    x, y = g.coordinates()
    u = solenoidal_from_stream(np.sin(x) * np.sin(y), 0 * x, plane, g)
    expect = np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y), 0 * x])
    assert np.max(np.abs(u.components - expect)) <= 1e-13


@given(st.integers(0, 2**31 - 1), nonzero, nonzero)
def test_stream_fields_satisfy_constraint(seed, a1, a2):
    rng = np.random.default_rng(seed)
    b = build_basis(2, 3)
    g = Grid(2, 16)
    psi = b.synthesize(rng.standard_normal(b.n_modes), 16).components[0]
    u3 = b.synthesize(rng.standard_normal(b.n_modes), 16).components[1]
    plane = Hyperplane(a1, a2)
    u = solenoidal_from_stream(psi, u3, plane, g)
    assert np.max(np.abs(restricted_divergence(u, plane))) <= 1e-12


@given(st.integers(0, 2**31 - 1))
def test_elliptic_symbol_positive_for_seeded_planes(seed):
    rng = np.random.default_rng(seed)
    a = rng.choice([-1.0, 1.0], 2) * rng.uniform(0.1, 10.0, 2)
    plane = Hyperplane(*a)
    b = build_basis(2, 4, plane=plane)
    assert np.min(np.diag(assemble_stiffness(b, EllipticParams.from_plane(plane)))) > 0


def test_restrict_problem_pipeline(rng):
    plane = Hyperplane(1.0, 1.0, 0.0)
    g3, g2 = Grid(3, 8), Grid(2, 8)
    zero = restrict_problem(PhysicalField.zeros(g3), None, plane, g2)
    assert not np.any(zero.u0.components) and zero.removed_norm == 0.0
    e = zero.elliptic
    assert (e.c11, e.c22, e.c12) == (2.0, 2.0, 2.0)
    b3 = build_basis(3, 2)
    u3d = b3.synthesize(rng.standard_normal(b3.n_modes), 8)
    prob = restrict_problem(u3d, u3d, plane, g2)
    assert prob.projected_residual <= 1e-12
    assert prob.removed_norm > 0
    rep = prob.report()
    assert rep["elliptic_params"] == {"c11": 2.0, "c22": 2.0, "c12": 2.0}
    basis = prob.basis(3)
    a0 = prob.initial_coefficients(basis)
    system = assemble_system(basis, forcing=prob.forcing_coefficients(basis))
    traj = run(SimConfig(nu=0.1, dt=1e-3, t_end=0.02, initial=a0), system)
    for a in traj.snapshots:
        assert abs(system.trilinear_form(a, a, a)) <= 1e-12


def test_projection_is_idempotent(rng):
    plane = Hyperplane(2.0, -0.5)
    u = PhysicalField(Grid(2, 16), rng.standard_normal((3, 16, 16)))
    p, removed = project_constraint(u, plane)
    p2, removed2 = project_constraint(p, plane)
    assert removed > 0 and removed2 <= 1e-13
    assert np.max(np.abs(p2.components - p.components)) <= 1e-14
