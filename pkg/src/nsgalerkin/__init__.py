"""Spectral Galerkin laboratory for incompressible Navier-Stokes on a periodic box."""

__version__ = "0.1.0"

# ruff: noqa: F401
from .assembly import (CoercivityReport, EllipticParams, GalerkinSystem, assemble_mass,
                       assemble_stiffness, assemble_system, assemble_trilinear,
                       coercivity_check, estimate_boundedness_constant)
from .basis import BasisSet, build_basis, leray_project, stokes_eigenvalue
from .config import RunConfig, load_config, parse_config
from .errors import *  # noqa: F401,F403
from .fields import (GradientTensor, Grid, NormReport, PhysicalField, divergence, gradient,
                     l2_norm, lp_norm, norms, read_snapshot, write_snapshot)
from .gns import (ConstantEstimate, GNSParams, GNSVerdict, check_inequality, estimate_constant,
                  solve_sigma, validate_params)
from .integrate import SimConfig, TrajectoryRecord, energy_balance_residual, run, step
from .quadform import (Definiteness, QuadFormCertificate, certificate, classify,
                       criterion_theorem31, ldl_coefficients, symmetrize)
from .restrict import (Hyperplane, RestrictedProblem, make_hyperplane, project_constraint,
                       restrict_field, restrict_problem, solenoidal_from_stream, substitute_d3)
from .uniqueness import (GronwallCertificate, difference_trajectory, gronwall_bound_check,
                         gronwall_constant, perturbation_experiment)
