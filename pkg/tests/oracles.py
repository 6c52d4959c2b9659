"""Independent reference computations used by several test modules."""
import numpy as np
from scipy.integrate import quad, solve_ivp

from nsgalerkin.assembly import assemble_system
from nsgalerkin.basis import build_basis
from nsgalerkin.fields import Grid
from nsgalerkin.gns import GNSParams, estimate_constant
from nsgalerkin.initial import taylor_green_coefficients
from nsgalerkin.restrict import Hyperplane


def restricted_taylor_green(k_max=2, plane=(1.0, 1.0, 0.0)):
    basis = build_basis(2, k_max, plane=Hyperplane(*plane))
    return basis, assemble_system(basis), taylor_green_coefficients(basis)


def ladyzhenskaya_c(n_samples=16, seed=0):
    return estimate_constant(GNSParams.ladyzhenskaya(2), Grid(2, 16), n_samples, seed=seed).c_lower


def envelope_growth_oracle(system, a0, nu, t_end, C):
    """exp(2 C int_0^T ||grad u||^2) from a tight adaptive ODE solve plus adaptive quadrature."""
    basis = system.basis
    d = system.stiffness_diagonal
    k2 = np.sum(basis.wavevectors.astype(float) ** 2, axis=1) * (2 * np.pi / basis.period) ** 2

    def rhs(_t, a):
        return -nu * d * a - system.nonlinear(a)

    sol = solve_ivp(rhs, (0.0, t_end), a0, method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
    integral, _ = quad(lambda t: float(k2 @ sol.sol(t) ** 2), 0.0, t_end, epsabs=0.0, epsrel=1e-13,
                       limit=400)
    return float(np.exp(2.0 * C * integral))


SCENARIO_CONFIGS = {
    "simulate": "grid.n = 8\nsim.nu = 0.1\nsim.dt = 1e-3\nsim.t_end = 0.05\nic = seeded_random(3, 1.0)\n"
                "outputs.thinning = 10\n",
    "uniqueness": "grid.n = 8\nbasis.k_max = 2\nplane = 1,1,0\nsim.nu = 0.1\nsim.dt = 1e-3\n"
                  "sim.t_end = 0.1\nuniqueness.epsilon = 1e-3\ngns.n_samples = 4\n",
    "certify": "grid.dimension = 3\ngrid.n = 8\nbasis.k_max = 2\nsim.nu = 1\nic = seeded_random(1, 2)\n"
               "gns.n_samples = 2\n",
    "gns": "grid.n = 8\ngns.n_samples = 4\n",
    "restrict": "grid.n = 8\nbasis.k_max = 2\nplane = 1,2,0.5\nic = seeded_random(2, 1)\n",
}
