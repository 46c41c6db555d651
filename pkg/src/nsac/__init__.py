"""Two-dimensional laboratory for the mass-conserving Navier-Stokes/Allen-Cahn
system, its sharp-interface limit and the matched-asymptotics construction."""

from .potential import Potential, sigma_from_potential
from .profiles import ProfileTable, build_profiles, solve_theta0, solve_theta1, solve_c1

__version__ = "0.1.0"

__all__ = [
    "Potential",
    "ProfileTable",
    "build_profiles",
    "sigma_from_potential",
    "solve_c1",
    "solve_theta0",
    "solve_theta1",
]
