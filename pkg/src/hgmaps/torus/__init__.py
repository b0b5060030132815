"""Numerical-spectral backend on elliptic curves ``C/(Z + τZ)``."""

from .backend import DEFAULT_BUMP_RADIUS, GridForm, TorusBackend
from .geometry import TorusGeometry, bump_profile, default_points, lattice_point
from .spectral import dbar_solve, del_grid
from .theta import AutomorphyFactor, ThetaBasis, theta_basis
from .weierstrass import eta_periods, eta_weierstrass, quasi_periods, weierstrass_p

__all__ = [
    "AutomorphyFactor",
    "DEFAULT_BUMP_RADIUS",
    "GridForm",
    "ThetaBasis",
    "TorusBackend",
    "TorusGeometry",
    "bump_profile",
    "dbar_solve",
    "default_points",
    "del_grid",
    "eta_periods",
    "eta_weierstrass",
    "lattice_point",
    "quasi_periods",
    "theta_basis",
    "weierstrass_p",
]
