"""Riesz and Poisson extension quotients on balls, annuli and half-spaces."""
from .closed_forms import (
    annulus_C2_exact,
    critical_exponent,
    sharp_constant_ball,
    sharp_constants,
    theta2_ball,
)
from .errors import RieszExtError
from .functionals import (
    Verdict,
    c2_functional,
    isoperimetric_conformal,
    optimize_two_level,
    poisson_quotient,
    rayleigh_J2,
)
from .geometry import DomainKind, DomainSpec, polar_reduce_sphere_integral
from .operators import (
    BoundaryFunction,
    InteriorField,
    extend_riesz,
    harmonic_extend,
    restrict_riesz,
)
from .solver import SolverConfig, continuation_to_critical, el_step, solve_subcritical

__version__ = "0.1.0"
