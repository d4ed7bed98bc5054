"""Berry connection, curvature and phase of spin-parametrized Dirac wave packets."""

from ._backend import BACKEND, HAS_NUMBA
from .adiabatic import EvolutionResult, FieldPath, evolve, geometric_phase_sweep, rotating_field_exact
from .berry import (
    SOURCES,
    PhaseReport,
    boundary_line_integral,
    connection,
    connection_fd,
    connection_spinor_analytic,
    curvature_fd,
    paper_connection,
    paper_curvature,
    phase_discrete,
    phase_line_integral,
    phase_report,
    phase_stokes,
    sphere_flux,
    sphere_plaquette_flux,
    spinor_curvature,
    spinor_curvature_analytic,
)
from .dirac import DiracFamily, evaluate_wavefunction, momentum_overlap, normalized_overlap, spin_expectation
from .errors import *  # noqa: F401,F403
from .geometry import ParameterContour, SurfaceCapMesh, solid_angle
from .quadrature import QuadratureSpec, RadialProfile
from .spin import canonical_spinor, spinor_from_angles, spinor_from_cartesian, spin_vector_from_spinor

__version__ = "0.1.0"
