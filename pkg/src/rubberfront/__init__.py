"""Moving-boundary diffusion solver.

Finite element solution of one-dimensional diffusant penetration into rubber
with a kinetically driven moving front, computed on a fixed domain via the
Landau transformation, with convergence studies and a residual-based a
posteriori error estimator.
"""

from .model import (CoefficientFunction, DimensionlessParams, InitialCondition,
                    PhysicalParams, PiecewiseLinear, back_transform,
                    nondimensionalize, preset, validate_assumptions)
from .mesh import Mesh, NodalFunction, build_mesh, graded_mesh, interpolate, \
    project_l2, uniform_mesh
from .assembly import FemOperators, assemble, apply_rhs, interface_velocity, \
    residual_l2sq
from .integrator import IntegratorConfig, SolverError, Trajectory, \
    energy_diagnostic, solve, solve_physical
from .error_analysis import (NORM_KINDS, ErrorReport, aposteriori_estimate,
                             convergence_study, discrete_error, observed_orders,
                             true_error_sq)

__version__ = "0.1.0"

__all__ = [
    "CoefficientFunction", "DimensionlessParams", "InitialCondition",
    "PhysicalParams", "PiecewiseLinear", "back_transform",
    "nondimensionalize", "preset", "validate_assumptions",
    "Mesh", "NodalFunction", "build_mesh", "graded_mesh", "interpolate",
    "project_l2", "uniform_mesh",
    "FemOperators", "assemble", "apply_rhs", "interface_velocity",
    "residual_l2sq",
    "IntegratorConfig", "SolverError", "Trajectory", "energy_diagnostic",
    "solve", "solve_physical",
    "NORM_KINDS", "ErrorReport", "aposteriori_estimate", "convergence_study",
    "discrete_error", "observed_orders", "true_error_sq",
    "__version__",
]
