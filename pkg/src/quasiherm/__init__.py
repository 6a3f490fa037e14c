"""
quasiherm
=========

Numerical toolkit for time-dependent quasi-Hermitian matrices: the radius
matrix family and its exceptional point, the physical metric and Dyson map,
the Coriolis operator, evolution of state pairs in the non-Hermitian
interaction picture, and observables with biorthonormal eigenbases.
"""
__version__ = '0.1.0'

from .errors import *  # noqa: E402,F401,F403
from .model import (Schedule, default_schedule, polynomial_schedule,  # noqa: E402
                    stationary_schedule, RadiusModel, radius_matrix,
                    build_radius_matrix, SpectrumReport, spectrum,
                    ep_scaling_fit)
from .metric import (Metric, PolynomialMetric, polynomial_metric,  # noqa: E402
                     build_polynomial_metric, solve_metric_pointwise,
                     theorem2_eigenvalues, theorem2_coefficients,
                     dieudonne_residual, metric_at, metric_derivative,
                     positivity_domain)
from .dyson import (DysonMap, Coriolis, sqrt_metric, omega_derivative,  # noqa: E402
                    dyson_map, coriolis, compatibility_residual)
from .evolution import (StatePair, HamiltonianSpec, Trajectory,  # noqa: E402
                        OperatorTrajectory, Kinematics, assemble_generator,
                        textbook_hamiltonian, evolve_pair, evolve_heisenberg,
                        textbook_crosscheck, crosscheck_series)
from .observables import (Observable, BiorthonormalSystem,  # noqa: E402
                          make_observable, radius_as_observable,
                          biorthonormalize, dyadic_projector, expectation)
