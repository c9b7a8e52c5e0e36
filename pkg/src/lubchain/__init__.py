"""Lubricated sphere chains on a segment and their continuum limit.

The discrete model couples aligned spheres through viscous forces that
scale with the inverse gap; touching spheres move as rigid clusters. The
matching macroscopic model is a degenerate elliptic equation whose
elongational viscosity is the reciprocal vacuum fraction. The experiments
module checks, at desk scale, that the discrete solutions converge to the
continuum one and that the supporting quantitative bounds hold.
"""

__version__ = "0.1.0"

from .discrete import (DiscreteSolution, RigidGlobalError, build_matrix,
                       cohesion_forces, end_stress, interpolant, solve,
                       solve_clustered, solve_explicit, solve_regularized,
                       solve_strict, system_residual, w_field)
from .continuum import (ExactMacroSolution, MacroProblem, MacroSolution,
                        analytic_reference, energy, solve_macro)
from .experiments import (SweepPlan, SweepReport, TestFunction, atom_pairing,
                          bound_checks, h_minus1_residual, l2_error,
                          plan_from_json, run_invariant_suite, run_sweep,
                          weak_pairing)
from .fields import PiecewiseAffineField, PiecewiseConstantField, l2_distance
from .geometry import (CONTACT_TOL, ClusterDecomposition, FeasibilityClass,
                       ParticleConfiguration, characteristic_function,
                       check_feasibility, coarse_density, detect_clusters,
                       generate_configuration, sample_forces)
from .profiles import (BumpDensity, ConstantDensity, ConstantForce,
                       DensityProfile, ForceProfile, PolynomialForce,
                       SineForce, StepDensity, TabulatedDensity,
                       TabulatedForce, density_from_json, force_from_json)
from .rng import XorShift64Star
