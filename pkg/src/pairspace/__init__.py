"""Pair-coordinate N-body dynamics.

The configuration of N bodies is represented by the center of mass plus
all N(N-1)/2 relative vectors q_ij = r_i - r_j, treated as coordinates
in their own right.  The triangle conditions q_ij + q_jk + q_ki = 0 tie
the redundant coordinates together; the equations of motion eliminate
the associated constraint forces in closed form.  On top of the
integrator the package analyzes the three-body central configurations
(equilateral and collinear) for the whole family of attractive r^-n
pairwise potentials.
"""

from .core import (
    BodyState,
    MassSystem,
    PairState,
    bodies_to_pairs,
    pairs_to_bodies,
    triangle_residual,
    triangle_residuals,
    velocity_triangle_residuals,
    length_scale,
    max_triangle_residual,
    is_realizable,
    check_realizable,
)
from .errors import (
    CollisionError,
    ConstraintViolationError,
    DimensionMismatchError,
    PairSpaceError,
    ValidationError,
)
from .kinetics import (
    PotentialLaw,
    TripletForce,
    kinetic_energy,
    potential_energy,
    pair_force_gradient,
    triplet_force,
    multiplier_sum_J,
)
from .dynamics import (
    Diagnostics,
    IntegratorConfig,
    Trajectory,
    TrajectorySample,
    default_timestep,
    integrate,
    pair_accelerations,
    pair_period_estimates,
)
from .oracle import body_accelerations, integrate_bodies
from .threebody import (
    HomothetyResult,
    PairAngularMomenta,
    PairEnergies,
    conservation_classifier,
    homothetic_release,
    homothety_check,
    pair_angular_momenta,
    pair_energies,
    phi,
)
from .central import (
    CollinearReport,
    E_derivative,
    E_of_x,
    E_of_x_expanded,
    Q_of_x,
    R_of_x,
    bound_classify,
    circular_pair_solution,
    collinear_angular_rate,
    collinear_phi_coefficient,
    euler_alpha,
    euler_initial_conditions,
    lagrange_circular_states,
    lagrange_construct,
    mass_threshold,
    rotation_third,
    sigma_tau_roots,
    two_body_pair_solution,
)

__version__ = "0.1.0"
