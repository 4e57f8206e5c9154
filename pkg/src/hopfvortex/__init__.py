"""Point-vortex dynamics on the sphere with a symplectic integrator lifted to S^3."""

from .dynamics import (
    LiftedState,
    SphereState,
    energy_lifted,
    energy_sphere,
    grad_energy_lifted,
    grad_energy_sphere,
    lift_state,
    project_state,
    vector_field,
    vortex_moment,
)
from .errors import ConfigError, ConvergenceError, DomainError, SingularityError, StepFailure
from .general import compute_slack, solve_update_vector, start_general, step_general
from .harness import SimConfig, convergence_study, load_config, run_simulation, stereographic
from .integrators import (
    SolverConfig,
    StepRecord,
    solve_fixed_point,
    step_hopf,
    step_lie_poisson,
    step_midpoint_s2,
    step_rk2_projected,
    step_rk4_projected,
    step_trapezoid_twostep,
)
from .planar import PlanarState, planar_energy, planar_rhs, step_alpha, step_midpoint_plane
from .scenarios import (
    SCENARIOS,
    make_collapse3,
    make_karman_street,
    make_pd_ring,
    make_planar_four,
    make_vortex_sheet,
    pd_angular_velocity,
    pd_exact_position,
)
from .su2 import (
    algebra_apply,
    cayley,
    cayley_apply,
    hermitian_inner,
    hopf_lift,
    hopf_project,
    pauli_apply,
    pauli_sandwich,
)

__version__ = "0.1.0"
