"""
求解器：徑向打靶、2-D 極座標 Newton、流方程時間推進
"""
from .flow import (
    FlowRun,
    FlowState,
    HistoryEntry,
    elliptic_gap,
    elliptic_gap_observer,
    igcf_identity_residual,
    initial_state,
    run,
    stability_cap,
    step,
    time_refinement,
    ut_bounds_audit,
)
from .polar_fd import (
    GridField,
    NewtonReport,
    convergence_study,
    discrete_gradient,
    discrete_min_eig,
    discrete_residual,
    gradient_image_measure,
    inner_slope,
    newton_solve,
    oracle_for,
    profile_on_grid,
    quadratic_init,
    sample_solution_on_grid,
)
from .radial import (
    BlowupRow,
    RadialProfile,
    blowup_sweep,
    closed_form_for,
    find_brackets,
    integrate_outward,
    neumann_residual,
    ode_residual,
    shoot,
    with_phi_constant,
)

__all__ = [
    "FlowRun",
    "FlowState",
    "HistoryEntry",
    "elliptic_gap",
    "elliptic_gap_observer",
    "igcf_identity_residual",
    "initial_state",
    "run",
    "stability_cap",
    "step",
    "time_refinement",
    "ut_bounds_audit",
    "GridField",
    "NewtonReport",
    "convergence_study",
    "discrete_gradient",
    "discrete_min_eig",
    "discrete_residual",
    "gradient_image_measure",
    "inner_slope",
    "newton_solve",
    "oracle_for",
    "profile_on_grid",
    "quadratic_init",
    "sample_solution_on_grid",
    "BlowupRow",
    "RadialProfile",
    "blowup_sweep",
    "closed_form_for",
    "find_brackets",
    "integrate_outward",
    "neumann_residual",
    "ode_residual",
    "shoot",
    "with_phi_constant",
]
