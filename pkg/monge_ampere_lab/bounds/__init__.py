"""
先驗常數與輔助函數
"""
from .barrier import (
    BarrierNorms,
    BarrierSpec,
    BoundaryMaximum,
    Gauge,
    PowerLaw,
    Reciprocal,
    barrier_coefficients,
    barrier_field,
    boundary_maximum_check,
    gauge_properties,
    reciprocal_identity_residual,
    sample_barrier_norms,
    suggested_M,
)
from .constants import (
    BoundConstants,
    DefiningFunction,
    c0_bound,
    c0_du_bound,
    c1_bound,
    c3_bound,
    elliptic_constants,
    flow_constants,
    local_gradient_bound,
    m_bound,
    minimize_c0_over_k,
    psi_sup,
)
from .linearization import first_order_identity_check, linearization_identity_check, linearization_refinement
from .validation import EstimateValidation, estimate_validation

__all__ = [
    "BarrierNorms",
    "BarrierSpec",
    "BoundaryMaximum",
    "Gauge",
    "PowerLaw",
    "Reciprocal",
    "barrier_coefficients",
    "barrier_field",
    "boundary_maximum_check",
    "gauge_properties",
    "reciprocal_identity_residual",
    "sample_barrier_norms",
    "suggested_M",
    "BoundConstants",
    "DefiningFunction",
    "c0_bound",
    "c0_du_bound",
    "c1_bound",
    "c3_bound",
    "elliptic_constants",
    "flow_constants",
    "local_gradient_bound",
    "m_bound",
    "minimize_c0_over_k",
    "psi_sup",
    "first_order_identity_check",
    "linearization_identity_check",
    "linearization_refinement",
    "EstimateValidation",
    "estimate_validation",
]
