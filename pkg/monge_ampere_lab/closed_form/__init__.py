"""
解析解族：作為求解器與檢查器的 oracle
"""
from .algebra import polar_det, radial_hessian, radial_hessians
from .base import BatchEvaluation, ClosedFormSolution, Evaluation, FieldEvaluator, field_values
from .blowup import BlowupFamilyResult, GradientBlowup, blowup_gradient_family
from .radial import (
    PhiSequence,
    RadialConcentric2D,
    RadialConcentricND,
    RadialSolution,
    critical_phi,
    gauss_image_mass_radial,
    inner_dnn,
    inner_hess_nn,
    phi_k,
)
from .skewed import SkewedQuadratic, SkewedShifted, shifted_radial_phi, skewed_inner_neumann, skewed_phi


__all__ = [
    "polar_det",
    "radial_hessian",
    "radial_hessians",
    "BatchEvaluation",
    "ClosedFormSolution",
    "Evaluation",
    "FieldEvaluator",
    "field_values",
    "BlowupFamilyResult",
    "GradientBlowup",
    "blowup_gradient_family",
    "PhiSequence",
    "RadialConcentric2D",
    "RadialConcentricND",
    "RadialSolution",
    "critical_phi",
    "gauss_image_mass_radial",
    "inner_dnn",
    "inner_hess_nn",
    "phi_k",
    "SkewedQuadratic",
    "SkewedShifted",
    "shifted_radial_phi",
    "skewed_inner_neumann",
    "skewed_phi",
]
