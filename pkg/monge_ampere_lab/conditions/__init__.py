"""
可解性與結構條件的數值檢查器
"""
from .curvature import check_curvature, check_curvature_du, max_normal_curvature
from .report import ConditionId, ConditionReport
from .structure import (
    check_prescribed_gauss,
    check_structure,
    check_structure_gradient,
    gauss_map_mass,
    structure_radius,
)
from .subsolution import (
    ParabolicSubsolution,
    SubsolutionProbe,
    check_flow_subsolution,
    check_subsolution,
    subsolution_sweep,
)

__all__ = [
    "check_curvature",
    "check_curvature_du",
    "max_normal_curvature",
    "ConditionId",
    "ConditionReport",
    "check_prescribed_gauss",
    "check_structure",
    "check_structure_gradient",
    "gauss_map_mass",
    "structure_radius",
    "ParabolicSubsolution",
    "SubsolutionProbe",
    "check_flow_subsolution",
    "check_subsolution",
    "subsolution_sweep",
]
