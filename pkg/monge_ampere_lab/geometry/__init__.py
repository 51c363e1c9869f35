"""
幾何與問題規格
"""
from .domain import (
    AnnularDomain,
    DomainKind,
    contains,
    diameter,
    geodesic_on_inner,
    graph_angle_ratio,
    inner_normal,
    max_abs_x,
    min_support,
    normal_curvature,
    outer_distance,
    sample_domain_points,
    sample_inner_boundary,
    sample_outer_boundary,
    tangent_basis,
)
from .grid import PolarGrid
from .integration import integrate_over_domain
from .problem import (
    BoundaryDatum,
    FlowData,
    ProblemSpec,
    load_problem_spec,
    phi_from_dict,
    problem_spec_from_dict,
    psi_from_dict,
)
from .psi import (
    ConstantPsi,
    GaussCurvaturePsi,
    GradientBlowupPsi,
    InverseGaussFlowPsi,
    PsiOfX,
    PsiOfXZ,
    PsiOfXZP,
    PsiSpec,
)

__all__ = [
    "AnnularDomain",
    "DomainKind",
    "contains",
    "diameter",
    "geodesic_on_inner",
    "graph_angle_ratio",
    "inner_normal",
    "max_abs_x",
    "min_support",
    "normal_curvature",
    "outer_distance",
    "sample_domain_points",
    "sample_inner_boundary",
    "sample_outer_boundary",
    "tangent_basis",
    "integrate_over_domain",
    "PolarGrid",
    "BoundaryDatum",
    "FlowData",
    "ProblemSpec",
    "load_problem_spec",
    "phi_from_dict",
    "problem_spec_from_dict",
    "psi_from_dict",
    "ConstantPsi",
    "GaussCurvaturePsi",
    "GradientBlowupPsi",
    "InverseGaussFlowPsi",
    "PsiOfX",
    "PsiOfXZ",
    "PsiOfXZP",
    "PsiSpec",
]
