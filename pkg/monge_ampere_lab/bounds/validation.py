"""
先驗估計的取樣驗證
對解析解檢查 sup|u| ≤ C₀、sup|Du| ≤ C₁、sup_{Γ⁻}|u_ξν| ≤ C₃
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..closed_form.base import ClosedFormSolution
from ..config import INNER_BOUNDARY_SAMPLES, PSI_SAMPLE_COUNT
from ..geometry.domain import sample_domain_points, sample_inner_boundary, sample_outer_boundary, tangent_basis
from ..geometry.problem import ProblemSpec
from .constants import BoundConstants, DefiningFunction, elliptic_constants

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimateValidation:
    sup_u: float
    sup_grad: float
    sup_xinu: float
    constants: BoundConstants
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            "sup_u": self.sup_u,
            "sup_grad": self.sup_grad,
            "sup_xinu": self.sup_xinu,
            "constants": self.constants.to_dict(),
            "violations": list(self.violations),
            "passed": self.passed,
        }


def estimate_validation(
    solution: ClosedFormSolution,
    spec: ProblemSpec,
    rho: Optional[DefiningFunction] = None,
) -> EstimateValidation:
    """
    以稠密取樣比對解析解與先驗常數

    Args:
        solution: 解析解（spec 的 φ 應與其相容）
        spec: 問題規格
        rho: Γ⁺ 的定義函數；預設 (|x − γ₊|² − R₊²)/(2R₊)

    Returns:
        EstimateValidation，violations 列出違反的不等式
    """
    constants = elliptic_constants(spec, rho)
    inner, _ = sample_inner_boundary(spec.domain, INNER_BOUNDARY_SAMPLES)
    points = np.vstack([
        sample_domain_points(spec.domain, PSI_SAMPLE_COUNT),
        inner,
        sample_outer_boundary(spec.domain, INNER_BOUNDARY_SAMPLES),
    ])
    batch = solution.eval_many(points, check_domain=False)
    sup_u = float(np.max(np.abs(batch.u)))
    sup_grad = float(np.max(np.linalg.norm(batch.grad, axis=-1)))

    boundary = solution.eval_many(inner, check_domain=False)
    normals = inner - spec.domain.inner_center
    normals = normals / np.linalg.norm(normals, axis=-1, keepdims=True)
    sup_xinu = 0.0
    for x, nu, hess in zip(inner, normals, boundary.hess):
        for xi in tangent_basis(spec.domain, x):
            sup_xinu = max(sup_xinu, abs(float(xi @ hess @ nu)))

    violations = []
    if sup_u > constants.C0:
        violations.append(f"sup|u| = {sup_u:.6g} > C0 = {constants.C0:.6g}")
    if sup_grad > constants.C1:
        violations.append(f"sup|Du| = {sup_grad:.6g} > C1 = {constants.C1:.6g}")
    if sup_xinu > constants.C3:
        violations.append(f"sup|u_xinu| = {sup_xinu:.6g} > C3 = {constants.C3:.6g}")
    if violations:
        logger.warning(f"⚠️ {solution.family}: {'; '.join(violations)}")
    else:
        logger.info(f"✅ {solution.family}: 先驗估計全部成立")
    return EstimateValidation(sup_u, sup_grad, sup_xinu, constants, violations)
