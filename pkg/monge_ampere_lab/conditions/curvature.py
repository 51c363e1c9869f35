"""
曲率條件
2κ_ξ < γ₀ + max{0, min_{Γ⁻}(γ₀u+φ)/(M−u)} 及其加權版本
"""
import logging
import math
from typing import Callable, Tuple

import numpy as np

from ..closed_form.base import field_values
from ..config import INNER_BOUNDARY_SAMPLES
from ..errors import DenominatorSignError, ParameterOutOfRange, PreconditionRejected
from ..geometry.domain import normal_curvature, sample_inner_boundary, tangent_basis
from ..geometry.problem import ProblemSpec
from ..numerics.sampling import refine_periodic_minimum
from .report import ConditionId, ConditionReport, point_sample

logger = logging.getLogger(__name__)

MIN_BOUNDARY_SAMPLES = 360


def max_normal_curvature(spec: ProblemSpec, points: np.ndarray) -> float:
    """取樣點上所有切向的 κ_ξ 最大值"""
    best = -math.inf
    for x in points:
        for xi in tangent_basis(spec.domain, x):
            best = max(best, normal_curvature(spec.domain, x, xi))
    return best


def _boundary_ratio_min(
    spec: ProblemSpec,
    u_on_inner,
    denominator: Callable[[np.ndarray], np.ndarray],
    count: int,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    min_{Γ⁻} (γ₀u + φ)/denominator(u)

    2-D 時在離散極小值附近以黃金分割細化。

    Returns:
        (最小值, 取樣點, u 在取樣點的值)
    """
    points, _ = sample_inner_boundary(spec.domain, max(count, MIN_BOUNDARY_SAMPLES))
    u = field_values(u_on_inner, points)
    if np.any(u > 1e-12):
        raise PreconditionRejected(f"❌ Γ⁻ 上需要 u ≤ 0，取樣到 max u = {u.max():.3e}")
    denom = denominator(u)
    if np.any(denom <= 0.0):
        raise DenominatorSignError(f"❌ 分母在 Γ⁻ 上出現非正值：min = {denom.min():.3e}")
    ratio = (spec.gamma0 * u + spec.phi(points)) / denom
    best = float(ratio.min())
    if spec.dim == 2:
        center, radius = spec.domain.inner_center, spec.domain.r_inner
        grid = 2.0 * math.pi * np.arange(len(points)) / len(points)

        def _ratio_at(theta: float) -> float:
            x = (center + radius * np.array([math.cos(theta), math.sin(theta)]))[None, :]
            value = field_values(u_on_inner, x)
            return float(((spec.gamma0 * value + spec.phi(x)) / denominator(value))[0])

        _, best = refine_periodic_minimum(_ratio_at, grid, ratio)
    return best, points, u


def check_curvature(spec: ProblemSpec, u_on_inner, M: float, samples: int = INNER_BOUNDARY_SAMPLES) -> ConditionReport:
    """
    檢查 2κ_ξ < γ₀ + max{0, min_{Γ⁻}(γ₀u + φ)/(M − u)}

    Args:
        spec: 問題規格（γ₀ > 0）
        u_on_inner: Γ⁻ 上的 u（解析解或向量化函數），需 ≤ 0
        M: 正常數
        samples: Γ⁻ 取樣點數（至少 360）

    Returns:
        margin = 右式 − 2 max κ_ξ 的報告

    Raises:
        GammaZero: γ₀ = 0
    """
    spec.require_positive_gamma()
    if M <= 0:
        raise ParameterOutOfRange(f"❌ M 必須為正，收到 {M}")
    ratio_min, points, _ = _boundary_ratio_min(spec, u_on_inner, lambda u: M - u, samples)
    kappa = max_normal_curvature(spec, points)
    rhs = spec.gamma0 + max(0.0, ratio_min)
    margin = rhs - 2.0 * kappa
    logger.info(f"📋 曲率條件：2κ = {2 * kappa:.6g}，右式 = {rhs:.6g}，margin = {margin:.6g}")
    return ConditionReport(
        ConditionId.CURVATURE,
        margin,
        {"M": M, "gamma0": spec.gamma0, "kappa_max": kappa, "ratio_min": ratio_min, "samples": len(points)},
        [point_sample(points[0], kappa=kappa)],
    )


def check_curvature_du(
    spec: ProblemSpec,
    u_on_inner,
    M_tilde: float,
    N: float,
    C_tilde: float,
    samples: int = INNER_BOUNDARY_SAMPLES,
) -> ConditionReport:
    """
    檢查 2κ_ξ + C̃ < γ₀ + max{0, min_{Γ⁻}(γ₀u + φ)/(M̃ + (1−N⁴)u)}

    Raises:
        ParameterOutOfRange: N ≤ 1
        DenominatorSignError: M̃ + (1−N⁴)u 在 Γ⁻ 上某處 ≤ 0
    """
    if N <= 1.0:
        raise ParameterOutOfRange(f"❌ 需要 N > 1，收到 {N}")
    ratio_min, points, _ = _boundary_ratio_min(
        spec, u_on_inner, lambda u: M_tilde + (1.0 - N ** 4) * u, samples
    )
    kappa = max_normal_curvature(spec, points)
    margin = spec.gamma0 + max(0.0, ratio_min) - (2.0 * kappa + C_tilde)
    return ConditionReport(
        ConditionId.CURVATURE_DU,
        margin,
        {"M_tilde": M_tilde, "N": N, "C_tilde": C_tilde, "gamma0": spec.gamma0, "kappa_max": kappa, "ratio_min": ratio_min},
    )
