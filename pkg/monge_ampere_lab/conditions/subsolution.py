"""
下解條件
橢圓情形：沿 Γ⁻ 測地線的 U(s) = (u_ν − u̲_ν)(γ(s))，檢查 U″/γ₀ + κU + u̲_ξξ ≥ τ
拋物情形：−u̲_t det D²u̲ ≥ ψⁿ + δ₀，並比較 u̲ ≤ u
"""
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from ..closed_form.base import ClosedFormSolution
from ..config import RICHARDSON_TOLERANCE, SUBSOLUTION_STEP_FACTOR, TAU_FLOOR
from ..errors import ParameterOutOfRange, StepTooLarge
from ..geometry.domain import (
    AnnularDomain,
    geodesic_on_inner,
    inner_normal,
    normal_curvature,
    sample_domain_points,
    sample_inner_boundary,
    tangent_basis,
)
from ..geometry.problem import ProblemSpec
from .report import ConditionId, ConditionReport, point_sample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsolutionProbe:
    """在 Γ⁻ 上一點 x0、切向 ξ 處比較 u 與下解 u̲"""
    u: ClosedFormSolution
    usub: ClosedFormSolution
    x0: np.ndarray
    xi: np.ndarray
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ParameterOutOfRange("❌ 步長 h 必須為正")

    @classmethod
    def at_angle(cls, u: ClosedFormSolution, usub: ClosedFormSolution, domain: AnnularDomain, theta: float = 0.0,
                 step: Optional[float] = None) -> "SubsolutionProbe":
        """2-D：x0 = γ₋ + R₋(cos θ, sin θ)，ξ 取逆時針切向"""
        direction = np.array([np.cos(theta), np.sin(theta)])
        x0 = domain.inner_center + domain.r_inner * direction
        xi = np.array([-direction[1], direction[0]])
        return cls(u, usub, x0, xi, step if step is not None else SUBSOLUTION_STEP_FACTOR * domain.r_inner)


def _normal_gap(probe: SubsolutionProbe, domain: AnnularDomain, s: float) -> float:
    x = geodesic_on_inner(domain, probe.x0, probe.xi, s)
    nu = inner_normal(domain, x)
    du = probe.u.eval_many(x[None, :], check_domain=False).grad[0]
    dsub = probe.usub.eval_many(x[None, :], check_domain=False).grad[0]
    return float(np.dot(du - dsub, nu))


def check_subsolution(probe: SubsolutionProbe, spec: ProblemSpec, tau_floor: float = TAU_FLOOR) -> ConditionReport:
    """
    檢查 (1/γ₀)U″(0) + κ_ξ(x₀)U(0) + u̲_ξξ(x₀) ≥ τ

    U″ 以步長 h、h/2 的中央差分再 Richardson 外推；左式同時就是 u 的 u_ξξ(x₀)。

    Raises:
        GammaZero: γ₀ = 0
        StepTooLarge: Richardson 兩個估計相差超過 1e-4
    """
    spec.require_positive_gamma()
    domain = spec.domain
    h = probe.step
    U = lambda s: _normal_gap(probe, domain, s)
    u0 = U(0.0)
    coarse = (U(h) - 2.0 * u0 + U(-h)) / (h * h)
    fine = (U(h / 2) - 2.0 * u0 + U(-h / 2)) / (h * h / 4)
    extrapolated = (4.0 * fine - coarse) / 3.0
    disagreement = abs(extrapolated - fine)
    if disagreement > RICHARDSON_TOLERANCE * max(1.0, abs(extrapolated)):
        raise StepTooLarge(f"❌ Richardson 估計相差 {disagreement:.3e}，請縮小步長 h = {h}")

    kappa = normal_curvature(domain, probe.x0, probe.xi)
    hess_sub = probe.usub.eval_many(np.asarray(probe.x0)[None, :], check_domain=False).hess[0]
    sub_xixi = float(probe.xi @ hess_sub @ probe.xi)
    lhs = extrapolated / spec.gamma0 + kappa * u0 + sub_xixi
    margin = lhs - tau_floor
    logger.debug(f"📋 下解條件：U″ = {extrapolated:.3e}，U = {u0:.6g}，u̲_ξξ = {sub_xixi:.6g}，左式 = {lhs:.10g}")
    return ConditionReport(
        ConditionId.SUBSOLUTION,
        margin,
        {"tau": tau_floor, "gamma0": spec.gamma0, "kappa": kappa, "step": h, "implied_u_xixi": lhs},
        [point_sample(probe.x0, U=u0, U_ss=extrapolated, usub_xixi=sub_xixi)],
    )


def subsolution_sweep(spec: ProblemSpec, u: ClosedFormSolution, usub: ClosedFormSolution, count: int = 36,
                      tau_floor: float = TAU_FLOOR) -> ConditionReport:
    """沿 Γ⁻ 上 count 個點（每點取所有切向）做 check_subsolution，回傳最差的一個"""
    domain = spec.domain
    step = SUBSOLUTION_STEP_FACTOR * domain.r_inner
    points, _ = sample_inner_boundary(domain, count)
    worst: Optional[ConditionReport] = None
    for x0 in points:
        for xi in tangent_basis(domain, x0):
            report = check_subsolution(SubsolutionProbe(u, usub, x0, xi, step), spec, tau_floor)
            if worst is None or report.margin < worst.margin:
                worst = report
    return worst


# ---- 拋物下解 ----

@dataclass(frozen=True)
class ParabolicSubsolution:
    """
    時間相依的下解 u̲(·, t)

    field_at(t) 回傳該時刻的解析場，time_derivative(points, t) 回傳 u̲_t。
    """
    field_at: Callable[[float], ClosedFormSolution]
    time_derivative: Callable[[np.ndarray, float], np.ndarray]


Snapshot = Tuple[float, np.ndarray, np.ndarray]


def check_flow_subsolution(
    sub: ParabolicSubsolution,
    spec: ProblemSpec,
    times: Iterable[float],
    delta0: float,
    snapshots: Optional[Iterable[Snapshot]] = None,
    count: int = 500,
) -> ConditionReport:
    """
    檢查嚴格拋物下解 −u̲_t det D²u̲ ≥ ψⁿ(x, u̲, Du̲) + δ₀，並在給定流快照時檢查 u̲ ≤ u

    Args:
        sub: 拋物下解
        spec: 問題規格
        times: 檢查嚴格性的時刻
        delta0: 嚴格性常數 δ₀ > 0
        snapshots: (t, 節點座標 (m, n), u 值 (m,)) 序列，通常取自流求解器
        count: 每個時刻的取樣點數

    Returns:
        margin = min(嚴格性餘量, 比較餘量) 的報告
    """
    if delta0 <= 0:
        raise ParameterOutOfRange("❌ δ₀ 必須為正")
    times = list(times)
    if not times:
        raise ParameterOutOfRange("❌ 至少需要一個檢查時刻")
    points = sample_domain_points(spec.domain, count)
    strict = np.inf
    worst_sample = None
    for t in times:
        batch = sub.field_at(t).eval_many(points, check_domain=False)
        ut = np.asarray(sub.time_derivative(points, t), dtype=float)
        lhs = -ut * np.linalg.det(batch.hess)
        gap = lhs - spec.psi.rhs(points, batch.u, batch.grad) - delta0
        i = int(np.argmin(gap))
        if gap[i] < strict:
            strict = float(gap[i])
            worst_sample = point_sample(points[i], t=t, strictness=gap[i])

    comparison = np.inf
    for t, nodes, values in snapshots or ():
        below = sub.field_at(t).eval_many(np.asarray(nodes), check_domain=False).u
        comparison = min(comparison, float(np.min(np.asarray(values) - below)))

    margin = min(strict, comparison)
    logger.info(f"📋 拋物下解：嚴格性 {strict:.3e}，比較 {comparison:.3e}")
    return ConditionReport(
        ConditionId.FLOW_SUBSOLUTION,
        float(margin),
        {"delta0": delta0, "strictness_margin": strict,
         "comparison_margin": None if comparison == np.inf else comparison},
        [worst_sample] if worst_sample else [],
    )
