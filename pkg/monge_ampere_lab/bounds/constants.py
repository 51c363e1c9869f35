"""
先驗常數計算器
C₀、C₁、C₃、M、C₀′、C′_{1,loc} 與流方程的 C^T、C₀ᵀ、C₁ᵀ，每個值都帶著它的公式代號
"""
import logging
import math
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..closed_form.base import ClosedFormSolution, field_values
from ..closed_form.radial import RadialSolution
from ..config import BARRIER_FD_FACTOR, INNER_BOUNDARY_SAMPLES, PSI_SAMPLE_COUNT
from ..errors import (
    BadDefiningFunction,
    KOutOfRange,
    LambdaOutOfRange,
    MissingFlow,
    ParameterOutOfRange,
    RhoTooDeep,
    UnsupportedFamily,
)
from ..geometry.domain import (
    AnnularDomain,
    diameter,
    max_abs_x,
    min_support,
    sample_domain_points,
    sample_inner_boundary,
    sample_outer_boundary,
)
from ..geometry.problem import ProblemSpec
from ..numerics.finite_diff import jacobian

logger = logging.getLogger(__name__)

K_GRID_POINTS = 64


@dataclass(frozen=True)
class BoundConstants:
    """
    先驗常數集合

    每個已填入的欄位在 formulas 中都有對應的公式代號；填入時檢查有限且為正。
    """
    C0: Optional[float] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    C4: Optional[float] = None
    C5: Optional[float] = None
    C0_prime: Optional[float] = None
    C1_prime: Optional[float] = None
    C1_loc: Optional[float] = None
    M: Optional[float] = None
    ell1: Optional[float] = None
    ell2: Optional[float] = None
    ell3: Optional[float] = None
    CT_upper: Optional[float] = None
    C0_T: Optional[float] = None
    C1_T: Optional[float] = None
    CT_lower_witness: Optional[float] = None
    formulas: Dict[str, str] = field(default_factory=dict)

    def with_value(self, name: str, value: float, formula: str, positive: bool = True) -> "BoundConstants":
        if not math.isfinite(value) or (positive and value <= 0.0):
            raise ParameterOutOfRange(f"❌ 常數 {name} = {value} 不是有限正數（{formula}）")
        return replace(self, **{name: float(value)}, formulas={**self.formulas, name: formula})

    def to_dict(self) -> Dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "formulas"}
        out = {k: v for k, v in out.items() if v is not None}
        out["formulas"] = dict(self.formulas)
        return out


@dataclass(frozen=True)
class DefiningFunction:
    """
    Γ⁺ 的定義函數 ρ（Ω 內為負、Γ⁺ 上為零）的摘要量

    lambda_min: D²ρ 的最小特徵值
    sup_grad_on_outer: max_{Γ⁺} |Dρ|
    min_abs_on_inner / max_abs_on_inner: Γ⁻ 上 |ρ| 的最小 / 最大值
    """
    lambda_min: float
    sup_grad_on_outer: float
    min_abs_on_inner: float
    max_abs_on_inner: float

    def __post_init__(self):
        if self.lambda_min <= 0:
            raise BadDefiningFunction(f"❌ λ_min 必須為正，收到 {self.lambda_min}")
        if not (0 < self.sup_grad_on_outer <= 1.0 + 1e-12):
            raise BadDefiningFunction(f"❌ 需要 0 < max_Γ⁺|Dρ| ≤ 1，收到 {self.sup_grad_on_outer}")
        if self.min_abs_on_inner <= 0:
            raise BadDefiningFunction("❌ Γ⁻ 上 |ρ| 必須為正")

    @classmethod
    def default_for(cls, domain: AnnularDomain) -> "DefiningFunction":
        """ρ = (|x − γ₊|² − R₊²)/(2R₊)：Γ⁺ 上 |Dρ| = 1，D²ρ = I/R₊"""
        R = domain.r_outer
        offset = float(np.linalg.norm(domain.inner_center - domain.outer_center))
        far = offset + domain.r_inner
        near = abs(domain.r_inner - offset)
        return cls(
            lambda_min=1.0 / R,
            sup_grad_on_outer=1.0,
            min_abs_on_inner=(R * R - far * far) / (2.0 * R),
            max_abs_on_inner=(R * R - near * near) / (2.0 * R),
        )

    def scaled(self, factor: float) -> "DefiningFunction":
        """ρ ↦ factor·ρ"""
        return DefiningFunction(
            self.lambda_min * factor,
            self.sup_grad_on_outer * factor,
            self.min_abs_on_inner * factor,
            self.max_abs_on_inner * factor,
        )


# ---- 取樣量 ----

def psi_sup(spec: ProblemSpec, solution: Optional[ClosedFormSolution] = None) -> float:
    """
    ‖ψ‖∞ 的取樣估計

    給定 solution 時沿著 (x, u, Du) 取值，否則取 z = 0、p = 0。
    """
    points = sample_domain_points(spec.domain, PSI_SAMPLE_COUNT)
    if solution is not None:
        batch = solution.eval_many(points, check_domain=False)
        z, p = batch.u, batch.grad
    else:
        z, p = np.zeros(len(points)), np.zeros_like(points)
    return float(np.max(spec.psi(points, z, p)))


def inner_phi_sup(spec: ProblemSpec) -> float:
    points, _ = sample_inner_boundary(spec.domain, INNER_BOUNDARY_SAMPLES)
    return float(np.max(np.abs(spec.phi(points))))


def inner_phi_gradient_sup(spec: ProblemSpec) -> float:
    """sup_{Γ⁻} |Dφ|，φ 的延拓以四階中央差分求導"""
    points, _ = sample_inner_boundary(spec.domain, INNER_BOUNDARY_SAMPLES)
    grad = jacobian(spec.phi, points, BARRIER_FD_FACTOR * spec.domain.r_inner)
    return float(np.max(np.linalg.norm(grad, axis=-1)))


# ---- C₀ ----

def c0_bound(spec: ProblemSpec, K: float, psi_norm: Optional[float] = None) -> float:
    """
    C₀ = e^{1/2} max{‖ψ‖∞/(K(1 − K max|x|²)), max_{Γ⁻}|φ|/(K m₀)}

    Args:
        spec: 問題規格
        K: 0 < K < 1/max|x|²
        psi_norm: ‖ψ‖∞；省略時以取樣估計

    Raises:
        KOutOfRange: K 不在範圍內
    """
    X = max_abs_x(spec.domain) ** 2
    if not (0.0 < K < 1.0 / X):
        raise KOutOfRange(f"❌ K = {K} 不在 (0, {1.0 / X:.6g}) 內")
    psi_norm = psi_sup(spec) if psi_norm is None else psi_norm
    first = psi_norm / (K * (1.0 - K * X))
    second = inner_phi_sup(spec) / (K * min_support(spec.domain))
    return math.sqrt(math.e) * max(first, second)


def minimize_c0_over_k(spec: ProblemSpec, psi_norm: Optional[float] = None) -> Tuple[float, float]:
    """
    在 (0, 1/max|x|²) 的 64 點對數網格上找最小的 C₀，再以黃金分割細化

    Returns:
        (K, C₀)
    """
    X = max_abs_x(spec.domain) ** 2
    psi_norm = psi_sup(spec) if psi_norm is None else psi_norm
    k_max = 1.0 / X
    grid = k_max * np.logspace(-4.0, math.log10(0.999), K_GRID_POINTS)
    values = np.array([c0_bound(spec, K, psi_norm) for K in grid])
    i = int(np.argmin(values))
    best_k, best = float(grid[i]), float(values[i])
    if 0 < i < len(grid) - 1:
        try:
            result = minimize_scalar(
                lambda K: c0_bound(spec, K, psi_norm),
                bracket=(grid[i - 1], grid[i], grid[i + 1]),
                method="golden",
                tol=1e-10,
            )
        except (ValueError, KOutOfRange):
            result = None
        if result is not None and result.fun < best:
            best_k, best = float(result.x), float(result.fun)
    logger.debug(f"📋 C₀ 最小化：K = {best_k:.6g}, C₀ = {best:.10g}")
    return best_k, best


# ---- C₁、C₃ ----

def c1_bound(spec: ProblemSpec, rho: DefiningFunction, C0: float, psi_norm: Optional[float] = None) -> float:
    """C₁ = max{C₀/min_{Γ⁻}|ρ|, ‖ψ‖∞/λ_min} · max_{Γ⁺}|Dρ|"""
    psi_norm = psi_sup(spec) if psi_norm is None else psi_norm
    return max(C0 / rho.min_abs_on_inner, psi_norm / rho.lambda_min) * rho.sup_grad_on_outer


def c3_bound(spec: ProblemSpec, C1: float) -> float:
    """C₃ = γ₀C₁ + sup_{Γ⁻}|Dφ|"""
    return spec.gamma0 * C1 + inner_phi_gradient_sup(spec)


# ---- M ----

def m_bound(norms: Mapping[str, float], psi_norms: Mapping[str, float], C1: float, n: int) -> float:
    """
    輔助函數 w 的最小可用 M（任何嚴格更大的值皆可）

    max{(ℓ₂ + √(ℓ₂² + 4ℓ₁))/2, (‖ψ‖∞/n)(ℓ₃/2 + √((ℓ₃/2)² + n(n‖D²lnψ‖∞ + 2‖a‖∞C₁)/‖ψ‖∞))}

    Args:
        norms: ell1、ell2、ell3、a_sup
        psi_norms: sup、sup_d2log（sup_dlog 已含在 ℓ₃ 內）
        C1: 梯度上界
        n: 維度
    """
    ell1, ell2, ell3 = norms["ell1"], norms["ell2"], norms["ell3"]
    first = 0.5 * (ell2 + math.sqrt(ell2 * ell2 + 4.0 * ell1))
    sup = psi_norms["sup"]
    inner = n * (n * psi_norms.get("sup_d2log", 0.0) + 2.0 * norms.get("a_sup", 0.0) * C1) / sup
    second = (sup / n) * (0.5 * ell3 + math.sqrt(0.25 * ell3 * ell3 + inner))
    return max(first, second)


# ---- 梯度依賴 ψ 的常數 ----

def c0_du_bound(R0: float, spec: ProblemSpec) -> float:
    """
    C₀′ = (R₀ + max_{Γ⁻}|φ|)/γ₀ + R₀ diam(Ω)

    Raises:
        GammaZero: γ₀ = 0
    """
    spec.require_positive_gamma()
    return (R0 + inner_phi_sup(spec)) / spec.gamma0 + R0 * diameter(spec.domain)


def local_gradient_bound(C0_prime: float, lam: float, sol: ClosedFormSolution, domain: AnnularDomain) -> float:
    """
    C′_{1,loc} = C₀′/dist(Ω_λ, Γ⁺)，Ω_λ = {u ≤ −λ}

    徑向解的水平集是圓，由 u(r) = −λ 反解半徑。

    Raises:
        LambdaOutOfRange: λ 不在 (0, −sup_{Γ⁻}u] 內
    """
    if not isinstance(sol, RadialSolution):
        raise UnsupportedFamily(f"❌ {sol.family} 不是徑向解族")
    u_inner = sol.inner_value()
    if not (0.0 < lam <= -u_inner):
        raise LambdaOutOfRange(f"❌ λ = {lam} 不在 (0, {-u_inner:.6g}] 內")
    level = lambda r: float(sol.profile(np.array([r]))[0][0]) + lam
    if level(sol.r_inner) >= 0.0:
        radius = sol.r_inner
    else:
        radius = brentq(level, sol.r_inner, sol.r_outer, xtol=1e-14, rtol=1e-14)
    distance = domain.r_outer - radius
    return C0_prime / distance


# ---- 流方程 ----

def flow_constants(
    spec: ProblemSpec,
    rho: Optional[DefiningFunction] = None,
    time_samples: int = 257,
) -> BoundConstants:
    """
    C^T = max{1, sup|ϑ′|, sup φ_t/γ₀}、C₀ᵀ = T C^T + sup|u₀|、
    C₁ᵀ = max{C₀ᵀ/(1 − max_{Γ⁻}|ρ|), (‖ψ‖∞/λ_min)^{n/(n+1)}} max_{Γ⁺}|Dρ|

    Raises:
        MissingFlow: 規格沒有流資料
        GammaZero: γ₀ = 0
        RhoTooDeep: max_{Γ⁻}|ρ| ≥ 1
    """
    flow = spec.flow
    if flow is None:
        raise MissingFlow("❌ 問題規格沒有 flow 區塊")
    spec.require_positive_gamma()
    rho = rho or DefiningFunction.default_for(spec.domain)
    times = np.linspace(0.0, flow.horizon, time_samples)
    points, _ = sample_inner_boundary(spec.domain, INNER_BOUNDARY_SAMPLES)
    theta_rate = max(abs(float(flow.theta_rate(t))) for t in times)
    phi_rate = max(float(np.max(flow.phi_rate(points, t))) for t in times)
    ct_upper = max(1.0, theta_rate, phi_rate / spec.gamma0)

    samples = np.vstack([
        sample_domain_points(spec.domain, PSI_SAMPLE_COUNT),
        points,
        sample_outer_boundary(spec.domain, INNER_BOUNDARY_SAMPLES),
    ])
    sup_u0 = float(np.max(np.abs(field_values(flow.u0, samples))))
    c0_t = flow.horizon * ct_upper + sup_u0

    if rho.max_abs_on_inner >= 1.0:
        raise RhoTooDeep(f"❌ max_Γ⁻|ρ| = {rho.max_abs_on_inner:.6g} ≥ 1")
    n = spec.dim
    psi_norm = psi_sup(spec, flow.u0)
    c1_t = max(c0_t / (1.0 - rho.max_abs_on_inner), (psi_norm / rho.lambda_min) ** (n / (n + 1.0))) * rho.sup_grad_on_outer

    constants = BoundConstants()
    constants = constants.with_value("CT_upper", ct_upper, "flow-ut-bound")
    constants = constants.with_value("C0_T", c0_t, "flow-c0")
    constants = constants.with_value("C1_T", c1_t, "flow-gradient-bound")
    logger.info(f"📋 流常數：C^T = {ct_upper:.6g}, C₀ᵀ = {c0_t:.6g}, C₁ᵀ = {c1_t:.6g}")
    return constants


def elliptic_constants(spec: ProblemSpec, rho: Optional[DefiningFunction] = None,
                       solution: Optional[ClosedFormSolution] = None) -> BoundConstants:
    """K 最小化的 C₀，接著 C₁ 與 C₃"""
    rho = rho or DefiningFunction.default_for(spec.domain)
    psi_norm = psi_sup(spec, solution)
    K, C0 = minimize_c0_over_k(spec, psi_norm)
    C1 = c1_bound(spec, rho, C0, psi_norm)
    C3 = c3_bound(spec, C1)
    constants = BoundConstants().with_value("C0", C0, f"c0-bound(K={K:.6g})")
    constants = constants.with_value("C1", C1, "gradient-bound")
    return constants.with_value("C3", C3, "mixed-derivative-bound", positive=False)
