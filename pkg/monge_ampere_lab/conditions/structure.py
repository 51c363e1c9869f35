"""
結構條件
∫_Ω g < ∫_{Rⁿ} h 與半徑 R₀、Γ⁺ 附近的梯度結構條件、預設 Gauss 曲率的必要條件
"""
import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from ..errors import NegativeK, NoRoot, SpecError
from ..geometry.domain import contains, outer_distance, sample_domain_points, sample_outer_boundary
from ..geometry.integration import integrate_over_domain
from ..geometry.problem import ProblemSpec
from ..geometry.psi import GaussCurvaturePsi
from ..numerics.quadrature import integrate_radial_ball, integrate_radial_whole_space, unit_ball_volume
from ..numerics.sampling import halton_points, unit_directions
from .report import ConditionId, ConditionReport, optional_float, point_sample, snap_margin

logger = logging.getLogger(__name__)

STRUCTURE_REL_TOL = 1e-12
EQUALITY_TOLERANCE = 1e-9
OUTER_K_TOLERANCE = 1e-10

RadialProfile = Callable[[np.ndarray], np.ndarray]


def gauss_map_mass(n: int) -> float:
    """∫_{Rⁿ} (1+|p|²)^{−(n+2)/2} dp；理論值為 ω_n"""
    return integrate_radial_whole_space(lambda rho: (1.0 + rho * rho) ** (-(n + 2) / 2.0), n)


def _structure_radius(h: RadialProfile, n: int, target: float, integral_h: float) -> float:
    """解 ∫_{|p|≤R} h = target，上界逐次加倍"""
    F = lambda R: integrate_radial_ball(h, n, R, rel_tol=STRUCTURE_REL_TOL) - target
    hi = 1.0
    for _ in range(64):
        if F(hi) > 0.0:
            return brentq(F, 0.0, hi, xtol=1e-14, rtol=1e-14)
        hi *= 2.0
    raise NoRoot(f"❌ 在 R ≤ {hi:.3e} 內找不到 R₀（∫h = {integral_h:.6g}, 目標 {target:.6g}）")


def check_structure(spec: ProblemSpec, g: Callable[[np.ndarray], np.ndarray], h: RadialProfile) -> ConditionReport:
    """
    檢查 ∫_Ω g < ∫_{Rⁿ} h，成立時一併求出 R₀

    h 以徑向剖面 h(|p|) 給出。margin 在等號邊界（相對誤差 1e-9 內）視為 0，
    此時條件不成立、R₀ 為 None。

    Args:
        spec: 問題規格
        g: Ω 上的正函數，接受 (m, n) 點陣列
        h: Rⁿ 上的正徑向密度

    Returns:
        constants_used 含 integral_g、integral_h、R0 的報告

    Raises:
        NotIntegrable: h 的尾部不衰減
    """
    n = spec.dim
    integral_g = integrate_over_domain(spec.domain, g, rel_tol=STRUCTURE_REL_TOL)
    integral_h = integrate_radial_whole_space(h, n, rel_tol=STRUCTURE_REL_TOL)
    margin = snap_margin(integral_h - integral_g, integral_h, EQUALITY_TOLERANCE)
    R0: Optional[float] = None
    if margin > 0.0:
        R0 = _structure_radius(h, n, integral_g, integral_h)
        logger.info(f"✅ 結構條件成立：∫g = {integral_g:.10g} < ∫h = {integral_h:.10g}，R₀ = {R0:.10g}")
    else:
        logger.info(f"⚠️ 結構條件不成立：∫g = {integral_g:.10g}，∫h = {integral_h:.10g}")
    return ConditionReport(
        ConditionId.STRUCTURE,
        margin,
        {"integral_g": integral_g, "integral_h": integral_h, "R0": optional_float(R0)},
    )


def structure_radius(spec: ProblemSpec, g, h: RadialProfile) -> float:
    """
    R₀：∫_Ω g = ∫_{|p|≤R₀} h

    Raises:
        NoRoot: 結構條件不成立時 R₀ 沒有定義
    """
    report = check_structure(spec, g, h)
    if not report.satisfied:
        raise NoRoot(f"❌ margin = {report.margin:.3e} ≤ 0，R₀ 沒有定義")
    return report.constants_used["R0"]


def check_structure_gradient(
    spec: ProblemSpec,
    Z: Callable[[np.ndarray], np.ndarray],
    beta: float,
    band: float,
    c0_prime: float = 1.0,
    count: int = 2000,
    flow: bool = False,
) -> ConditionReport:
    """
    在 Γ⁺ 的帶狀鄰域 d_x < band 內檢查 ψⁿ(x,z,p) ≤ Z(|z|) d_x^β |p|^{β+n+1}

    取樣 d_x ∈ (0, band)、z ∈ [−C₀′, 0]、|p| ∈ [Z(|z|), 10 Z(|z|)]；
    flow=True 時改用流方程的指數 β+n+2。

    Returns:
        margin = min(右式 − ψⁿ)，samples 帶最差樣本
    """
    if beta < 0 or band <= 0:
        raise SpecError("❌ 需要 β ≥ 0 與 band > 0")
    domain = spec.domain
    n = domain.dim
    exponent = beta + n + (2 if flow else 1)

    u = halton_points(3, count)
    directions = unit_directions(n, count)
    p_directions = np.roll(directions, count // 3, axis=0)
    dist = band * u[:, 0]
    x = domain.outer_center + (domain.r_outer - dist)[:, None] * directions
    keep = contains(domain, x) & (dist > 0.0)
    x, dist = x[keep], outer_distance(domain, x[keep])
    z = -c0_prime * u[keep, 1]
    z_scale = np.asarray(Z(np.abs(z)), dtype=float)
    p = (z_scale * (1.0 + 9.0 * u[keep, 2]))[:, None] * p_directions[keep]

    rhs = z_scale * dist ** beta * np.linalg.norm(p, axis=-1) ** exponent
    lhs = np.asarray(spec.psi.rhs(x, z, p), dtype=float)
    gap = rhs - lhs
    worst = int(np.argmin(gap))
    margin = float(gap[worst])
    logger.debug(f"📋 梯度結構條件：{len(x)} 個樣本，margin = {margin:.3e}")
    return ConditionReport(
        ConditionId.STRUCTURE_GRADIENT,
        margin,
        {"beta": beta, "band": band, "C0_prime": c0_prime, "exponent": exponent, "samples": int(len(x))},
        [point_sample(x[worst], d_x=dist[worst], z=z[worst], p_norm=np.linalg.norm(p[worst]), psi_n=lhs[worst], rhs=rhs[worst])],
    )


def check_prescribed_gauss(spec: ProblemSpec) -> ConditionReport:
    """
    預設 Gauss 曲率的必要條件：∫_Ω K < ω_n 且 Γ⁺ 上 K = 0

    K 在 Γ⁺ 上沒有消失（max|K| > 1e-10）時 margin 取負值 −max|K|。

    Raises:
        NegativeK: 取樣到 K < 0
    """
    if not isinstance(spec.psi, GaussCurvaturePsi):
        raise SpecError("❌ check_prescribed_gauss 需要 gauss-curvature 類型的 ψ")
    K = spec.psi.K
    interior = np.asarray(K(sample_domain_points(spec.domain, 1000)), dtype=float)
    if np.any(interior < 0.0):
        raise NegativeK(f"❌ K 必須非負，取樣到 min K = {interior.min():.3e}")
    n = spec.dim
    omega = unit_ball_volume(n)
    integral_K = integrate_over_domain(spec.domain, K)
    outer_max = float(np.max(np.abs(K(sample_outer_boundary(spec.domain, 720)))))
    margin = omega - integral_K
    if outer_max > OUTER_K_TOLERANCE:
        logger.warning(f"⚠️ K 在 Γ⁺ 上不為零：max|K| = {outer_max:.3e}")
        margin = min(margin, -outer_max)
    return ConditionReport(
        ConditionId.PRESCRIBED_GAUSS,
        margin,
        {"omega_n": omega, "integral_K": integral_K, "outer_max_abs_K": outer_max},
    )
