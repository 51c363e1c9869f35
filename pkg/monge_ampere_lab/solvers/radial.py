"""
徑向打靶求解器
u_rr (u_r/r)^{n−1} = ψⁿ(r, u, u_r)，u(R₊) = 0，u_r(R₋) = γ₀u(R₋) + φ；對內斜率 d 打靶
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..closed_form.radial import RadialConcentric2D, RadialConcentricND
from ..config import (
    RADIAL_MAX_SWEEPS,
    RADIAL_NODES,
    RADIAL_SWEEP_DAMPING,
    SHOOT_BISECTION_WIDTH,
    SHOOT_MAX_ITERATIONS,
    SHOOT_MIN_SLOPE,
    SHOOT_TOLERANCE,
)
from ..errors import (
    MaxIterations,
    NoBracket,
    ParameterOutOfRange,
    SlopeCollapse,
    StepRejected,
    UnsupportedDomain,
    UnsupportedFamily,
)
from ..geometry.problem import BoundaryDatum, ProblemSpec
from ..geometry.psi import ConstantPsi

logger = logging.getLogger(__name__)

BRACKET_SCAN_POINTS = 48


@dataclass(frozen=True)
class RadialProfile:
    """
    徑向解剖面

    u_r、u_rr 在所有節點都為正（嚴格凸），u(R₊) = 0。
    meta 含 d_star、residual（Robin 殘差）、iterations 等。
    """
    r_nodes: np.ndarray
    u: np.ndarray
    u_r: np.ndarray
    u_rr: np.ndarray
    meta: Dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.meta.get("n", 2))

    @property
    def d_star(self) -> float:
        return float(self.u_r[0])

    def inner_dnn(self) -> float:
        """Γ⁻ 上的二階法向報告值：2-D 為 u_rr + u_r/r，n ≥ 3 為 u_rr"""
        if self.n == 2:
            return float(self.u_rr[0] + self.u_r[0] / self.r_nodes[0])
        return float(self.u_rr[0])

    def sup_error(self, reference) -> float:
        """與解析解在節點上的最大誤差"""
        u_ref = reference.profile(self.r_nodes)[0]
        return float(np.max(np.abs(self.u - u_ref)))

    def rows(self) -> List[Tuple[float, float, float, float]]:
        return list(zip(self.r_nodes.tolist(), self.u.tolist(), self.u_r.tolist(), self.u_rr.tolist()))


def _require_radial(spec: ProblemSpec) -> None:
    if not spec.domain.is_concentric:
        raise UnsupportedDomain("❌ 徑向求解器需要同心區域")


def radial_points(r, n: int) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    x = np.zeros((len(r), n))
    x[:, 0] = r
    return x


def radial_psi_n(spec: ProblemSpec, r, u, slope) -> np.ndarray:
    """ψⁿ 在 x = (r, 0, …)、z = u、p = (u_r, 0, …)"""
    n = spec.dim
    x = radial_points(r, n)
    p = radial_points(slope, n)
    z = np.broadcast_to(np.asarray(u, dtype=float), (len(x),))
    values = np.asarray(spec.psi.rhs(x, z, p), dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0.0):
        raise StepRejected(f"❌ 積分路徑上 ψⁿ 不是有限正數（r ≈ {float(np.min(r)):.6g}）")
    return values


def _slope_from_w(W: np.ndarray, n: int) -> np.ndarray:
    if np.any(W <= 0.0):
        raise SlopeCollapse("❌ 積分途中 u_r ≤ 0，失去嚴格凸性")
    return W ** (1.0 / n)


def _decoupled_sweep(spec: ProblemSpec, r: np.ndarray, d: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    ψ 只依賴 x：W = u_rⁿ 的方程與 u 解耦

    先在四分之一格點上以 Simpson 求出 W，讓 u 的 RK4 階段值精確，
    再以 Simpson 累加 u（由 0 起算）。
    """
    n = spec.dim
    h = r[1] - r[0]
    quarter = np.linspace(r[0], r[-1], 4 * (len(r) - 1) + 1)
    f = n * radial_psi_n(spec, quarter, 0.0, np.ones_like(quarter)) * quarter ** (n - 1)
    # W 在半格點上：相鄰兩個四分之一區間的 Simpson
    half_increments = (h / 12.0) * (f[0:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    W_half = d ** n + np.concatenate([[0.0], np.cumsum(half_increments)])
    slope_half = _slope_from_w(W_half, n)
    increments = (h / 6.0) * (slope_half[0:-2:2] + 4.0 * slope_half[1:-1:2] + slope_half[2::2])
    u = np.concatenate([[0.0], np.cumsum(increments)])
    return u, slope_half[::2]


def _coupled_sweep(spec: ProblemSpec, r: np.ndarray, d: float, u_inner: float) -> Tuple[np.ndarray, np.ndarray]:
    """一般 ψ(r, u, u_r)：對 (u, W) 做經典 RK4，u(R₋) = u_inner"""
    n = spec.dim
    h = r[1] - r[0]
    u = np.empty_like(r)
    W = np.empty_like(r)
    u[0], W[0] = u_inner, d ** n

    def rhs(s: float, uu: float, ww: float) -> Tuple[float, float]:
        slope = float(_slope_from_w(np.array([ww]), n)[0])
        return slope, n * float(radial_psi_n(spec, s, uu, slope)[0]) * s ** (n - 1)

    for i in range(len(r) - 1):
        s, uu, ww = r[i], u[i], W[i]
        k1u, k1w = rhs(s, uu, ww)
        k2u, k2w = rhs(s + h / 2, uu + h / 2 * k1u, ww + h / 2 * k1w)
        k3u, k3w = rhs(s + h / 2, uu + h / 2 * k2u, ww + h / 2 * k2w)
        k4u, k4w = rhs(s + h, uu + h * k3u, ww + h * k3w)
        u[i + 1] = uu + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        W[i + 1] = ww + h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
    return u, _slope_from_w(W, n)


def integrate_outward(spec: ProblemSpec, d: float, nodes: int = RADIAL_NODES) -> RadialProfile:
    """
    從 R₋ 以內斜率 d 向外積分，再以 u(R₊) = 0 定出 u

    ψ 依賴 u 時以阻尼兩段式迭代求 u(R₋) 的不動點。

    Args:
        spec: 同心問題規格
        d: 內斜率 u_r(R₋) > 0
        nodes: r 的均勻節點數（含兩端）

    Returns:
        RadialProfile

    Raises:
        SlopeCollapse: 積分途中 u_r ≤ 0
        StepRejected: ψⁿ 在路徑上不是有限正數
    """
    _require_radial(spec)
    if d < SHOOT_MIN_SLOPE:
        raise SlopeCollapse(f"❌ d = {d:.3e} 低於保護下限 {SHOOT_MIN_SLOPE}")
    if nodes < 3:
        raise ParameterOutOfRange("❌ 至少需要 3 個節點")
    n = spec.dim
    r = np.linspace(spec.domain.r_inner, spec.domain.r_outer, nodes)
    sweeps = 0
    if not (spec.psi.depends_on_z or spec.psi.depends_on_p):
        u, slope = _decoupled_sweep(spec, r, d)
        u = u - u[-1]
    elif not spec.psi.depends_on_z:
        u, slope = _coupled_sweep(spec, r, d, 0.0)
        u = u - u[-1]
    else:
        u_inner, previous, gain = 0.0, None, 1.0
        for sweeps in range(1, RADIAL_MAX_SWEEPS + 1):
            u, slope = _coupled_sweep(spec, r, d, u_inner)
            terminal = u[-1]
            if abs(terminal) <= 1e-13 * max(1.0, abs(u_inner)):
                break
            if previous is not None and terminal != previous[1]:
                gain = max((terminal - previous[1]) / (u_inner - previous[0]), 1e-3)
            previous = (u_inner, terminal)
            # 第一輪以阻尼修正 u(R₋)，之後用 ∂u(R₊)/∂u(R₋) 的割線估計
            damping = RADIAL_SWEEP_DAMPING if sweeps == 1 else 1.0
            u_inner = u_inner - damping * terminal / gain
            logger.debug(f"🔄 兩段式迭代 {sweeps}: u(R₊) = {terminal:.3e}")
        else:
            raise MaxIterations(f"❌ {RADIAL_MAX_SWEEPS} 次兩段式迭代後 u(R₊) 仍未歸零")
    u_rr = radial_psi_n(spec, r, u, slope) * r ** (n - 1) / slope ** (n - 1)
    return RadialProfile(r, u, slope, u_rr, {"n": n, "d": d, "sweeps": sweeps})


def neumann_residual(spec: ProblemSpec, d: float, nodes: int = RADIAL_NODES) -> float:
    """G(d) = d − γ₀u(R₋; d) − φ"""
    profile = integrate_outward(spec, d, nodes)
    return d - spec.gamma0 * float(profile.u[0]) - spec.inner_phi_value()


def find_brackets(spec: ProblemSpec, d_lo: float, d_hi: float, nodes: int = RADIAL_NODES,
                  points: int = BRACKET_SCAN_POINTS) -> List[Tuple[float, float]]:
    """
    在 [d_lo, d_hi] 的等比網格上掃描 G 的變號區間

    Raises:
        NoBracket: 沒有任何變號
    """
    if not (0.0 < d_lo < d_hi):
        raise ParameterOutOfRange(f"❌ 需要 0 < d_lo < d_hi，收到 [{d_lo}, {d_hi}]")
    grid = np.geomspace(max(d_lo, SHOOT_MIN_SLOPE), d_hi, points)
    values = []
    for d in grid:
        try:
            values.append(neumann_residual(spec, float(d), nodes))
        except SlopeCollapse:
            values.append(math.nan)
    brackets = []
    for i in range(len(grid) - 1):
        a, b = values[i], values[i + 1]
        if math.isnan(a) or math.isnan(b):
            continue
        if a == 0.0:
            brackets.append((float(grid[i]), float(grid[i])))
        elif a * b < 0.0:
            brackets.append((float(grid[i]), float(grid[i + 1])))
    if values and values[-1] == 0.0:
        brackets.append((float(grid[-1]), float(grid[-1])))
    if not brackets:
        finite = [v for v in values if not math.isnan(v)]
        raise NoBracket(
            f"❌ G(d) 在 [{d_lo:.3e}, {d_hi:.3e}] 不變號"
            + (f"（min G = {min(finite):.6g}）" if finite else "")
        )
    return brackets


def _refine_root(spec: ProblemSpec, lo: float, hi: float, tol: float, nodes: int, max_iter: int) -> Tuple[float, int]:
    """二分到寬度 1e-3，再用有限差分 G′ 的 Newton，保持在區間內"""
    if lo == hi:
        return lo, 0
    G = lambda d: neumann_residual(spec, d, nodes)
    g_lo = G(lo)
    iterations = 0
    while hi - lo > SHOOT_BISECTION_WIDTH * max(1.0, lo):
        iterations += 1
        if iterations > max_iter:
            raise MaxIterations(f"❌ 二分法超過 {max_iter} 次")
        mid = 0.5 * (lo + hi)
        g_mid = G(mid)
        if g_mid == 0.0:
            return mid, iterations
        if (g_mid < 0.0) == (g_lo < 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    while True:
        iterations += 1
        if iterations > max_iter:
            raise MaxIterations(f"❌ 打靶在 {max_iter} 次內未收斂到 |G| ≤ {tol:.1e}")
        g = G(d)
        logger.debug(f"🔄 打靶 Newton {iterations}: d = {d:.15g}, G = {g:.3e}")
        if abs(g) <= tol:
            return d, iterations
        step = 1e-7 * max(d, 1e-6)
        slope = (G(d + step) - G(d - step)) / (2.0 * step)
        candidate = d - g / slope if slope != 0.0 else math.nan
        if not (lo <= candidate <= hi) or math.isnan(candidate):
            if (g < 0.0) == (g_lo < 0.0):
                lo, g_lo = d, g
            else:
                hi = d
            candidate = 0.5 * (lo + hi)
        d = candidate


def shoot(
    spec: ProblemSpec,
    d_bracket: Sequence[float] = (1e-6, 10.0),
    tol: float = SHOOT_TOLERANCE,
    nodes: int = RADIAL_NODES,
    max_iter: int = SHOOT_MAX_ITERATIONS,
) -> RadialProfile:
    """
    對 G(d) = u_r(R₋) − γ₀u(R₋; d) − φ 打靶

    所有變號區間的根都會求出並記在 meta["roots"]；回傳第一個根的剖面。

    Raises:
        NoBracket: G 在區間內不變號（例如 φ 低於臨界值）
        MaxIterations: 超過迭代上限
    """
    _require_radial(spec)
    d_lo, d_hi = float(d_bracket[0]), float(d_bracket[1])
    brackets = find_brackets(spec, d_lo, d_hi, nodes)
    roots, iterations = [], 0
    for lo, hi in brackets:
        root, used = _refine_root(spec, lo, hi, tol, nodes, max_iter)
        roots.append(root)
        iterations += used
    if len(roots) > 1:
        logger.warning(f"⚠️ 找到 {len(roots)} 個根：{roots}")
    d_star = roots[0]
    profile = integrate_outward(spec, d_star, nodes)
    residual = d_star - spec.gamma0 * float(profile.u[0]) - spec.inner_phi_value()
    logger.info(f"✅ 打靶收斂：d* = {d_star:.15g}，|G| = {abs(residual):.3e}，{iterations} 次迭代")
    meta = {**profile.meta, "d_star": d_star, "residual": residual, "iterations": iterations,
            "roots": roots, "ode_residual": ode_residual(spec, profile)}
    return replace(profile, meta=meta)


def ode_residual(spec: ProblemSpec, profile: RadialProfile) -> float:
    """
    內部節點上 |u_rr (u_r/r)^{n−1} − ψⁿ| / max(1, ψⁿ)

    u_rr 由 u_r 的四階中央差分取得，與積分器無關。
    """
    r, slope = profile.r_nodes, profile.u_r
    if len(r) < 5:
        return math.nan
    h = r[1] - r[0]
    n = spec.dim
    u_rr = (-slope[4:] + 8 * slope[3:-1] - 8 * slope[1:-3] + slope[:-4]) / (12.0 * h)
    inner = slice(2, -2)
    psi_n = radial_psi_n(spec, r[inner], profile.u[inner], slope[inner])
    lhs = u_rr * (slope[inner] / r[inner]) ** (n - 1)
    return float(np.max(np.abs(lhs - psi_n) / np.maximum(1.0, psi_n)))


def with_phi_constant(spec: ProblemSpec, value: float) -> ProblemSpec:
    """把 φ 換成常數 value 的規格副本"""
    datum = BoundaryDatum("constant", lambda x: np.full(np.shape(x)[0], value), {"value": value}, True)
    return replace(spec, phi=datum)


def closed_form_for(spec: ProblemSpec, d: float):
    """常數 ψ 同心規格下、內斜率 d 的解析解"""
    if not isinstance(spec.psi, ConstantPsi):
        raise UnsupportedFamily("❌ 解析解需要常數 ψ")
    domain = spec.domain
    if spec.dim == 2:
        return RadialConcentric2D(spec.psi.value, domain.r_inner, domain.r_outer, d)
    return RadialConcentricND(spec.dim, spec.psi.value, domain.r_inner, domain.r_outer, d)


@dataclass(frozen=True)
class BlowupRow:
    d: float
    phi_k: float
    u_nn_inner: float
    inner_hess_nn: float
    sup_grad: float

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.d, self.phi_k, self.u_nn_inner, self.inner_hess_nn, self.sup_grad)


def blowup_sweep(spec: ProblemSpec, d_list: Sequence[float], nodes: int = RADIAL_NODES) -> List[BlowupRow]:
    """
    對每個 d：以 φ = φ_k(d) 打靶，回報內邊界的 u_νν 與 sup|Du|

    d 趨近 0 時 u_νν 像 ψ²R₋/d 一樣爆破。
    """
    d_values = [float(d) for d in d_list]
    if any(d <= 0 for d in d_values):
        raise ParameterOutOfRange("❌ d_list 必須全為正數")
    rows = []
    for d in d_values:
        phi_value = closed_form_for(spec, d).phi(spec.gamma0)
        local = with_phi_constant(spec, phi_value)
        profile = shoot(local, (0.25 * d, 4.0 * d), min(SHOOT_TOLERANCE, 1e-8 * d), nodes)
        rows.append(BlowupRow(d, phi_value, profile.inner_dnn(), float(profile.u_rr[0]), float(profile.u_r[-1])))
        logger.info(f"📋 d = {d:.3e}: φ_k = {phi_value:.10g}, u_νν = {rows[-1].u_nn_inner:.10g}")
    return rows
