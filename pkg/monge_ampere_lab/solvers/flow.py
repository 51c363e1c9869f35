"""
流方程的時間推進
−u_t det D²u = ψⁿ(x, u, Du)，Γ⁺ 上 u = ϑ(t)，Γ⁻ 上 u_ν = γ₀u + φ(x, t)

徑向核心：均勻 r 網格上的顯式 Euler；u_t 由方程本身回推（−ψⁿ/det D²u），不做時間差分。
2-D 網格流沿用 polar_fd 的差分算子，需開啟 ENABLE_GRID_FLOW。
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..closed_form.algebra import polar_det
from ..closed_form.base import ClosedFormSolution, field_values
from ..config import (
    ENABLE_GRID_FLOW,
    FLOW_DET_FLOOR,
    FLOW_HISTORY_LENGTH,
    FLOW_ROBIN_TOLERANCE,
    FLOW_SAFETY,
    RADIAL_NODES,
)
from ..errors import (
    ConvexityLost,
    DeterminantFloor,
    MissingFlow,
    ParameterOutOfRange,
    PreconditionRejected,
    StepRejected,
    UnsupportedDomain,
)
from ..geometry.domain import sample_inner_boundary
from ..geometry.grid import PolarGrid
from ..geometry.problem import ProblemSpec
from ..geometry.psi import InverseGaussFlowPsi
from . import polar_fd
from .radial import radial_points, radial_psi_n

logger = logging.getLogger(__name__)

INITIAL_RESIDUAL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class HistoryEntry:
    t: float
    inner_trace: float
    outer_trace: float
    sup_abs_ut: float


@dataclass
class FlowState:
    """
    某一時刻的流狀態

    mesh 為徑向 r 節點（kind = "radial"）或 PolarGrid（kind = "grid"）；
    u 與 ut 同形。history 是所有由同一初值推進出來的狀態共用的環形緩衝區。
    """
    t: float
    kind: str
    mesh: object
    u: np.ndarray
    ut: np.ndarray
    dim: int = 2
    history: Deque[HistoryEntry] = field(default_factory=lambda: deque(maxlen=FLOW_HISTORY_LENGTH))

    def points(self) -> np.ndarray:
        """節點的笛卡兒座標 (m, n)"""
        if self.kind == "grid":
            return self.mesh.flat_points()
        return radial_points(self.mesh, self.dim)

    def snapshot(self) -> Tuple[float, np.ndarray, np.ndarray]:
        """(t, 節點, u) 三元組，供拋物下解比較使用"""
        return self.t, self.points(), self.u.ravel().copy()

    def inner_trace(self) -> float:
        return float(np.mean(self.u[0]))

    def outer_trace(self) -> float:
        return float(np.mean(self.u[-1]))


@dataclass
class FlowRun:
    final: FlowState
    series: List[Dict] = field(default_factory=list)
    snapshots: List[Tuple[float, np.ndarray, np.ndarray]] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    subdivided: bool = False

    @property
    def max_step(self) -> float:
        return max(self.step_sizes, default=0.0)


# ---- 徑向導數 ----

def _radial_derivatives(r: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """內部用中央差分，兩端用單側二階"""
    h = r[1] - r[0]
    u_r = np.empty_like(u)
    u_rr = np.empty_like(u)
    u_r[1:-1] = (u[2:] - u[:-2]) / (2 * h)
    u_rr[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / (h * h)
    u_r[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    u_r[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    u_rr[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / (h * h)
    u_rr[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / (h * h)
    return u_r, u_rr


def _radial_rates(spec: ProblemSpec, r: np.ndarray, u: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    回傳 (u_t, det D²u)

    Raises:
        ConvexityLost: 某節點 u_r ≤ 0 或 u_rr ≤ 0
        DeterminantFloor: det D²u < FLOW_DET_FLOOR
    """
    n = spec.dim
    u_r, u_rr = _radial_derivatives(r, u)
    if np.any(u_r <= 0.0) or np.any(u_rr <= 0.0):
        i = int(np.argmin(np.minimum(u_r, u_rr)))
        raise ConvexityLost(f"❌ t = {t:.6g} 時 r = {r[i]:.6g} 失去凸性")
    det = u_rr * (u_r / r) ** (n - 1)
    if np.min(det) < FLOW_DET_FLOOR:
        raise DeterminantFloor(f"❌ t = {t:.6g} 時 det D²u = {np.min(det):.3e} 低於下限")
    ut = -radial_psi_n(spec, r, u, u_r) / det
    ut[-1] = float(spec.flow.theta_rate(t))
    return ut, det


def _grid_rates(spec: ProblemSpec, grid: PolarGrid, u: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    flat = u.ravel()
    d = polar_fd.polar_derivatives(grid, flat)
    r = np.repeat(grid.r_nodes, grid.ntheta)
    _, _, interior = polar_fd.boundary_masks(grid)
    a, b, c = polar_fd.hessian_entries(grid, d)
    if np.any(polar_fd.min_eigenvalue(a, b, c)[interior] <= 0.0):
        raise ConvexityLost(f"❌ t = {t:.6g} 時網格場失去凸性")
    det = polar_det(d["u_r"], d["u_rr"], d["u_rt"], d["u_t"], d["u_tt"], r)
    if np.min(det[interior]) < FLOW_DET_FLOOR:
        raise DeterminantFloor(f"❌ t = {t:.6g} 時 det D²u 低於下限")
    ut = np.zeros_like(flat)
    ut[interior] = -(polar_fd.grid_psi_n(spec, grid, flat, d) / np.where(interior, det, 1.0))[interior]
    ut = ut.reshape(grid.nr, grid.ntheta)
    # 內圈的 u_t 取自下一列（診斷用），外圈為 ϑ′
    ut[0] = ut[1]
    ut[-1] = float(spec.flow.theta_rate(t))
    return ut, det.reshape(grid.nr, grid.ntheta)


def _rates(spec: ProblemSpec, kind: str, mesh, u: np.ndarray, t: float):
    if kind == "grid":
        return _grid_rates(spec, mesh, u, t)
    return _radial_rates(spec, mesh, u, t)


def stability_cap(state: FlowState, spec: ProblemSpec) -> float:
    """dt ≤ safety · min(½ min det / max ψⁿ, h² min(u_rr/|u_t|)/2)"""
    u, t = state.u, state.t
    ut, det = _rates(spec, state.kind, state.mesh, u, t)
    psi_n = np.abs(ut * det)
    if state.kind == "grid":
        h = min(state.mesh.hr, state.mesh.r_inner * state.mesh.htheta)
        inner = (slice(1, -1), slice(None))
        d = polar_fd.polar_derivatives(state.mesh, u.ravel())
        lam = polar_fd.min_eigenvalue(*polar_fd.hessian_entries(state.mesh, d)).reshape(u.shape)
        ratio = lam[inner] / np.maximum(np.abs(ut[inner]), 1e-300)
        diffusion_cap = h * h * float(np.min(ratio)) / 2.0
        det_cap = 0.5 * float(np.min(det[inner])) / float(np.max(psi_n[inner]))
    else:
        r = state.mesh
        h = r[1] - r[0]
        _, u_rr = _radial_derivatives(r, u)
        ratio = u_rr[:-1] / np.maximum(np.abs(ut[:-1]), 1e-300)
        diffusion_cap = h * h * float(np.min(ratio)) / 2.0
        det_cap = 0.5 * float(np.min(det[:-1])) / float(np.max(psi_n[:-1]))
    return FLOW_SAFETY * min(det_cap, diffusion_cap)


def _inner_phi(spec: ProblemSpec, state: FlowState, t: float) -> np.ndarray:
    if state.kind == "grid":
        return np.asarray(spec.flow.phi_t(state.mesh.points()[0], t), dtype=float)
    x = radial_points(state.mesh[0], state.dim)
    # 徑向內圈只有一個節點，φ 取成 0 維
    return np.asarray(spec.flow.phi_t(x, t), dtype=float).reshape(())


def _enforce_robin(u: np.ndarray, h: float, gamma0: float, phi: np.ndarray) -> np.ndarray:
    """
    在內圈做 1-D Newton：(−3u₀+4u₁−u₂)/(2h) − γ₀u₀ − φ = 0

    方程對 u₀ 是線性的，一步即達容差。
    """
    u0 = u[0].copy()
    for _ in range(5):
        residual = (-3 * u0 + 4 * u[1] - u[2]) / (2 * h) - gamma0 * u0 - phi
        if np.max(np.abs(residual)) <= FLOW_ROBIN_TOLERANCE:
            break
        u0 = u0 - residual / (-3.0 / (2 * h) - gamma0)
    u[0] = u0
    return u


def step(state: FlowState, spec: ProblemSpec, dt: float) -> FlowState:
    """
    推進一個顯式時間步

    內部以 u_t = −ψⁿ/det D²u 前進，外圈設為 ϑ(t+dt)，內圈以 Newton 重解 Robin 條件，
    最後重新檢查凸性並回推 u_t。

    Raises:
        StepRejected: dt 超過穩定上限
        ConvexityLost: 推進後失去凸性
        DeterminantFloor: det D²u < 1e-12
    """
    if dt < 0:
        raise ParameterOutOfRange("❌ dt 必須非負")
    if dt == 0:
        return state
    cap = stability_cap(state, spec)
    if dt > cap * (1.0 + 1e-12):
        raise StepRejected(f"❌ dt = {dt:.3e} 超過穩定上限 {cap:.3e}")

    t_next = state.t + dt
    u = state.u + dt * state.ut
    u[-1] = float(spec.flow.theta(t_next))
    h = state.mesh.hr if state.kind == "grid" else state.mesh[1] - state.mesh[0]
    u = _enforce_robin(u, h, spec.gamma0, _inner_phi(spec, state, t_next))
    ut, _ = _rates(spec, state.kind, state.mesh, u, t_next)

    new_state = FlowState(t_next, state.kind, state.mesh, u, ut, state.dim, state.history)
    state.history.append(HistoryEntry(t_next, new_state.inner_trace(), new_state.outer_trace(), float(np.max(np.abs(ut)))))
    return new_state


def _initial_boundary_residual(spec: ProblemSpec, state: FlowState, u0, h: float) -> Tuple[float, float]:
    """(殘差, 容差)；解析解直接檢查連續邊界條件，網格值則用單側差分並容許 O(h²)"""
    outer = float(np.max(np.abs(state.u[-1] - float(spec.flow.theta(0.0)))))
    if isinstance(u0, ClosedFormSolution):
        points, normals = sample_inner_boundary(spec.domain, 64)
        batch = u0.eval_many(points, check_domain=False)
        slope = np.sum(batch.grad * normals, axis=-1)
        inner = slope - spec.gamma0 * batch.u - np.asarray(spec.flow.phi_t(points, 0.0))
        return max(outer, float(np.max(np.abs(inner)))), INITIAL_RESIDUAL_TOLERANCE
    u = state.u
    inner = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h) - spec.gamma0 * u[0] - _inner_phi(spec, state, 0.0)
    return max(outer, float(np.max(np.abs(inner)))), max(INITIAL_RESIDUAL_TOLERANCE, h * h)


def initial_state(spec: ProblemSpec, u0=None, nodes: int = RADIAL_NODES, grid: Optional[PolarGrid] = None) -> FlowState:
    """
    由 u₀ 建立 t = 0 的狀態

    u₀ 必須在 t = 0 滿足兩個邊界條件（殘差 ≤ 1e−6）。

    Raises:
        MissingFlow: 規格沒有 flow 區塊
        UnsupportedDomain: 非同心區域，或要求網格流但未開啟 ENABLE_GRID_FLOW
        PreconditionRejected: u₀ 不滿足 t = 0 的邊界條件
    """
    if spec.flow is None:
        raise MissingFlow("❌ 問題規格沒有 flow 區塊")
    if not spec.domain.is_concentric:
        raise UnsupportedDomain("❌ 流求解器需要同心區域")
    u0 = u0 if u0 is not None else spec.flow.u0
    if isinstance(u0, polar_fd.GridField):
        grid = u0.grid
    if grid is not None:
        if not ENABLE_GRID_FLOW:
            raise UnsupportedDomain("❌ 2-D 網格流是實驗功能，請設定 MA_LAB_ENABLE_GRID_FLOW=true")
        if isinstance(u0, polar_fd.GridField):
            values = u0.values
        else:
            values = field_values(u0, grid.flat_points()).reshape(grid.nr, grid.ntheta)
        state = FlowState(0.0, "grid", grid, values.copy(), np.zeros_like(values), spec.dim)
        h = grid.hr
    else:
        r = np.linspace(spec.domain.r_inner, spec.domain.r_outer, nodes)
        state = FlowState(0.0, "radial", r, field_values(u0, radial_points(r, spec.dim)), np.zeros(nodes), spec.dim)
        h = r[1] - r[0]

    worst, tolerance = _initial_boundary_residual(spec, state, u0, h)
    if worst > tolerance:
        raise PreconditionRejected(f"❌ u₀ 在 t = 0 不滿足邊界條件（殘差 {worst:.3e}）")
    state.ut, _ = _rates(spec, state.kind, state.mesh, state.u, 0.0)
    return state


def _check_phi_rate(spec: ProblemSpec, T: float) -> None:
    points, _ = sample_inner_boundary(spec.domain, 64)
    for t in np.linspace(0.0, T, 17):
        if np.any(np.asarray(spec.flow.phi_rate(points, t)) <= 0.0):
            raise PreconditionRejected(f"❌ 流資料需要 φ_t > 0，在 t = {t:.6g} 被違反")
        if float(spec.flow.theta_rate(t)) >= 0.0:
            raise PreconditionRejected(f"❌ 流資料需要 ϑ′ < 0，在 t = {t:.6g} 被違反")


def run(
    spec: ProblemSpec,
    u0=None,
    T: Optional[float] = None,
    dt: float = 1e-4,
    observers: Iterable[Callable[[FlowState], None]] = (),
    nodes: int = 33,
    grid: Optional[PolarGrid] = None,
    snapshot_every: int = 0,
) -> FlowRun:
    """
    從 u₀ 推進到時間 T

    dt 超過穩定上限時自動細分成子步（記警告）；每個接受的步都會呼叫 observers。

    Args:
        spec: 含 flow 區塊的同心問題
        u0: 初值；預設 spec.flow.u0
        T: 終止時間；預設 spec.flow.horizon
        dt: 名義時間步長
        observers: 每步同步呼叫的 callable(state)
        nodes: 徑向節點數
        grid: 給定時改跑 2-D 網格流（實驗性）
        snapshot_every: 每隔幾步存一次快照；0 表示只存起點與終點

    Returns:
        FlowRun（終態、時間序列、快照）
    """
    state = initial_state(spec, u0, nodes, grid)
    T = spec.flow.horizon if T is None else float(T)
    if T < 0 or dt <= 0:
        raise ParameterOutOfRange("❌ 需要 T ≥ 0 且 dt > 0")
    _check_phi_rate(spec, T)
    observers = list(observers)
    track_igcf = isinstance(spec.psi, InverseGaussFlowPsi)

    result = FlowRun(state)
    result.series.append(_series_row(state, spec, track_igcf))
    result.snapshots.append(state.snapshot())
    steps, warned = 0, False
    while state.t < T - 1e-14 * max(1.0, T):
        target = min(dt, T - state.t)
        cap = stability_cap(state, spec)
        size = target
        if size > cap:
            if not warned:
                logger.warning(f"⚠️ dt = {dt:.3e} 超過穩定上限 {cap:.3e}，改以子步推進")
                warned = True
            size = cap
            result.subdivided = True
        previous = state.u
        state = step(state, spec, size)
        result.step_sizes.append(size)
        steps += 1
        if np.any(state.u - previous > 1e-10):
            logger.warning(f"⚠️ t = {state.t:.6g} 時 u 不是非遞增的")
        for observer in observers:
            observer(state)
        result.series.append(_series_row(state, spec, track_igcf))
        if snapshot_every and steps % snapshot_every == 0:
            result.snapshots.append(state.snapshot())
    if result.snapshots[-1][0] != state.t:
        result.snapshots.append(state.snapshot())
    result.final = state
    logger.info(f"✅ 流推進到 t = {state.t:.6g}（{steps} 步），sup|u| = {np.max(np.abs(state.u)):.6g}")
    return result


def _series_row(state: FlowState, spec: ProblemSpec, track_igcf: bool) -> Dict:
    abs_ut = np.abs(state.ut)
    row = {
        "t": state.t,
        "sup_u": float(np.max(np.abs(state.u))),
        "sup_ut": float(np.max(abs_ut)),
        "min_abs_ut": float(np.min(abs_ut)),
        "max_ut": float(np.max(state.ut)),
        "inner_trace": state.inner_trace(),
        "outer_trace": state.outer_trace(),
    }
    if track_igcf:
        row["igcf_residual"] = igcf_identity_residual(state, spec)
    return row


def ut_bounds_audit(series: Sequence[Dict], ct_upper: Optional[float] = None) -> Dict:
    """
    C_T ≤ |u_t| ≤ C^T 的觀察

    下界沒有公式，只回報觀察到的 min|u_t| 作為見證；上界給定時檢查 max|u_t| ≤ C^T + 1e−6。
    """
    if not series:
        raise ParameterOutOfRange("❌ 時間序列是空的")
    min_abs = min(row["min_abs_ut"] for row in series)
    max_abs = max(row["sup_ut"] for row in series)
    sign_violated = any(row["max_ut"] >= 0.0 for row in series)
    violated = sign_violated or (ct_upper is not None and max_abs > ct_upper + 1e-6)
    if violated:
        logger.warning(f"⚠️ u_t 界限被違反：max|u_t| = {max_abs:.6g}，C^T = {ct_upper}")
    return {"min_abs_ut": min_abs, "max_abs_ut": max_abs, "violated": bool(violated)}


def igcf_identity_residual(state: FlowState, spec: ProblemSpec) -> float:
    """
    圖形恆等式 −u_t/√(1+|Du|²) − (1+|Du|²)^{(n+2)/2}/det D²u 在非外圈節點的最大絕對值
    """
    n = spec.dim
    if state.kind == "grid":
        flat = state.u.ravel()
        d = polar_fd.polar_derivatives(state.mesh, flat)
        p2 = d["u_r"] ** 2 + (d["u_t"] / np.repeat(state.mesh.r_nodes, state.mesh.ntheta)) ** 2
        r = np.repeat(state.mesh.r_nodes, state.mesh.ntheta)
        det = polar_det(d["u_r"], d["u_rr"], d["u_rt"], d["u_t"], d["u_tt"], r)
        _, _, interior = polar_fd.boundary_masks(state.mesh)
        lhs = -state.ut.ravel() / np.sqrt(1 + p2) - (1 + p2) ** ((n + 2) / 2.0) / det
        return float(np.max(np.abs(lhs[interior])))
    r = state.mesh
    u_r, u_rr = _radial_derivatives(r, state.u)
    det = u_rr * (u_r / r) ** (n - 1)
    p2 = u_r ** 2
    lhs = -state.ut / np.sqrt(1 + p2) - (1 + p2) ** ((n + 2) / 2.0) / det
    return float(np.max(np.abs(lhs[:-1])))


def elliptic_gap(state: FlowState, reference) -> float:
    """
    流場與橢圓解之間的 sup 差

    reference 可以是 RadialProfile（以三次 Hermite 內插）、解析解或點 → 值的函數。
    """
    points = state.points()
    if hasattr(reference, "r_nodes") and hasattr(reference, "u_r"):
        from scipy.interpolate import CubicHermiteSpline

        spline = CubicHermiteSpline(reference.r_nodes, reference.u, reference.u_r)
        values = spline(np.linalg.norm(points, axis=-1))
    else:
        values = field_values(reference, points)
    return float(np.max(np.abs(state.u.ravel() - values)))


def elliptic_gap_observer(reference, gaps: Optional[List[Tuple[float, float]]] = None) -> Callable[[FlowState], None]:
    """回傳一個 observer：每步記錄 (t, elliptic_gap) 並在 gap 增加時記警告"""
    gaps = gaps if gaps is not None else []

    def observe(state: FlowState) -> None:
        gap = elliptic_gap(state, reference)
        if gaps and gap > gaps[-1][1]:
            logger.debug(f"📋 t = {state.t:.6g} 的橢圓差距上升：{gap:.3e}")
        gaps.append((state.t, gap))

    observe.gaps = gaps
    return observe


def time_refinement(spec: ProblemSpec, T: float, dts: Sequence[float], nodes: int = 33) -> Dict:
    """
    同一網格上以一列 dt 推進到 T，回報相鄰差與觀察階數

    空間誤差在各 dt 間相同，相鄰解的差只反映時間誤差。任何 dt 被穩定上限截成子步時，
    各列實際用的步長不再是要求的 dt，階數沒有意義，因此直接拒絕。

    Raises:
        ParameterOutOfRange: dt 少於兩個或不為正
        StepRejected: dt 超過初始穩定上限，或推進途中被細分
    """
    if len(dts) < 2 or any(dt <= 0 for dt in dts):
        raise ParameterOutOfRange("❌ 時間加密需要至少兩個正的 dt")
    cap = stability_cap(initial_state(spec, nodes=nodes), spec)
    too_large = [dt for dt in dts if dt > cap * (1.0 + 1e-12)]
    if too_large:
        raise StepRejected(f"❌ dt {too_large} 超過初始穩定上限 {cap:.3e}")
    runs = [run(spec, T=T, dt=dt, nodes=nodes) for dt in dts]
    subdivided = [dt for dt, result in zip(dts, runs) if result.subdivided]
    if subdivided:
        raise StepRejected(f"❌ dt {subdivided} 在推進途中被穩定上限細分")
    finals = [result.final.u for result in runs]
    diffs = [float(np.max(np.abs(a - b))) for a, b in zip(finals, finals[1:])]
    orders = []
    for (d0, d1), (dt0, dt1) in zip(zip(diffs, diffs[1:]), zip(dts, dts[1:])):
        orders.append(math.log(d0 / d1) / math.log(dt0 / dt1) if d0 > 0 and d1 > 0 else None)
    logger.info(f"📋 時間加密：差 {diffs}，階數 {orders}")
    return {
        "dts": list(dts),
        "dts_used": [result.max_step for result in runs],
        "cap": cap,
        "differences": diffs,
        "orders": orders,
    }
