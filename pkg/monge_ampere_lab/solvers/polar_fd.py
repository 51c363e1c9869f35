"""
2-D 極座標有限差分 Newton 求解器
det D²u = ψⁿ(x, u, Du)，外圈 u = 0（Dirichlet），內圈 u_r = γ₀u + φ（Robin）

網格沿用 geometry.PolarGrid：r 節點含兩條邊界、θ 週期。
所有導數由同一組稀疏差分算子取得，殘差與 Jacobian 因此完全一致。
"""
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from ..closed_form.algebra import polar_det
from ..closed_form.base import field_values
from ..config import NEWTON_DAMPING_FLOOR, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE
from ..errors import DivergedNonConvex, MaxIterations, NoBracket, UnsupportedFamily
from ..geometry.grid import PolarGrid
from ..geometry.problem import ProblemSpec
from ..geometry.psi import ConstantPsi

logger = logging.getLogger(__name__)

ARMIJO_SLOPE = 1e-4
ROUNDING_LEVEL = 1e-11


@dataclass(frozen=True)
class GridField:
    """
    極座標網格上的場

    values 形狀 (nr, ntheta)，第 0 列為 Γ⁻、最後一列為 Γ⁺；θ 索引取模 ntheta。
    bc 紀錄邊界資料：outer_dirichlet、gamma0、phi（內圈 ntheta 個樣本）。
    """
    grid: PolarGrid
    values: np.ndarray
    bc: Dict = field(default_factory=dict)

    @property
    def nr(self) -> int:
        return self.grid.nr

    @property
    def ntheta(self) -> int:
        return self.grid.ntheta

    @property
    def r_nodes(self) -> np.ndarray:
        return self.grid.r_nodes

    @classmethod
    def from_spec(cls, spec: ProblemSpec, grid: PolarGrid, values: np.ndarray,
                  outer_value: float = 0.0, phi_samples: Optional[np.ndarray] = None) -> "GridField":
        if phi_samples is None:
            phi_samples = spec.phi(grid.points()[0])
        bc = {"outer_dirichlet": float(outer_value), "gamma0": spec.gamma0, "phi": np.asarray(phi_samples, dtype=float)}
        return cls(grid, np.asarray(values, dtype=float).reshape(grid.nr, grid.ntheta), bc)

    def with_values(self, values: np.ndarray) -> "GridField":
        return replace(self, values=np.asarray(values, dtype=float).reshape(self.nr, self.ntheta))

    def rows(self) -> List[Tuple[float, float, float]]:
        """(r, θ, u) 列，r 為外層索引"""
        R, T = self.grid.mesh()
        return list(zip(R.ravel().tolist(), T.ravel().tolist(), self.values.ravel().tolist()))


@dataclass
class NewtonReport:
    iterations: int = 0
    final_residual_sup: float = math.inf
    damping_history: List[float] = field(default_factory=list)
    residual_history: List[float] = field(default_factory=list)
    convexity_min_eig: float = math.nan

    def contraction_ratios(self, basin: float = 1e-2) -> List[float]:
        """進入 basin（殘差 < basin）之後相鄰兩步的殘差比"""
        ratios = []
        for prev, nxt in zip(self.residual_history, self.residual_history[1:]):
            if prev < basin and prev > 0:
                ratios.append(nxt / prev)
        return ratios

    def to_dict(self) -> Dict:
        return {
            "iterations": self.iterations,
            "final_residual_sup": self.final_residual_sup,
            "damping_history": list(self.damping_history),
            "residual_history": list(self.residual_history),
            "convexity_min_eig": self.convexity_min_eig,
        }


# ---- 差分算子 ----

@dataclass(frozen=True)
class _Operators:
    Ur: sp.csr_matrix
    Urr: sp.csr_matrix
    Ut: sp.csr_matrix
    Utt: sp.csr_matrix
    Urt: sp.csr_matrix
    inner: sp.csr_matrix  # 內圈的單側二階 u_r


@lru_cache(maxsize=16)
def _operators(grid: PolarGrid) -> _Operators:
    nr, nt, h, k = grid.nr, grid.ntheta, grid.hr, grid.htheta
    # r 方向：只在內部列有值
    rows = np.arange(1, nr - 1)
    Dr = sp.csr_matrix(
        (np.concatenate([-np.ones(nr - 2), np.ones(nr - 2)]) / (2 * h),
         (np.concatenate([rows, rows]), np.concatenate([rows - 1, rows + 1]))),
        shape=(nr, nr),
    )
    Drr = sp.csr_matrix(
        (np.concatenate([np.ones(nr - 2), -2 * np.ones(nr - 2), np.ones(nr - 2)]) / (h * h),
         (np.concatenate([rows, rows, rows]), np.concatenate([rows - 1, rows, rows + 1]))),
        shape=(nr, nr),
    )
    cols = np.arange(nt)
    Dt = sp.csr_matrix(
        (np.concatenate([-np.ones(nt), np.ones(nt)]) / (2 * k),
         (np.concatenate([cols, cols]), np.concatenate([(cols - 1) % nt, (cols + 1) % nt]))),
        shape=(nt, nt),
    )
    Dtt = sp.csr_matrix(
        (np.concatenate([np.ones(nt), -2 * np.ones(nt), np.ones(nt)]) / (k * k),
         (np.concatenate([cols, cols, cols]), np.concatenate([(cols - 1) % nt, cols, (cols + 1) % nt]))),
        shape=(nt, nt),
    )
    Din = sp.csr_matrix((np.array([-3.0, 4.0, -1.0]) / (2 * h), ([0, 0, 0], [0, 1, 2])), shape=(nr, nr))
    Ir, It = sp.identity(nr, format="csr"), sp.identity(nt, format="csr")
    return _Operators(
        Ur=sp.kron(Dr, It, format="csr"),
        Urr=sp.kron(Drr, It, format="csr"),
        Ut=sp.kron(Ir, Dt, format="csr"),
        Utt=sp.kron(Ir, Dtt, format="csr"),
        Urt=sp.kron(Dr, Dt, format="csr"),
        inner=sp.kron(Din, It, format="csr"),
    )


def boundary_masks(grid: PolarGrid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    row = np.repeat(np.arange(grid.nr), grid.ntheta)
    return row == 0, row == grid.nr - 1, (row > 0) & (row < grid.nr - 1)


def polar_derivatives(grid: PolarGrid, u: np.ndarray) -> Dict[str, np.ndarray]:
    ops = _operators(grid)
    return {
        "u_r": ops.Ur @ u,
        "u_rr": ops.Urr @ u,
        "u_t": ops.Ut @ u,
        "u_tt": ops.Utt @ u,
        "u_rt": ops.Urt @ u,
    }


def _cartesian_gradient(grid: PolarGrid, u_r: np.ndarray, u_t: np.ndarray) -> np.ndarray:
    R, T = grid.mesh()
    r, t = R.ravel(), T.ravel()
    cos, sin = np.cos(t), np.sin(t)
    return np.stack([u_r * cos - u_t / r * sin, u_r * sin + u_t / r * cos], axis=-1)


def hessian_entries(grid: PolarGrid, d: Dict[str, np.ndarray]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """極座標正交標架下的 Hessian：H_rr、H_rθ、H_θθ"""
    r = np.repeat(grid.r_nodes, grid.ntheta)
    return d["u_rr"], (d["u_rt"] - d["u_t"] / r) / r, d["u_r"] / r + d["u_tt"] / (r * r)


def min_eigenvalue(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b * b)


def grid_psi_n(spec: ProblemSpec, grid: PolarGrid, u: np.ndarray, d: Dict[str, np.ndarray]) -> np.ndarray:
    return np.asarray(spec.psi.rhs(grid.flat_points(), u, _cartesian_gradient(grid, d["u_r"], d["u_t"])), dtype=float)


def _residual_vector(spec: ProblemSpec, gf: GridField, u: np.ndarray) -> np.ndarray:
    grid = gf.grid
    d = polar_derivatives(grid, u)
    r = np.repeat(grid.r_nodes, grid.ntheta)
    inner_mask, outer_mask, interior = boundary_masks(grid)
    res = np.zeros_like(u)
    det = polar_det(d["u_r"], d["u_rr"], d["u_rt"], d["u_t"], d["u_tt"], r)
    res[interior] = (det - grid_psi_n(spec, grid, u, d))[interior]
    slope = _operators(grid).inner @ u
    res[inner_mask] = slope[inner_mask] - gf.bc["gamma0"] * u[inner_mask] - gf.bc["phi"]
    res[outer_mask] = u[outer_mask] - gf.bc["outer_dirichlet"]
    return res


def discrete_residual(field: GridField, spec: ProblemSpec) -> GridField:
    """
    離散殘差

    內部：polar_det(中央差分) − ψⁿ；內圈：(−3u₀+4u₁−u₂)/(2h) − γ₀u − φ；外圈：u − 外圈值。

    Raises:
        GridTooCoarse: 由 PolarGrid 在建構時拋出
    """
    res = _residual_vector(spec, field, field.values.ravel())
    return field.with_values(res)


def discrete_min_eig(field: GridField) -> float:
    """內部節點上重建 Hessian 的最小特徵值"""
    return _discrete_min_eig(field.grid, field.values.ravel())


def _discrete_min_eig(grid: PolarGrid, u: np.ndarray) -> float:
    _, _, interior = boundary_masks(grid)
    a, b, c = hessian_entries(grid, polar_derivatives(grid, u))
    return float(np.min(min_eigenvalue(a, b, c)[interior]))


def _jacobian(spec: ProblemSpec, gf: GridField, u: np.ndarray) -> sp.csc_matrix:
    """由極座標行列式解析線性化；ψⁿ 對 z、p 的導數用中央差分"""
    grid = gf.grid
    ops = _operators(grid)
    d = polar_derivatives(grid, u)
    r = np.repeat(grid.r_nodes, grid.ntheta)
    mixed = d["u_rt"] - d["u_t"] / r
    coeff_rr = d["u_r"] / r + d["u_tt"] / (r * r)
    coeff_r = d["u_rr"] / r
    coeff_tt = d["u_rr"] / (r * r)
    coeff_rt = -2.0 * mixed / (r * r)
    coeff_t = 2.0 * mixed / (r ** 3)
    coeff_z = np.zeros_like(u)

    points = grid.flat_points()
    p = _cartesian_gradient(grid, d["u_r"], d["u_t"])
    if spec.psi.depends_on_z:
        dz = 1e-7 * np.maximum(1.0, np.abs(u))
        coeff_z = -(spec.psi.rhs(points, u + dz, p) - spec.psi.rhs(points, u - dz, p)) / (2 * dz)
    if spec.psi.depends_on_p:
        t = np.tile(grid.theta_nodes, grid.nr)
        e_r = np.stack([np.cos(t), np.sin(t)], axis=-1)
        e_t = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        grad_psi = np.zeros_like(p)
        for axis in range(2):
            dp = np.zeros_like(p)
            dp[:, axis] = 1e-7 * np.maximum(1.0, np.abs(p[:, axis]))
            grad_psi[:, axis] = (spec.psi.rhs(points, u, p + dp) - spec.psi.rhs(points, u, p - dp)) / (2 * dp[:, axis])
        coeff_r = coeff_r - np.sum(grad_psi * e_r, axis=-1)
        coeff_t = coeff_t - np.sum(grad_psi * e_t, axis=-1) / r

    inner_mask, outer_mask, interior = boundary_masks(grid)
    J_int = (
        sp.diags(coeff_rr) @ ops.Urr + sp.diags(coeff_r) @ ops.Ur + sp.diags(coeff_tt) @ ops.Utt
        + sp.diags(coeff_rt) @ ops.Urt + sp.diags(coeff_t) @ ops.Ut + sp.diags(coeff_z)
    )
    J_in = ops.inner - gf.bc["gamma0"] * sp.identity(len(u))
    J = (
        sp.diags(interior.astype(float)) @ J_int
        + sp.diags(inner_mask.astype(float)) @ J_in
        + sp.diags(outer_mask.astype(float))
    )
    return J.tocsc()


def reference_psi(spec: ProblemSpec, grid: PolarGrid) -> float:
    """預設初值用的 ψ_ref：網格上 ψⁿ(x, 0, 0) 平均的 n 次方根"""
    if isinstance(spec.psi, ConstantPsi):
        return spec.psi.value
    points = grid.flat_points()
    values = spec.psi.rhs(points, np.zeros(len(points)), np.zeros_like(points))
    return float(np.mean(values)) ** 0.5


def quadratic_init(spec: ProblemSpec, grid: PolarGrid) -> GridField:
    """ψ_ref r²/2 − ψ_ref R₊²/2"""
    psi_ref = reference_psi(spec, grid)
    R, _ = grid.mesh()
    return GridField.from_spec(spec, grid, psi_ref * (R * R - grid.r_outer ** 2) / 2.0)


def sample_solution_on_grid(solution, spec: ProblemSpec, grid: PolarGrid) -> GridField:
    """把解析解（或任何 (m,2) → (m,) 的場）取樣到網格上"""
    values = field_values(solution, grid.flat_points())
    return GridField.from_spec(spec, grid, values)


def profile_on_grid(profile, spec: ProblemSpec, grid: PolarGrid) -> GridField:
    """把徑向剖面以三次 Hermite 內插到網格上"""
    from scipy.interpolate import CubicHermiteSpline

    spline = CubicHermiteSpline(profile.r_nodes, profile.u, profile.u_r)
    values = np.repeat(spline(grid.r_nodes)[:, None], grid.ntheta, axis=1)
    return GridField.from_spec(spec, grid, values)


def newton_solve(
    spec: ProblemSpec,
    init: Optional[GridField] = None,
    tol: float = NEWTON_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITERATIONS,
    grid: Optional[PolarGrid] = None,
) -> Tuple[GridField, NewtonReport]:
    """
    阻尼 Newton 求解離散方程

    每步：稀疏 LU 解 J δ = −F；若 u + δ 的重建 Hessian 有負特徵值先把步長減半；
    再以殘差 sup 範數做 Armijo 回溯，步長下限 2⁻²⁰。

    Args:
        spec: 2-D 同心問題
        init: 初值；未給時用 quadratic_init（需要 grid）
        tol: 殘差 sup 範數容差
        max_iter: 最大 Newton 次數

    Returns:
        (解, NewtonReport)

    Raises:
        DivergedNonConvex: 步長降到下限仍失去凸性或無法降低殘差
        MaxIterations: 超過 max_iter
    """
    if init is None:
        init = quadratic_init(spec, grid or PolarGrid.on(spec.domain, 64, 64))
    gf = init
    u = gf.values.ravel().copy()
    report = NewtonReport()
    res = _residual_vector(spec, gf, u)
    norm = float(np.max(np.abs(res)))
    report.residual_history.append(norm)
    logger.info(f"🔄 Newton 開始：{gf.nr}×{gf.ntheta}，初始殘差 {norm:.3e}")

    while norm > tol:
        if report.iterations >= max_iter:
            raise MaxIterations(f"❌ Newton 在 {max_iter} 次內未收斂（殘差 {norm:.3e}）")
        report.iterations += 1
        delta = splu(_jacobian(spec, gf, u)).solve(-res)

        step = 1.0
        while _discrete_min_eig(gf.grid, u + step * delta) < 0.0:
            step *= 0.5
            if step < NEWTON_DAMPING_FLOOR:
                raise DivergedNonConvex("❌ 步長降到下限仍無法維持離散凸性")
        while True:
            candidate = u + step * delta
            cand_res = _residual_vector(spec, gf, candidate)
            cand_norm = float(np.max(np.abs(cand_res)))
            if np.isfinite(cand_norm) and cand_norm <= (1.0 - ARMIJO_SLOPE * step) * norm:
                break
            step *= 0.5
            if step < NEWTON_DAMPING_FLOOR:
                raise DivergedNonConvex(f"❌ Armijo 回溯到下限仍無法降低殘差（{norm:.3e}）")
        u, res, norm = candidate, cand_res, cand_norm
        report.damping_history.append(step)
        report.residual_history.append(norm)
        logger.debug(f"🔄 Newton {report.iterations}: 殘差 {norm:.3e}，步長 {step:g}")

    report.final_residual_sup = norm
    report.convexity_min_eig = _discrete_min_eig(gf.grid, u)
    if report.convexity_min_eig <= 0.0:
        raise DivergedNonConvex(f"❌ 收斂解不是離散凸的（min eig = {report.convexity_min_eig:.3e}）")
    logger.info(f"✅ Newton 收斂：{report.iterations} 次，殘差 {norm:.3e}")
    return gf.with_values(u), report


def inner_slope(field: GridField) -> np.ndarray:
    """內圈的單側二階 u_r，長度 ntheta"""
    slope = _operators(field.grid).inner @ field.values.ravel()
    return slope[: field.ntheta]


def discrete_gradient(field: GridField) -> np.ndarray:
    """所有節點上的 Du（笛卡兒），邊界列用單側二階 u_r；形狀 (nr, ntheta, 2)"""
    grid = field.grid
    values = field.values
    h = grid.hr
    u_r = np.gradient(values, h, axis=0, edge_order=2)
    u_t = (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2 * grid.htheta)
    return _cartesian_gradient(grid, u_r.ravel(), u_t.ravel()).reshape(grid.nr, grid.ntheta, 2)


def gradient_image_measure(field: GridField, weight=None) -> float:
    """
    梯度映射像集的加權面積 ∫_{Du(Ω)} weight(p) dp

    每個極座標格子的四個角經離散梯度映射成四邊形，以鞋帶公式求面積、
    在像的形心取權重。預設權重為 (1+|p|²)^{-2}（2-D 的 Gauss 映射密度）。
    """
    if weight is None:
        weight = lambda p: (1.0 + np.sum(p * p, axis=-1)) ** -2.0
    P = discrete_gradient(field)
    a = P[:-1]
    b = P[1:]
    c = np.roll(P[1:], -1, axis=1)
    e = np.roll(P[:-1], -1, axis=1)
    quad = np.stack([a, b, c, e], axis=2)
    x, y = quad[..., 0], quad[..., 1]
    area = 0.5 * np.abs(np.sum(x * np.roll(y, -1, axis=2) - np.roll(x, -1, axis=2) * y, axis=2))
    centroid = quad.mean(axis=2)
    return float(np.sum(area * weight(centroid)))


def oracle_for(spec: ProblemSpec):
    """
    常數 ψ、常數 φ 的 2-D 同心規格所對應的解析解 u^(k)

    以 brentq 解 φ_k(d) = φ。

    Raises:
        UnsupportedFamily: ψ 或 φ 不是常數
        NoBracket: φ 低於臨界值，沒有對應的 d
    """
    from .radial import closed_form_for

    if not isinstance(spec.psi, ConstantPsi) or not spec.phi.is_constant:
        raise UnsupportedFamily("❌ 收斂研究需要常數 ψ 與常數 φ 的解析解")
    target = spec.inner_phi_value()
    gap = lambda d: closed_form_for(spec, d).phi(spec.gamma0) - target
    try:
        d = brentq(gap, 1e-10, 1e3, xtol=1e-15, rtol=1e-15)
    except ValueError as e:
        raise NoBracket(f"❌ φ = {target:.6g} 沒有對應的解析解") from e
    return closed_form_for(spec, d)


def convergence_study(
    spec: ProblemSpec,
    grids: Sequence[Tuple[int, int]] = ((32, 32), (64, 64), (128, 128)),
    tol: float = NEWTON_TOLERANCE,
    oracle=None,
) -> List[Dict]:
    """
    在一列網格上求解並與解析解比較

    Returns:
        每個網格一列：nr、ntheta、h、sup_error、iterations、order（相鄰網格的觀察階數）、flag
    """
    oracle = oracle or oracle_for(spec)
    table: List[Dict] = []
    for nr, ntheta in grids:
        grid = PolarGrid.on(spec.domain, nr, ntheta)
        solution, report = newton_solve(spec, sample_solution_on_grid(oracle, spec, grid), tol)
        exact = field_values(oracle, grid.flat_points()).reshape(nr, ntheta)
        error = float(np.max(np.abs(solution.values - exact)))
        row = {"nr": nr, "ntheta": ntheta, "h": grid.hr, "sup_error": error,
               "iterations": report.iterations, "order": None, "flag": None}
        if error < ROUNDING_LEVEL:
            row["flag"] = "rounding"
        if table:
            prev = table[-1]
            if prev["sup_error"] >= ROUNDING_LEVEL and error >= ROUNDING_LEVEL:
                row["order"] = math.log(prev["sup_error"] / error) / math.log(prev["h"] / row["h"])
                if row["order"] < 1.8:
                    row["flag"] = "degraded"
                    logger.warning(f"⚠️ {nr}×{ntheta} 的觀察階數 {row['order']:.3f} 低於 1.8")
        table.append(row)
        logger.info(f"📋 {nr}×{ntheta}: sup error {error:.3e}, order {row['order']}")
    return table
