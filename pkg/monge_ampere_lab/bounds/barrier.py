"""
二階估計的輔助函數
w = g(u)u_ξξ + a_k u_k + b + M|x|²，加權版本 w̃ = e^{N|Du|²} w；ν 延拓固定為 x/|x|
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..closed_form.base import ClosedFormSolution
from ..config import BARRIER_FD_FACTOR, BARRIER_MIN_GRID
from ..errors import GaugeUndefined, GridTooCoarse, ParameterOutOfRange, UnsupportedDomain
from ..geometry.grid import PolarGrid
from ..geometry.problem import ProblemSpec
from ..numerics.finite_diff import derivative_tensor, jacobian, sup_norm
from .constants import m_bound

logger = logging.getLogger(__name__)


# ---- 規範函數 g ----

class Gauge(ABC):
    """g(u) 與其導數；需要 g ≥ 0、g′ ≥ 0、g″ − 2g′²/g ≥ 0、−g′/g 有界"""

    @abstractmethod
    def value(self, u: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def d1(self, u: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def d2(self, u: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def check_defined(self, u: np.ndarray) -> None:
        """u 的取值讓 g 沒有定義時拋出 GaugeUndefined"""

    def identity(self, u: np.ndarray) -> np.ndarray:
        """g″ − 2(g′)²/g"""
        g = self.value(u)
        return self.d2(u) - 2.0 * self.d1(u) ** 2 / g

    def log_slope(self, u: np.ndarray) -> np.ndarray:
        """−g′/g"""
        return -self.d1(u) / self.value(u)


@dataclass(frozen=True)
class Reciprocal(Gauge):
    """g = 1/(M − u)，g′ = 1/(M − u)²，g″ − 2g′²/g ≡ 0"""
    M: float

    def check_defined(self, u):
        if np.any(self.M - np.asarray(u) <= 0.0):
            raise GaugeUndefined(f"❌ M = {self.M} ≤ sup u，g = 1/(M − u) 沒有定義")

    def value(self, u):
        return 1.0 / (self.M - u)

    def d1(self, u):
        return 1.0 / (self.M - u) ** 2

    def d2(self, u):
        return 2.0 / (self.M - u) ** 3


@dataclass(frozen=True)
class PowerLaw(Gauge):
    """
    g = B^q，B = M̃ + (1 − N⁴)u，q = 1/(1 − N⁴)

    g′ = B^{q−1}，g″ = N⁴B^{q−2}，所以 g″ − 2g′²/g = (N⁴ − 2)B^{q−2}。
    """
    M_tilde: float
    N: float

    def __post_init__(self):
        if self.N <= 1.0:
            raise ParameterOutOfRange(f"❌ 需要 N > 1，收到 {self.N}")

    @property
    def q(self) -> float:
        return 1.0 / (1.0 - self.N ** 4)

    def base(self, u):
        return self.M_tilde + (1.0 - self.N ** 4) * np.asarray(u, dtype=float)

    def check_defined(self, u):
        if np.any(self.base(u) <= 0.0):
            raise GaugeUndefined("❌ M̃ + (1 − N⁴)u ≤ 0，g 沒有定義")

    def value(self, u):
        return self.base(u) ** self.q

    def d1(self, u):
        return self.base(u) ** (self.q - 1.0)

    def d2(self, u):
        return self.N ** 4 * self.base(u) ** (self.q - 2.0)

    def closed_identity(self, u):
        return (self.N ** 4 - 2.0) * self.base(u) ** (self.q - 2.0)


def gauge_properties(gauge: Gauge, C0: float, count: int = 1001) -> Dict[str, float]:
    """在 u ∈ [−C₀, 0] 上取樣 g′ 與 −g′/g，以及 g″ − 2g′²/g 的範圍"""
    u = np.linspace(-C0, 0.0, count)
    gauge.check_defined(u)
    identity = gauge.identity(u)
    return {
        "d1_min": float(np.min(gauge.d1(u))),
        "log_slope_sup": float(np.max(np.abs(gauge.log_slope(u)))),
        "identity_min": float(np.min(identity)),
        "identity_max": float(np.max(identity)),
    }


@dataclass(frozen=True)
class BarrierSpec:
    """
    輔助函數的參數

    M 是 |x|² 的係數（Reciprocal 的 M 通常取同一個值），N 給定時計算加權版本 w̃。
    """
    gauge: Gauge
    xi: Tuple[float, ...]
    M: float
    N: Optional[float] = None
    nu_extension: str = "radial"

    def __post_init__(self):
        if self.nu_extension != "radial":
            raise UnsupportedDomain("❌ ν 延拓只支援 x/|x|")
        if abs(np.linalg.norm(self.xi) - 1.0) > 1e-12:
            raise ParameterOutOfRange("❌ ξ 必須是單位向量")

    @classmethod
    def reciprocal(cls, M: float, xi=(1.0, 0.0), N: Optional[float] = None) -> "BarrierSpec":
        return cls(Reciprocal(M), tuple(float(c) for c in xi), M, N)


# ---- a_k 與 b̄_k ----

def barrier_coefficients(points: np.ndarray, xi, gamma0: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    a_k = 2(ξ·ν)(γ₀ − 1/r)ξ′_k 與 b̄_k = 2(ξ·ν)ξ′_k，b = b̄·Dφ

    ν = x/|x|、ξ′ = ξ − (ξ·ν)ν；由 Dν = (I − νν)/r 得 ξ′_i D_k ν_i = ξ′_k/r。
    """
    points = np.asarray(points, dtype=float)
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(points, axis=-1, keepdims=True)
    nu = points / r
    s = nu @ xi
    xi_t = xi - s[:, None] * nu
    b_bar = 2.0 * s[:, None] * xi_t
    a = b_bar * (gamma0 - 1.0 / r)
    return a, b_bar


@dataclass(frozen=True)
class BarrierNorms:
    """a、b̄、φ、ln ψ 及其導數的 sup 範數（Frobenius），加上 ℓ₁、ℓ₂、ℓ₃"""
    a_sup: float
    da_sup: float
    d2a_sup: float
    b_sup: float
    db_sup: float
    d2b_sup: float
    dphi_sup: float
    d2phi_sup: float
    d3phi_sup: float
    psi_sup: float
    dlog_psi_sup: float
    d2log_psi_sup: float
    ell1: float
    ell2: float
    ell3: float
    C1: float
    resolution: Tuple[int, int]
    step: float

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["resolution"] = list(self.resolution)
        return out

    def norms(self) -> Dict[str, float]:
        return {"ell1": self.ell1, "ell2": self.ell2, "ell3": self.ell3, "a_sup": self.a_sup}

    def psi_norms(self) -> Dict[str, float]:
        return {"sup": self.psi_sup, "sup_dlog": self.dlog_psi_sup, "sup_d2log": self.d2log_psi_sup}


def sample_barrier_norms(spec: ProblemSpec, xi, C1: float, grid: Optional[PolarGrid] = None) -> BarrierNorms:
    """
    在極座標網格上以四階中央差分估計各項 sup 範數，再組出 ℓ₁、ℓ₂、ℓ₃

    ψ 只對 x 求導（z = 0、p = 0 處取值）。

    Raises:
        UnsupportedDomain: 不是 2-D 同心環
    """
    domain = spec.domain
    if not domain.is_concentric or domain.dim != 2:
        raise UnsupportedDomain("❌ sample_barrier_norms 只支援 2-D 同心環（ν = x/|x|）")
    grid = grid or PolarGrid.on(domain, 65, 128)
    points = grid.flat_points()
    h = BARRIER_FD_FACTOR * domain.r_inner
    gamma0 = spec.gamma0
    n = domain.dim

    A = lambda y: barrier_coefficients(y, xi, gamma0)[0]
    Bbar = lambda y: barrier_coefficients(y, xi, gamma0)[1]
    zeros = lambda y: (np.zeros(len(y)), np.zeros_like(y))
    log_psi = lambda y: np.log(spec.psi(y, *zeros(y)))
    phi = lambda y: spec.phi(y)

    a_sup = sup_norm(A(points))
    da_sup = sup_norm(jacobian(A, points, h))
    d2a_sup = sup_norm(derivative_tensor(A, points, h, 2))
    b_sup = sup_norm(Bbar(points))
    db_sup = sup_norm(jacobian(Bbar, points, h))
    d2b_sup = sup_norm(derivative_tensor(Bbar, points, h, 2))
    dphi_sup = sup_norm(jacobian(phi, points, h))
    d2phi_sup = sup_norm(derivative_tensor(phi, points, h, 2))
    d3phi_sup = sup_norm(derivative_tensor(phi, points, h, 3))
    psi_max = float(np.max(spec.psi(points, *zeros(points))))
    dlog_sup = sup_norm(jacobian(log_psi, points, h))
    d2log_sup = sup_norm(derivative_tensor(log_psi, points, h, 2))
    outer_radius = domain.r_outer

    ell1 = 2.0 * C1 * (C1 * da_sup + (C1 + dphi_sup) * db_sup + b_sup * d2phi_sup)
    ell2 = (d2a_sup * C1 + (C1 + dphi_sup) * d2b_sup + 2.0 * db_sup * d2phi_sup
            + b_sup * d3phi_sup + 4.0 * C1 * outer_radius)
    ell3 = (gamma0 * b_sup + n * (a_sup + gamma0 * b_sup) * dlog_sup
            + 2.0 * n * (da_sup + gamma0 * b_sup))
    logger.debug(f"📋 輔助函數範數：ℓ₁ = {ell1:.6g}, ℓ₂ = {ell2:.6g}, ℓ₃ = {ell3:.6g}")
    return BarrierNorms(
        a_sup, da_sup, d2a_sup, b_sup, db_sup, d2b_sup, dphi_sup, d2phi_sup, d3phi_sup,
        psi_max, dlog_sup, d2log_sup, ell1, ell2, ell3, C1, (grid.nr, grid.ntheta), h,
    )


def barrier_field(sol: ClosedFormSolution, spec: ProblemSpec, bspec: BarrierSpec, grid: PolarGrid) -> np.ndarray:
    """
    在網格上逐點計算 w（N 給定時為 w̃ = e^{N|Du|²} w）

    Returns:
        形狀 (nr, ntheta) 的陣列

    Raises:
        GaugeUndefined: g 在 u 的取值上沒有定義（Reciprocal 時 M ≤ sup u）
    """
    points = grid.flat_points()
    batch = sol.eval_many(points, check_domain=False)
    bspec.gauge.check_defined(batch.u)
    xi = np.asarray(bspec.xi, dtype=float)
    a, b_bar = barrier_coefficients(points, xi, spec.gamma0)
    dphi = jacobian(lambda y: spec.phi(y), points, BARRIER_FD_FACTOR * spec.domain.r_inner)
    u_xixi = np.einsum("i,mij,j->m", xi, batch.hess, xi)
    w = (bspec.gauge.value(batch.u) * u_xixi
         + np.sum(a * batch.grad, axis=-1)
         + np.sum(b_bar * dphi, axis=-1)
         + bspec.M * np.sum(points * points, axis=-1))
    if bspec.N:
        w = np.exp(bspec.N * np.sum(batch.grad * batch.grad, axis=-1)) * w
    return w.reshape(grid.nr, grid.ntheta)


@dataclass(frozen=True)
class BoundaryMaximum:
    index: Tuple[int, int]
    value: float
    at_boundary: bool


def boundary_maximum_check(values: np.ndarray, grid: PolarGrid) -> BoundaryMaximum:
    """
    w 的網格極大值是否落在 ∂Ω 的一格之內

    Raises:
        GridTooCoarse: 網格小於 128×128
    """
    if grid.nr < BARRIER_MIN_GRID or grid.ntheta < BARRIER_MIN_GRID:
        raise GridTooCoarse(f"❌ 邊界極大值檢查需要至少 {BARRIER_MIN_GRID}×{BARRIER_MIN_GRID} 的網格")
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    at_boundary = i <= 1 or i >= grid.nr - 2
    if not at_boundary:
        logger.warning(f"⚠️ w 的極大值出現在內部節點 r = {grid.r_nodes[i]:.6g}")
    return BoundaryMaximum((int(i), int(j)), float(values[i, j]), bool(at_boundary))


def reciprocal_identity_residual(M: float, u: np.ndarray) -> float:
    """Reciprocal 規範的 |g″ − 2g′²/g| 最大值"""
    return float(np.max(np.abs(Reciprocal(M).identity(np.asarray(u, dtype=float)))))


def suggested_M(norms: BarrierNorms, excess: float = 1.0) -> float:
    """m_bound 加上嚴格超出量"""
    return m_bound(norms.norms(), norms.psi_norms(), norms.C1, 2) + excess

