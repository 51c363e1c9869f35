"""
同心環上的徑向解族 u^(k)
2-D 有完整閉式；n 維的斜率有閉式，u 本身以 Gauss-Legendre 積分
"""
import logging
import math
from abc import abstractmethod
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..config import MAX_DIMENSION
from ..errors import BadMu, IndexOutOfRange, ParameterOutOfRange, UnsupportedFamily
from ..geometry.domain import AnnularDomain
from ..geometry.psi import ConstantPsi, PsiSpec
from ..numerics.quadrature import adaptive_integrate
from .algebra import radial_hessians
from .base import BatchEvaluation, ClosedFormSolution

logger = logging.getLogger(__name__)


class RadialSolution(ClosedFormSolution):
    """徑向解共用部分：由 profile(r) 組出 u、Du、D²u"""

    psi: float
    r_inner: float
    r_outer: float
    d_k: float
    n: int

    @abstractmethod
    def profile(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """回傳 (u, u_r, u_rr)"""

    @property
    def domain(self) -> AnnularDomain:
        return AnnularDomain.concentric(self.n, self.r_inner, self.r_outer)

    def psi_spec(self) -> PsiSpec:
        return ConstantPsi(self.psi)

    def _eval_many(self, points: np.ndarray) -> BatchEvaluation:
        r = np.linalg.norm(points, axis=-1)
        u, u_r, u_rr = self.profile(r)
        grad = (u_r / r)[:, None] * points
        hess = radial_hessians(points, u_r, u_rr)
        return BatchEvaluation(u, grad, hess)

    def inner_value(self) -> float:
        return float(self.profile(np.array([self.r_inner]))[0][0])

    def phi(self, gamma0: float) -> float:
        """φ = d_k − γ₀u(R₋)，使 u 滿足內邊界 Robin 條件"""
        return self.d_k - gamma0 * self.inner_value()

    def describe(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "psi": self.psi,
            "r_inner": self.r_inner,
            "r_outer": self.r_outer,
            "d_k": self.d_k,
        }


@dataclass(frozen=True, eq=False)
class RadialConcentric2D(RadialSolution):
    """
    2-D 嚴格凸徑向解

    u_r = ψ√(r² + D_k)，D_k = −R₋² + (d_k/ψ)²；
    u = (ψ/2)[r√(r²+D_k) + D_k ln(r + √(r²+D_k))] − 同式在 R₊ 的值。
    d_k = ψR₋ 時退化成二次解 ψr²/2 − ψR₊²/2。
    """
    psi: float
    r_inner: float
    r_outer: float
    d_k: float
    n: int = field(default=2, init=False)
    family = "radial2d"

    def __post_init__(self):
        if self.psi <= 0 or self.d_k <= 0:
            raise ParameterOutOfRange("❌ ψ 與 d_k 必須為正")
        if not (0 < self.r_inner < self.r_outer):
            raise ParameterOutOfRange("❌ 需要 0 < r_inner < r_outer")

    @property
    def shift(self) -> float:
        """D_k"""
        return -self.r_inner ** 2 + (self.d_k / self.psi) ** 2

    def _antiderivative(self, r: np.ndarray) -> np.ndarray:
        D = self.shift
        root = np.sqrt(np.maximum(r * r + D, 0.0))
        return 0.5 * self.psi * (r * root + D * np.log(r + root))

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        D = self.shift
        root = np.sqrt(np.maximum(r * r + D, 0.0))
        u = self._antiderivative(r) - self._antiderivative(np.array(self.r_outer))
        u_r = self.psi * root
        u_rr = self.psi * r / root
        return u, u_r, u_rr


@dataclass(frozen=True, eq=False)
class RadialConcentricND(RadialSolution):
    """
    n 維徑向解：u_r = (ψⁿrⁿ − ψⁿR₋ⁿ + d_kⁿ)^{1/n}，u_rr = ψⁿ r^{n−1}/u_r^{n−1}

    u(r) = −∫_r^{R₊} u_r，以自適應 Gauss-Legendre 計算。
    """
    n: int
    psi: float
    r_inner: float
    r_outer: float
    d_k: float
    family = "radial-nd"

    def __post_init__(self):
        if not (2 <= self.n <= MAX_DIMENSION):
            raise ParameterOutOfRange(f"❌ n = {self.n} 超出 [2, {MAX_DIMENSION}]")
        if self.psi <= 0 or self.d_k <= 0:
            raise ParameterOutOfRange("❌ ψ 與 d_k 必須為正")
        if not (0 < self.r_inner < self.r_outer):
            raise ParameterOutOfRange("❌ 需要 0 < r_inner < r_outer")

    def slope(self, r: np.ndarray) -> np.ndarray:
        n, psi = self.n, self.psi
        return (psi ** n * r ** n - psi ** n * self.r_inner ** n + self.d_k ** n) ** (1.0 / n)

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        u_r = self.slope(r)
        u_rr = self.psi ** self.n * r ** (self.n - 1) / u_r ** (self.n - 1)
        flat = np.atleast_1d(r).ravel()
        u = np.array([-adaptive_integrate(self.slope, float(s), self.r_outer, rel_tol=1e-14) for s in flat])
        return u.reshape(np.shape(r)), u_r, u_rr


@dataclass(frozen=True)
class PhiSequence:
    """一列遞減到 0 的 d_k 及對應的 Robin 資料 φ_k"""
    psi: float
    gamma0: float
    r_inner: float
    r_outer: float
    d_values: List[float]

    def __post_init__(self):
        d = np.asarray(self.d_values, dtype=float)
        if len(d) == 0 or np.any(d <= 0):
            raise ParameterOutOfRange("❌ d_values 必須是非空的正數列")
        if np.any(np.diff(d) >= 0):
            raise ParameterOutOfRange("❌ d_values 必須嚴格遞減")

    def solution(self, k: int) -> RadialConcentric2D:
        return RadialConcentric2D(self.psi, self.r_inner, self.r_outer, float(self.d_values[k]))


def phi_k(seq: PhiSequence, k: int) -> float:
    """
    φ_k = d_k − γ₀ u^(k)(R₋)

    Raises:
        IndexOutOfRange: k 超出 d_values
    """
    if not (0 <= k < len(seq.d_values)):
        raise IndexOutOfRange(f"❌ k = {k} 超出 0..{len(seq.d_values) - 1}")
    return seq.solution(k).phi(seq.gamma0)


def critical_phi(psi: float, gamma0: float, r_inner: float, mu: float) -> float:
    """
    φ^ψ_∞ = (ψγ₀/2)[μ√(μ²−1) − ln(μ + √(μ²−1))] R₋²，其中 μ = R₊/R₋

    φ 低於此值時徑向問題沒有嚴格凸解。
    """
    if mu <= 1.0:
        raise BadMu(f"❌ μ 必須大於 1，收到 {mu}")
    if psi <= 0 or gamma0 <= 0 or r_inner <= 0:
        raise ParameterOutOfRange("❌ ψ、γ₀、R₋ 必須為正")
    root = math.sqrt(mu * mu - 1.0)
    return 0.5 * psi * gamma0 * (mu * root - math.acosh(mu)) * r_inner ** 2


def inner_hess_nn(sol: ClosedFormSolution) -> float:
    """ν·D²u·ν 在 Γ⁻ 上的值：ψⁿR₋^{n−1}/d_k^{n−1}"""
    if not isinstance(sol, RadialSolution):
        raise UnsupportedFamily(f"❌ {sol.family} 不是徑向解族")
    n = sol.n
    return sol.psi ** n * sol.r_inner ** (n - 1) / sol.d_k ** (n - 1)


def inner_dnn(sol: ClosedFormSolution) -> float:
    """
    內邊界的二階法向量報告值

    2-D 回傳 ψ²R₋/d_k + d_k/R₋（即 Γ⁻ 上 u_rr + u_r/r），n ≥ 3 回傳 ψⁿR₋^{n−1}/d_k^{n−1}。
    兩者在 d_k → 0 時都像 1/d_k^{n−1} 一樣爆破。
    """
    if not isinstance(sol, RadialSolution):
        raise UnsupportedFamily(f"❌ {sol.family} 不是徑向解族，請改用 eval")
    if sol.n == 2:
        return sol.psi ** 2 * sol.r_inner / sol.d_k + sol.d_k / sol.r_inner
    return inner_hess_nn(sol)


def gauss_image_mass_radial(sol: RadialConcentric2D) -> float:
    """
    ∫_{Du(Ω)} (1+|p|²)^{−2} dp，2-D 徑向解的梯度像是環 a ≤ |p| ≤ b

    等於 π[1/(1+a²) − 1/(1+b²)]，a = u_r(R₋)，b = u_r(R₊)。
    """
    _, slopes, _ = sol.profile(np.array([sol.r_inner, sol.r_outer]))
    a, b = float(slopes[0]), float(slopes[1])
    return math.pi * (1.0 / (1.0 + a * a) - 1.0 / (1.0 + b * b))
