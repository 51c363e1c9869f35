"""
自適應 Gauss-Legendre 積分
16 節點 panel，二分加細到相對容差；無界徑向積分以二進位殼層截斷
"""
import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as gamma_function

from ..config import QUADRATURE_MAX_DEPTH, QUADRATURE_REL_TOL, SHELL_TRUNCATION
from ..errors import NotIntegrable

logger = logging.getLogger(__name__)

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)
_EPS = np.finfo(float).eps

ScalarFunction = Callable[[np.ndarray], np.ndarray]


def sphere_area(n: int) -> float:
    """單位球面 S^{n-1} 的面積（n=1 時為兩點，面積 2）"""
    return 2.0 * math.pi ** (n / 2.0) / float(gamma_function(n / 2.0))


def unit_ball_volume(n: int) -> float:
    """單位 n 維球體體積 ω_n"""
    return math.pi ** (n / 2.0) / float(gamma_function(n / 2.0 + 1.0))


def gauss_legendre_panel(f: ScalarFunction, a: float, b: float) -> float:
    """在 [a, b] 上套用一個 16 節點 Gauss-Legendre panel"""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    values = np.asarray(f(mid + half * _NODES), dtype=float)
    return float(half * np.dot(_WEIGHTS, values))


def adaptive_integrate(
    f: ScalarFunction,
    a: float,
    b: float,
    rel_tol: float = QUADRATURE_REL_TOL,
    abs_tol: float = 0.0,
    max_depth: int = QUADRATURE_MAX_DEPTH,
) -> float:
    """
    自適應 Gauss-Legendre 積分

    比較整段 panel 與左右兩半之和，差距超過容差就遞迴二分。
    遞迴順序固定（先左後右），同樣輸入得到位元相同的結果。

    Args:
        f: 向量化的被積函數
        a, b: 積分區間
        rel_tol: 相對容差
        abs_tol: 絕對容差下限
        max_depth: 最大二分深度

    Returns:
        積分值
    """
    if a == b:
        return 0.0
    whole = gauss_legendre_panel(f, a, b)
    magnitude = abs(gauss_legendre_panel(lambda x: np.abs(f(x)), a, b))
    tol = max(abs_tol, rel_tol * abs(whole), 64.0 * _EPS * magnitude)
    floor = 16.0 * _EPS * magnitude

    def _recurse(lo: float, hi: float, estimate: float, depth: int, tol: float) -> float:
        mid = 0.5 * (lo + hi)
        left = gauss_legendre_panel(f, lo, mid)
        right = gauss_legendre_panel(f, mid, hi)
        if abs(left + right - estimate) <= tol:
            return left + right
        if depth >= max_depth:
            logger.warning(f"⚠️ 積分在 [{lo:.3e}, {hi:.3e}] 達到最大深度 {max_depth}")
            return left + right
        # 兩半各分一半容差，葉節點誤差總和不超過 tol（捨入下限除外）
        half_tol = max(0.5 * tol, floor)
        return _recurse(lo, mid, left, depth + 1, half_tol) + _recurse(mid, hi, right, depth + 1, half_tol)

    return _recurse(a, b, whole, 0, tol)


def integrate_radial_ball(
    profile: ScalarFunction,
    n: int,
    radius: float,
    rel_tol: float = QUADRATURE_REL_TOL,
) -> float:
    """∫_{|p|≤R} h(|p|) dp = |S^{n-1}| ∫_0^R h(ρ) ρ^{n-1} dρ"""
    integrand = lambda rho: profile(rho) * rho ** (n - 1)
    return sphere_area(n) * adaptive_integrate(integrand, 0.0, radius, rel_tol=rel_tol)


def integrate_radial_whole_space(
    profile: ScalarFunction,
    n: int,
    rel_tol: float = QUADRATURE_REL_TOL,
    truncation: float = SHELL_TRUNCATION,
    max_shells: int = 200,
) -> float:
    """
    ∫_{R^n} h(|p|) dp，以二進位殼層 [2^k, 2^{k+1}] 累加

    殼層貢獻小於累計值的 truncation 倍時停止；殼層比值持續不衰減
    （連續三個殼層比值 ≥ 1）視為不可積。

    Raises:
        NotIntegrable: 尾部不衰減或超過殼層上限
    """
    integrand = lambda rho: profile(rho) * rho ** (n - 1)
    total = adaptive_integrate(integrand, 0.0, 1.0, rel_tol=rel_tol)
    previous: Optional[float] = None
    stagnant = 0
    lo = 1.0
    for _ in range(max_shells):
        hi = 2.0 * lo
        shell = adaptive_integrate(integrand, lo, hi, rel_tol=rel_tol)
        total += shell
        if abs(shell) <= truncation * abs(total):
            return sphere_area(n) * total
        if previous is not None and previous != 0.0 and abs(shell / previous) >= 1.0:
            stagnant += 1
            if stagnant >= 3:
                raise NotIntegrable(f"❌ 殼層貢獻不衰減（ρ ≈ {hi:.3e}），h 在 R^{n} 上不可積")
        else:
            stagnant = 0
        previous = shell
        lo = hi
    raise NotIntegrable(f"❌ {max_shells} 個殼層後仍未收斂")


def integrate_disk_2d(
    f: Callable[[np.ndarray], np.ndarray],
    center: np.ndarray,
    radius: float,
    r_start: float = 0.0,
    rel_tol: float = QUADRATURE_REL_TOL,
) -> float:
    """
    以 center 為極點的極座標巢狀積分：∫_{r_start}^{radius} r ∫_0^{2π} f dθ dr

    f 接受形狀 (m, 2) 的點陣列。
    """
    center = np.asarray(center, dtype=float)

    def _angular(r_values: np.ndarray) -> np.ndarray:
        out = np.empty_like(r_values, dtype=float)
        for i, r in enumerate(r_values):
            ring = lambda theta, r=r: f(center + r * np.stack([np.cos(theta), np.sin(theta)], axis=-1))
            out[i] = r * adaptive_integrate(ring, 0.0, 2.0 * math.pi, rel_tol=rel_tol)
        return out

    return adaptive_integrate(_angular, r_start, radius, rel_tol=rel_tol)
