"""
取樣工具
準隨機點（不打亂的 Halton 序列，結果可重現）、球面網格與極值的黃金分割細化
"""
import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import qmc

logger = logging.getLogger(__name__)


def halton_points(dim: int, count: int) -> np.ndarray:
    """
    產生 [0,1)^dim 內的 Halton 點

    不打亂、略過原點，所以同樣參數永遠得到同樣的點。
    """
    sampler = qmc.Halton(d=dim, scramble=False)
    return sampler.random(count + 1)[1:]


def fibonacci_sphere(count: int) -> np.ndarray:
    """3-D 單位球面上近似均勻的 count 個點"""
    index = np.arange(count, dtype=float) + 0.5
    polar = np.arccos(1.0 - 2.0 * index / count)
    azimuth = math.pi * (1.0 + math.sqrt(5.0)) * index
    return np.stack(
        [np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)],
        axis=-1,
    )


def unit_directions(dim: int, count: int) -> np.ndarray:
    """n 維單位方向：2-D 等角、3-D Fibonacci、更高維用 Halton 映射到高斯再正規化"""
    if dim == 2:
        theta = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    if dim == 3:
        return fibonacci_sphere(count)
    from scipy.stats import norm

    gaussian = norm.ppf(np.clip(halton_points(dim, count), 1e-12, 1.0 - 1e-12))
    return gaussian / np.linalg.norm(gaussian, axis=-1, keepdims=True)


def refine_periodic_minimum(
    f: Callable[[float], float],
    grid: np.ndarray,
    values: np.ndarray,
) -> Tuple[float, float]:
    """
    在週期參數網格上找最小值，再用黃金分割在相鄰節點間細化

    Args:
        f: 參數 → 值
        grid: 等距參數節點
        values: f 在 grid 上的值

    Returns:
        (參數, 最小值)
    """
    i = int(np.argmin(values))
    step = grid[1] - grid[0] if len(grid) > 1 else 0.0
    best_t, best_v = float(grid[i]), float(values[i])
    if step == 0.0:
        return best_t, best_v
    bracket = (best_t - step, best_t, best_t + step)
    try:
        result = minimize_scalar(f, bracket=bracket, method="golden", tol=1e-10)
    except ValueError:
        # 網格極值點不是嚴格的 bracket（平坦區），直接採用網格值
        return best_t, best_v
    if result.fun < best_v:
        return float(result.x), float(result.fun)
    return best_t, best_v


def refine_periodic_maximum(
    f: Callable[[float], float],
    grid: np.ndarray,
    values: np.ndarray,
) -> Tuple[float, float]:
    t, v = refine_periodic_minimum(lambda s: -f(s), grid, -np.asarray(values))
    return t, -v
