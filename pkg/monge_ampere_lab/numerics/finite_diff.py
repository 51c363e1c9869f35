"""
中央差分工具
四階中央差分的 Jacobian，可巢狀使用求高階導數
"""
from typing import Callable

import numpy as np

TensorField = Callable[[np.ndarray], np.ndarray]


def jacobian(F: TensorField, x: np.ndarray, h: float) -> np.ndarray:
    """
    四階中央差分 Jacobian

    Args:
        F: 點陣列 (m, n) → 張量陣列 (m, ...)
        x: 點陣列 (m, n)
        h: 步長

    Returns:
        (m, ..., n) 陣列，最後一軸是對 x_k 的偏導
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    columns = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        column = (-F(x + 2 * e) + 8 * F(x + e) - 8 * F(x - e) + F(x - 2 * e)) / (12.0 * h)
        columns.append(column)
    return np.stack(columns, axis=-1)


def derivative_tensor(F: TensorField, x: np.ndarray, h: float, order: int) -> np.ndarray:
    """巢狀 jacobian，order 階導數"""
    G = F
    for _ in range(order):
        G = (lambda inner: (lambda y: jacobian(inner, y, h)))(G)
    return G(x)


def sup_norm(tensor: np.ndarray) -> float:
    """逐點 Frobenius 範數取最大值（第一軸是取樣點）"""
    tensor = np.asarray(tensor, dtype=float)
    if tensor.ndim == 1:
        return float(np.max(np.abs(tensor)))
    flat = tensor.reshape(tensor.shape[0], -1)
    return float(np.max(np.linalg.norm(flat, axis=1)))


def directional_second_difference(f: Callable[[float], float], h: float) -> float:
    """(f(h) − 2f(0) + f(−h)) / h²"""
    return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
