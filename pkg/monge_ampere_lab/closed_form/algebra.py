"""
極座標 Monge-Ampère 行列式與徑向 Hessian
"""
from typing import Tuple

import numpy as np


def polar_det(u_r, u_rr, u_rtheta, u_theta, u_thetatheta, r):
    """
    2-D 極座標下的 det D²u

    u_rr u_r/r + u_rr u_θθ/r² − (u_rθ − u_θ/r)²/r²，各參數可為同形狀陣列。
    """
    mixed = u_rtheta - u_theta / r
    return u_rr * u_r / r + u_rr * u_thetatheta / (r * r) - mixed * mixed / (r * r)


def radial_hessian(n: int, r: float, u_r: float, u_rr: float, x) -> Tuple[np.ndarray, float]:
    """
    徑向函數的 Hessian：u_ij = (u_r/r)(δ_ij − x_i x_j/r²) + u_rr x_i x_j/r²

    Returns:
        (Hessian, 行列式)；行列式為 u_rr (u_r/r)^{n−1}
    """
    x = np.asarray(x, dtype=float)
    outer = np.outer(x, x) / (r * r)
    hess = (u_r / r) * (np.eye(n) - outer) + u_rr * outer
    det = u_rr * (u_r / r) ** (n - 1)
    return hess, float(det)


def radial_hessians(points: np.ndarray, u_r: np.ndarray, u_rr: np.ndarray) -> np.ndarray:
    """radial_hessian 的批次版本，points 形狀 (m, n)"""
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    r = np.linalg.norm(points, axis=-1)
    outer = np.einsum("mi,mj->mij", points, points) / (r * r)[:, None, None]
    eye = np.broadcast_to(np.eye(n), outer.shape)
    return (u_r / r)[:, None, None] * (eye - outer) + u_rr[:, None, None] * outer
