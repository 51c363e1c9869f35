"""
區域積分
∫_Ω g：以內圓心為極點的巢狀自適應積分；n 維同心時徑向積分配合球面網格平均
"""
import math
from typing import Callable

import numpy as np

from ..config import QUADRATURE_REL_TOL, SPHERE_MESH_NODES
from ..numerics.quadrature import adaptive_integrate, sphere_area
from ..numerics.sampling import unit_directions
from .domain import AnnularDomain


def _outer_exit(domain: AnnularDomain, direction: np.ndarray) -> np.ndarray:
    """從內圓心沿 direction 出發，碰到 Γ⁺ 的距離"""
    offset = domain.inner_center - domain.outer_center
    b = direction @ offset
    c = float(offset @ offset) - domain.r_outer ** 2
    return -b + np.sqrt(b * b - c)


def integrate_over_domain(
    domain: AnnularDomain,
    g: Callable[[np.ndarray], np.ndarray],
    rel_tol: float = QUADRATURE_REL_TOL,
) -> float:
    """
    ∫_Ω g(x) dx

    Args:
        domain: 環形區域
        g: 接受 (m, n) 點陣列的向量化函數
        rel_tol: 相對容差

    Returns:
        積分值
    """
    center = domain.inner_center
    if domain.dim == 2:
        def _radial(theta_values: np.ndarray) -> np.ndarray:
            out = np.empty_like(theta_values, dtype=float)
            for i, theta in enumerate(theta_values):
                direction = np.array([math.cos(theta), math.sin(theta)])
                exit_radius = float(_outer_exit(domain, direction)) if not domain.is_concentric else domain.r_outer
                ray = lambda r, d=direction: r * g(center + r[:, None] * d)
                out[i] = adaptive_integrate(ray, domain.r_inner, exit_radius, rel_tol=rel_tol)
            return out

        return adaptive_integrate(_radial, 0.0, 2.0 * math.pi, rel_tol=rel_tol)

    n = domain.dim
    directions = unit_directions(n, SPHERE_MESH_NODES)

    def _shell(r_values: np.ndarray) -> np.ndarray:
        out = np.empty_like(r_values, dtype=float)
        for i, r in enumerate(r_values):
            out[i] = r ** (n - 1) * float(np.mean(g(r * directions)))
        return out

    return sphere_area(n) * adaptive_integrate(_shell, domain.r_inner, domain.r_outer, rel_tol=rel_tol)
