"""
環形區域幾何
同心（任意維）與偏心（2-D）環形區域：法向量、法曲率、內邊界測地線、支撐函數
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from ..config import BOUNDARY_TOLERANCE, MAX_DIMENSION
from ..errors import InvalidDomain, NotTangent, PointNotOnBoundary
from ..numerics.sampling import halton_points, unit_directions

logger = logging.getLogger(__name__)


class DomainKind(Enum):
    """環形區域類型"""
    CONCENTRIC = "concentric"  # 同心球殼，任意維度
    SKEWED_2D = "skewed-2d"  # 兩圓都包住原點、內圓在外圓內的偏心平面環


@dataclass(frozen=True)
class AnnularDomain:
    """
    環形區域 Ω，Γ⁻ 為內邊界、Γ⁺ 為外邊界

    用 AnnularDomain.concentric(...) 或 AnnularDomain.skewed(...) 建構；
    建構時即檢查幾何不變量，之後不可變。
    """
    kind: DomainKind
    dim: int
    r_inner: float
    r_outer: float
    center_inner: Tuple[float, ...] = field(default=())
    center_outer: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not (2 <= self.dim <= MAX_DIMENSION):
            raise InvalidDomain(f"❌ 維度 {self.dim} 不在 [2, {MAX_DIMENSION}] 內")
        if self.r_inner <= 0 or self.r_outer <= 0:
            raise InvalidDomain("❌ 半徑必須為正")
        if self.kind is DomainKind.CONCENTRIC:
            if self.r_inner >= self.r_outer:
                raise InvalidDomain(f"❌ 需要 r_inner < r_outer，收到 {self.r_inner} ≥ {self.r_outer}")
            return
        if self.dim != 2:
            raise InvalidDomain("❌ 偏心環形區域只支援 2-D")
        c_in = np.asarray(self.center_inner, dtype=float)
        c_out = np.asarray(self.center_outer, dtype=float)
        if c_in.shape != (2,) or c_out.shape != (2,):
            raise InvalidDomain("❌ 偏心區域的圓心必須是 2 維向量")
        if np.linalg.norm(c_in) >= self.r_inner:
            raise InvalidDomain("❌ 內圓必須包住原點：|center_inner| < r_inner")
        if np.linalg.norm(c_out) >= self.r_outer:
            raise InvalidDomain("❌ 外圓必須包住原點：|center_outer| < r_outer")
        if np.linalg.norm(c_out - c_in) >= self.r_outer - self.r_inner:
            raise InvalidDomain("❌ 內圓必須嚴格在外圓內")

    @classmethod
    def concentric(cls, dim: int, r_inner: float, r_outer: float) -> "AnnularDomain":
        zero = tuple([0.0] * dim)
        return cls(DomainKind.CONCENTRIC, dim, float(r_inner), float(r_outer), zero, zero)

    @classmethod
    def skewed(cls, center_inner, center_outer, r_inner: float, r_outer: float) -> "AnnularDomain":
        return cls(
            DomainKind.SKEWED_2D,
            2,
            float(r_inner),
            float(r_outer),
            tuple(float(c) for c in center_inner),
            tuple(float(c) for c in center_outer),
        )

    @property
    def is_concentric(self) -> bool:
        return self.kind is DomainKind.CONCENTRIC

    @property
    def inner_center(self) -> np.ndarray:
        return np.asarray(self.center_inner, dtype=float)

    @property
    def outer_center(self) -> np.ndarray:
        return np.asarray(self.center_outer, dtype=float)

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "r_inner": self.r_inner,
            "r_outer": self.r_outer,
            "center_inner": list(self.center_inner),
            "center_outer": list(self.center_outer),
        }


def _check_on_inner(domain: AnnularDomain, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    radius = np.linalg.norm(x - domain.inner_center)
    if abs(radius - domain.r_inner) > BOUNDARY_TOLERANCE * domain.r_inner:
        raise PointNotOnBoundary(
            f"❌ 點 {x.tolist()} 不在 Γ⁻ 上（距圓心 {radius:.15g}，半徑 {domain.r_inner}）"
        )
    return x


def _check_tangent(domain: AnnularDomain, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    nu = inner_normal(domain, x)
    if abs(float(np.dot(xi, nu))) > 1e-10 or abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise NotTangent(f"❌ ξ = {xi.tolist()} 不是 Γ⁻ 在 {np.asarray(x).tolist()} 的單位切向量")
    return xi


def inner_normal(domain: AnnularDomain, x) -> np.ndarray:
    """
    Γ⁻ 上指向 Ω 內部的單位法向量

    同心區域為 x/|x|，偏心區域為 (x − center_inner)/r_inner。

    Raises:
        PointNotOnBoundary: x 不在 Γ⁻ 上（相對容差 1e-12）
    """
    x = _check_on_inner(domain, x)
    v = x - domain.inner_center
    return v / np.linalg.norm(v)


def normal_curvature(domain: AnnularDomain, x, xi) -> float:
    """Γ⁻ 在切向 ξ 的法曲率；球面 / 圓周上恆為 1/r"""
    _check_tangent(domain, x, xi)
    return 1.0 / domain.r_inner


def geodesic_on_inner(domain: AnnularDomain, x0, xi, s: float) -> np.ndarray:
    """
    過 x0、初速 ξ 的單位速度測地線 γ(s)

    γ(s) = c + r[cos(s/r) ν₀ + sin(s/r) ξ]，滿足 γ(0)=x0、γ′(0)=ξ、γ″(0)=−κν。
    """
    xi = _check_tangent(domain, x0, xi)
    if abs(s) >= math.pi * domain.r_inner:
        raise NotTangent(f"❌ |s| = {abs(s)} 超過 π·r_inner")
    nu0 = inner_normal(domain, x0)
    r = domain.r_inner
    return domain.inner_center + r * (math.cos(s / r) * nu0 + math.sin(s / r) * xi)


def min_support(domain: AnnularDomain) -> float:
    """m₀ = min_{Γ⁻} ⟨x, ν⟩；偏心時為 r_inner − |center_inner|"""
    if domain.is_concentric:
        return domain.r_inner
    return domain.r_inner - float(np.linalg.norm(domain.inner_center))


def graph_angle_ratio(p, nu) -> float:
    """
    ⟨(ν,0), (Du,−1)⟩ / ⟨−e_{n+1}, (Du,−1)⟩，圖形與柱面夾角的餘弦比

    分母恆為 1，所以結果就是 ⟨ν, p⟩。
    """
    p = np.asarray(p, dtype=float)
    nu = np.asarray(nu, dtype=float)
    graph_normal = np.append(p, -1.0)
    numerator = float(np.dot(np.append(nu, 0.0), graph_normal))
    e_last = np.zeros(len(p) + 1)
    e_last[-1] = -1.0
    denominator = float(np.dot(e_last, graph_normal))
    return numerator / denominator


def tangent_basis(domain: AnnularDomain, x) -> np.ndarray:
    """Γ⁻ 在 x 的正交切向量（列），由 [ν, I] 的 QR 分解補出"""
    nu = inner_normal(domain, x)
    n = len(nu)
    q, _ = np.linalg.qr(np.column_stack([nu, np.eye(n)]))
    basis = q[:, 1:n].T
    return basis


def sample_inner_boundary(domain: AnnularDomain, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Γ⁻ 上的取樣點與對應法向量"""
    directions = unit_directions(domain.dim, count)
    points = domain.inner_center + domain.r_inner * directions
    return points, directions


def sample_outer_boundary(domain: AnnularDomain, count: int) -> np.ndarray:
    directions = unit_directions(domain.dim, count)
    return domain.outer_center + domain.r_outer * directions


def contains(domain: AnnularDomain, x: np.ndarray, slack: float = 1e-12) -> np.ndarray:
    """x 是否在 Ω̄ 內（逐點）"""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    d_out = np.linalg.norm(x - domain.outer_center, axis=-1)
    d_in = np.linalg.norm(x - domain.inner_center, axis=-1)
    return (d_out <= domain.r_outer * (1 + slack)) & (d_in >= domain.r_inner * (1 - slack))


def outer_distance(domain: AnnularDomain, x: np.ndarray) -> np.ndarray:
    """d_x：到 Γ⁺ 的距離"""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return domain.r_outer - np.linalg.norm(x - domain.outer_center, axis=-1)


def diameter(domain: AnnularDomain) -> float:
    """Ω 的直徑；內洞嚴格在外球內，所以等於外球直徑"""
    return 2.0 * domain.r_outer


def max_abs_x(domain: AnnularDomain) -> float:
    """max_{Ω̄} |x|"""
    return float(np.linalg.norm(domain.outer_center)) + domain.r_outer


def sample_domain_points(domain: AnnularDomain, count: int) -> np.ndarray:
    """
    Ω 內的準隨機點

    2-D 同心：Halton 映射到 (r, θ)；其他情況先在外球取點再剔除內洞。
    """
    if domain.is_concentric and domain.dim == 2:
        u = halton_points(2, count)
        r = domain.r_inner + (domain.r_outer - domain.r_inner) * u[:, 0]
        theta = 2.0 * math.pi * u[:, 1]
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    if domain.is_concentric:
        u = halton_points(1, count)[:, 0]
        directions = unit_directions(domain.dim, count)
        r = domain.r_inner + (domain.r_outer - domain.r_inner) * u
        return r[:, None] * directions
    batch = halton_points(2, 4 * count)
    r = domain.r_outer * np.sqrt(batch[:, 0])
    theta = 2.0 * math.pi * batch[:, 1]
    candidates = domain.outer_center + np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    mask = np.linalg.norm(candidates - domain.inner_center, axis=-1) > domain.r_inner
    accepted = candidates[mask][:count]
    if len(accepted) < count:
        logger.warning(f"⚠️ 偏心區域只取到 {len(accepted)} / {count} 個點")
    return accepted
