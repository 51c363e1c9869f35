"""
同心 2-D 環上的極座標網格
r 節點含兩條邊界，θ_j = 2πj/Nθ（週期）
"""
import math
from dataclasses import dataclass

import numpy as np

from ..config import MIN_GRID_SIZE
from ..errors import GridTooCoarse, UnsupportedDomain
from .domain import AnnularDomain


@dataclass(frozen=True)
class PolarGrid:
    r_inner: float
    r_outer: float
    nr: int
    ntheta: int

    def __post_init__(self):
        if self.nr < MIN_GRID_SIZE or self.ntheta < MIN_GRID_SIZE:
            raise GridTooCoarse(f"❌ 網格 {self.nr}×{self.ntheta} 小於 {MIN_GRID_SIZE}×{MIN_GRID_SIZE}")

    @classmethod
    def on(cls, domain: AnnularDomain, nr: int, ntheta: int) -> "PolarGrid":
        if not domain.is_concentric or domain.dim != 2:
            raise UnsupportedDomain("❌ 極座標網格只支援 2-D 同心環")
        return cls(domain.r_inner, domain.r_outer, nr, ntheta)

    @property
    def hr(self) -> float:
        return (self.r_outer - self.r_inner) / (self.nr - 1)

    @property
    def htheta(self) -> float:
        return 2.0 * math.pi / self.ntheta

    @property
    def r_nodes(self) -> np.ndarray:
        return np.linspace(self.r_inner, self.r_outer, self.nr)

    @property
    def theta_nodes(self) -> np.ndarray:
        return self.htheta * np.arange(self.ntheta)

    def mesh(self):
        """(R, Θ)，形狀皆為 (nr, ntheta)"""
        return np.meshgrid(self.r_nodes, self.theta_nodes, indexing="ij")

    def points(self) -> np.ndarray:
        """笛卡兒座標，形狀 (nr, ntheta, 2)"""
        R, T = self.mesh()
        return np.stack([R * np.cos(T), R * np.sin(T)], axis=-1)

    def flat_points(self) -> np.ndarray:
        return self.points().reshape(-1, 2)

    def refined(self, factor: int = 2) -> "PolarGrid":
        return PolarGrid(self.r_inner, self.r_outer, factor * (self.nr - 1) + 1, factor * self.ntheta)
