"""
右端項 ψ 的規格
ψ 可依賴 x、u、Du；求解器與檢查器都透過 rhs() 取得 ψⁿ
"""
import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, Optional

import numpy as np

from ..errors import InvalidPsi, NegativeK

logger = logging.getLogger(__name__)

# 所有 evaluator 都是向量化的：x (..., n)、z (...)、p (..., n)
XFunction = Callable[[np.ndarray], np.ndarray]
XZFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]
XZPFunction = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class PsiSpec(ABC):
    """ψ 的抽象基底；子類別實作 rhs = ψⁿ"""

    kind = "abstract"
    depends_on_z = False
    depends_on_p = False

    @abstractmethod
    def rhs(self, x: np.ndarray, z: np.ndarray, p: np.ndarray) -> np.ndarray:
        """ψⁿ(x, z, p)，n 取自 x 的最後一軸"""

    def __call__(self, x: np.ndarray, z: np.ndarray, p: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        return np.asarray(self.rhs(x, z, p), dtype=float) ** (1.0 / n)

    def describe(self) -> Dict:
        return {"kind": self.kind}

    def sample_gradients(self, x: np.ndarray, scale: float) -> np.ndarray:
        """驗證 ψ 時使用的梯度樣本；預設為對稱方盒"""
        grid = np.linspace(-1.0, 1.0, 7)
        idx = np.arange(x.shape[0]) % len(grid)
        p = np.zeros_like(x)
        p[..., 0] = scale * grid[idx]
        p[..., -1] = scale * grid[::-1][idx]
        return p

    def validate(self, points: np.ndarray, z_range: float = 2.0, p_scale: float = 2.0) -> None:
        """
        以準隨機點檢查 ψ > 0（GaussCurvature 為 K ≥ 0）與 ψ_z ≥ 0

        只是取樣檢查，不是證明。

        Raises:
            InvalidPsi: 取樣到非正值、非有限值或 ψ_z < 0
        """
        m = points.shape[0]
        z = -z_range * (np.arange(m) % 11) / 10.0
        p = self.sample_gradients(points, p_scale)
        values = np.asarray(self.rhs(points, z, p), dtype=float)
        if not np.all(np.isfinite(values)):
            raise InvalidPsi(f"❌ ψ ({self.kind}) 在取樣點出現非有限值")
        if np.any(values <= 0.0):
            raise InvalidPsi(f"❌ ψ ({self.kind}) 在取樣點出現非正值：min = {values.min():.3e}")
        if self.depends_on_z:
            delta = 1e-6
            up = np.asarray(self.rhs(points, z + delta, p), dtype=float)
            down = np.asarray(self.rhs(points, z - delta, p), dtype=float)
            if np.any(up - down < -1e-9 * np.maximum(1.0, np.abs(values))):
                raise InvalidPsi(f"❌ ψ ({self.kind}) 違反 ψ_z ≥ 0")
        logger.debug(f"✅ ψ ({self.kind}) 通過 {m} 點取樣檢查")


class ConstantPsi(PsiSpec):
    """ψ ≡ 常數"""
    kind = "constant"

    def __init__(self, value: float):
        if value <= 0:
            raise InvalidPsi(f"❌ 常數 ψ 必須為正，收到 {value}")
        self.value = float(value)

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.value ** x.shape[-1])

    def describe(self):
        return {"kind": self.kind, "value": self.value}


class PsiOfX(PsiSpec):
    """ψ = f(x)"""
    kind = "of-x"

    def __init__(self, f: XFunction, label: str = "of-x", params: Optional[Dict] = None):
        self.f = f
        self.label = label
        self.params = params or {}

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.f(x), dtype=float) ** x.shape[-1]

    def describe(self):
        return {"kind": self.label, **self.params}


class PsiOfXZ(PsiSpec):
    """ψ = f(x, z)，宣告 ψ_z ≥ 0"""
    kind = "of-xz"
    depends_on_z = True

    def __init__(self, f: XZFunction, z_monotone: bool = True, label: str = "of-xz", params: Optional[Dict] = None):
        if not z_monotone:
            raise InvalidPsi("❌ 依賴 u 的 ψ 必須宣告 ψ_z ≥ 0")
        self.f = f
        self.label = label
        self.params = params or {}

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.f(x, z), dtype=float) ** x.shape[-1]

    def describe(self):
        return {"kind": self.label, **self.params}


class PsiOfXZP(PsiSpec):
    """ψ = f(x, z, p)，宣告 ψ_z ≥ 0"""
    kind = "of-xzp"
    depends_on_z = True
    depends_on_p = True

    def __init__(self, f: XZPFunction, z_monotone: bool = True, label: str = "of-xzp", params: Optional[Dict] = None):
        if not z_monotone:
            raise InvalidPsi("❌ 依賴 u 的 ψ 必須宣告 ψ_z ≥ 0")
        self.f = f
        self.label = label
        self.params = params or {}

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.f(x, z, p), dtype=float) ** x.shape[-1]

    def describe(self):
        return {"kind": self.label, **self.params}


class GaussCurvaturePsi(PsiSpec):
    """ψⁿ = K(x)(1+|p|²)^{(n+2)/2}，K ≥ 0 且可在 Γ⁺ 上為零"""
    kind = "gauss-curvature"
    depends_on_p = True

    def __init__(self, K: XFunction, params: Optional[Dict] = None):
        self.K = K
        self.params = params or {}

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        n = x.shape[-1]
        return np.asarray(self.K(x), dtype=float) * (1.0 + np.sum(p * p, axis=-1)) ** ((n + 2) / 2.0)

    def validate(self, points, z_range=2.0, p_scale=2.0):
        values = np.asarray(self.K(points), dtype=float)
        if not np.all(np.isfinite(values)):
            raise InvalidPsi("❌ K 在取樣點出現非有限值")
        if np.any(values < 0.0):
            raise NegativeK(f"❌ K 必須非負，取樣到 min K = {values.min():.3e}")

    def describe(self):
        return {"kind": self.kind, **self.params}


class InverseGaussFlowPsi(PsiSpec):
    """逆 Gauss 曲率流：ψⁿ = (1+|p|²)^{(n+3)/2}"""
    kind = "igcf"
    depends_on_p = True

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        n = x.shape[-1]
        return (1.0 + np.sum(p * p, axis=-1)) ** ((n + 3) / 2.0)


class GradientBlowupPsi(PsiSpec):
    """ψ² = (x·p/|x|²) exp(x·p/|x|)，梯度爆破反例（2-D）"""
    kind = "gradient-blowup"
    depends_on_p = True

    def rhs(self, x, z, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        radial_slope = np.sum(x * p, axis=-1) / r
        return (radial_slope / r) * np.exp(radial_slope)

    def sample_gradients(self, x, scale):
        # 只在 x·p > 0 的錐內才有定義
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        magnitude = scale * (0.1 + (np.arange(x.shape[0]) % 7)[:, None] / 7.0)
        return magnitude * x / r
