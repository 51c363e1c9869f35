"""
解析解的共同介面
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import OutOfDomain
from ..geometry.domain import AnnularDomain, contains
from ..geometry.psi import PsiSpec


@dataclass(frozen=True)
class Evaluation:
    """單點的 (u, Du, D²u)"""
    u: float
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True)
class BatchEvaluation:
    """多點的 (u, Du, D²u)，形狀 (m,), (m, n), (m, n, n)"""
    u: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def __getitem__(self, i: int) -> Evaluation:
        return Evaluation(float(self.u[i]), self.grad[i], self.hess[i])


FieldEvaluator = Callable[[np.ndarray], Evaluation]


class ClosedFormSolution(ABC):
    """
    解析解族的基底類別

    子類別實作 eval_many（向量化）、psi_spec 與 domain。
    """

    family = "abstract"

    @property
    @abstractmethod
    def domain(self) -> AnnularDomain:
        """解所在的環形區域"""

    @abstractmethod
    def psi_spec(self) -> PsiSpec:
        """使此解滿足 det D²u = ψⁿ 的 ψ"""

    @abstractmethod
    def _eval_many(self, points: np.ndarray) -> BatchEvaluation:
        pass

    def eval_many(self, points, check_domain: bool = True) -> BatchEvaluation:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if check_domain and not np.all(contains(self.domain, points, slack=1e-10)):
            raise OutOfDomain(f"❌ {self.family}: 有取樣點落在 Ω̄ 之外")
        return self._eval_many(points)

    def eval(self, x) -> Evaluation:
        return self.eval_many(np.asarray(x, dtype=float)[None, :])[0]

    def __call__(self, x) -> Evaluation:
        return self.eval(x)

    def inner_neumann_data(self, points: np.ndarray) -> np.ndarray:
        """Γ⁻ 上的 u_ν（ν 為指向 Ω 內的法向量）"""
        points = np.atleast_2d(points)
        batch = self.eval_many(points, check_domain=False)
        nu = points - self.domain.inner_center
        nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
        return np.sum(batch.grad * nu, axis=-1)

    def matching_phi(self, gamma0: float) -> Callable[[np.ndarray], np.ndarray]:
        """
        使此解滿足 u_ν = γ₀u + φ 的 φ，並以 ν = (x−c₋)/|x−c₋| 延拓到 Ω

        對徑向解，延拓為常數。
        """
        def phi(x: np.ndarray) -> np.ndarray:
            x = np.atleast_2d(np.asarray(x, dtype=float))
            direction = x - self.domain.inner_center
            direction = direction / np.linalg.norm(direction, axis=-1, keepdims=True)
            boundary = self.domain.inner_center + self.domain.r_inner * direction
            batch = self.eval_many(boundary, check_domain=False)
            return np.sum(batch.grad * direction, axis=-1) - gamma0 * batch.u

        return phi

    def describe(self) -> dict:
        return {"family": self.family}


def field_values(field, points: np.ndarray) -> np.ndarray:
    """
    取得 u 在 points 的值

    field 可以是 ClosedFormSolution（用 eval_many，不檢查區域）或任何
    接受 (m, n) 點陣列、回傳 (m,) 的函數。
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(field, ClosedFormSolution):
        return field.eval_many(points, check_domain=False).u
    return np.asarray(field(points), dtype=float).reshape(len(points))
