"""
偏心環上的解析解
二次解 (ψ/2)|x−γ₊|² − ψR₊²/2，以及平移後的徑向解 v(x) = u^(k)(x − γ₊)
"""
import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterOutOfRange, ValidityViolated
from ..geometry.domain import AnnularDomain, DomainKind, inner_normal
from ..geometry.psi import ConstantPsi, PsiSpec
from .base import BatchEvaluation, ClosedFormSolution
from .radial import RadialConcentric2D

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SkewedQuadratic(ClosedFormSolution):
    """u = (ψ/2)|x − γ₊|² − (ψ/2)R₊²，定義在偏心環 annulus 上"""
    psi: float
    annulus: AnnularDomain
    family = "skewed-quadratic"

    def __post_init__(self):
        if self.psi <= 0:
            raise ParameterOutOfRange("❌ ψ 必須為正")
        if self.annulus.dim != 2:
            raise ParameterOutOfRange("❌ 偏心二次解只在 2-D")

    @property
    def domain(self) -> AnnularDomain:
        return self.annulus

    def psi_spec(self) -> PsiSpec:
        return ConstantPsi(self.psi)

    def _eval_many(self, points):
        shifted = points - self.annulus.outer_center
        u = 0.5 * self.psi * np.sum(shifted * shifted, axis=-1) - 0.5 * self.psi * self.annulus.r_outer ** 2
        grad = self.psi * shifted
        hess = np.broadcast_to(self.psi * np.eye(2), (len(points), 2, 2)).copy()
        return BatchEvaluation(u, grad, hess)

    def describe(self):
        return {"family": self.family, "psi": self.psi, **self.annulus.describe()}


def skewed_inner_neumann(sol: SkewedQuadratic, domain: AnnularDomain, x) -> float:
    """
    u_ν = ψ[(γ₋ − γ₊)·ν + R₋] 在 Γ⁻ 上的閉式

    Raises:
        PointNotOnBoundary: x 不在 Γ⁻ 上
    """
    nu = inner_normal(domain, x)
    offset = domain.inner_center - domain.outer_center
    return float(sol.psi * (np.dot(offset, nu) + domain.r_inner))


def skewed_phi(sol: SkewedQuadratic, gamma0: float):
    """
    使偏心二次解滿足 u_ν = γ₀u + φ 的 φ

    φ = ψ((γ₋−γ₊)·ν + R₋) + (ψγ₀/2)(R₊² − |γ₋ − γ₊ + R₋ν|²)，
    ν = (x − γ₋)/|x − γ₋| 同時給出 Ω 內的延拓。
    """
    domain = sol.annulus
    offset = domain.inner_center - domain.outer_center

    def phi(x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        nu = x - domain.inner_center
        nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
        neumann = sol.psi * (nu @ offset + domain.r_inner)
        arm = offset + domain.r_inner * nu
        return neumann + 0.5 * sol.psi * gamma0 * (domain.r_outer ** 2 - np.sum(arm * arm, axis=-1))

    return phi


@dataclass(frozen=True, eq=False)
class SkewedShifted(ClosedFormSolution):
    """
    v(x) = u^(k)(x − γ₊)

    annulus 的外圓必須是 |x − γ₊| = R₊（與 inner 相同），
    且 Ω̄ 上處處 |x − γ₊| ≥ inner.r_inner，否則建構失敗。
    """
    inner: RadialConcentric2D
    annulus: AnnularDomain
    family = "skewed-shifted"

    def __post_init__(self):
        if self.annulus.kind is not DomainKind.SKEWED_2D:
            raise ParameterOutOfRange("❌ SkewedShifted 需要偏心區域")
        if abs(self.annulus.r_outer - self.inner.r_outer) > 1e-12 * self.inner.r_outer:
            raise ValidityViolated("❌ 外圓半徑必須與徑向解的 R₊ 相同")
        gap = np.linalg.norm(self.annulus.outer_center - self.annulus.inner_center)
        # Ω̄ 上 |x − γ₊| 的最小值：γ₊ 在內洞裡時是到內圓的距離，否則為 0
        closest = self.annulus.r_inner - gap if gap < self.annulus.r_inner else 0.0
        if closest < self.inner.r_inner:
            raise ValidityViolated(
                f"❌ min_Ω̄ |x − γ₊| = {closest:.6g} < R₋ = {self.inner.r_inner}，平移解不成立"
            )

    @property
    def domain(self) -> AnnularDomain:
        return self.annulus

    def psi_spec(self) -> PsiSpec:
        return ConstantPsi(self.inner.psi)

    def _eval_many(self, points):
        shifted = points - self.annulus.outer_center
        batch = self.inner.eval_many(shifted, check_domain=False)
        return BatchEvaluation(batch.u, batch.grad, batch.hess)

    def describe(self):
        return {"family": self.family, "inner": self.inner.describe(), **self.annulus.describe()}


def shifted_radial_phi(sol: SkewedShifted, gamma0: float):
    """平移徑向解在偏心 Γ⁻ 上對應的 φ（以 (x−γ₋)/|x−γ₋| 延拓）"""
    return sol.matching_phi(gamma0)
