"""
梯度爆破反例
ψ² = (x·Du/|x|²) exp(x·Du/|x|) 時，u_r 在 d_k → −ln(R₊−R₋) 時於 Γ⁺ 上爆破
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterOutOfRange
from ..geometry.domain import AnnularDomain
from ..geometry.psi import GradientBlowupPsi, PsiSpec
from .algebra import radial_hessians
from .base import BatchEvaluation, ClosedFormSolution

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GradientBlowup(ClosedFormSolution):
    """
    u(r) = A(r)[ln A(r) − 1] − A(R₊)[ln A(R₊) − 1]，A(r) = e^{−d_k} + R₋ − r

    u_r = −ln A，u_rr = 1/A；需要 R₊ − R₋ < 1 與 0 < d_k < −ln(R₊ − R₋)。
    """
    r_inner: float
    r_outer: float
    d_k: float
    family = "gradient-blowup"

    def __post_init__(self):
        width = self.r_outer - self.r_inner
        if not (0 < width < 1):
            raise ParameterOutOfRange(f"❌ 需要 0 < R₊ − R₋ < 1，收到 {width}")
        if not (0 < self.d_k < -math.log(width)):
            raise ParameterOutOfRange(
                f"❌ d_k = {self.d_k} 不在 (0, {-math.log(width):.6g}) 內"
            )

    @property
    def domain(self) -> AnnularDomain:
        return AnnularDomain.concentric(2, self.r_inner, self.r_outer)

    def psi_spec(self) -> PsiSpec:
        return GradientBlowupPsi()

    def _gap(self, r):
        return math.exp(-self.d_k) + self.r_inner - r

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        a = self._gap(r)
        a_out = self._gap(self.r_outer)
        u = a * (np.log(a) - 1.0) - a_out * (math.log(a_out) - 1.0)
        return u, -np.log(a), 1.0 / a

    def _eval_many(self, points):
        r = np.linalg.norm(points, axis=-1)
        u, u_r, u_rr = self.profile(r)
        grad = (u_r / r)[:, None] * points
        return BatchEvaluation(u, grad, radial_hessians(points, u_r, u_rr))

    def describe(self):
        return {"family": self.family, "r_inner": self.r_inner, "r_outer": self.r_outer, "d_k": self.d_k}


@dataclass(frozen=True)
class BlowupFamilyResult:
    u: GradientBlowup
    sup_grad: float
    phi: float


def blowup_gradient_family(fam: GradientBlowup, gamma0: float = 1.0) -> BlowupFamilyResult:
    """
    梯度爆破族的摘要：解本身、sup|Du| = −ln(e^{−d_k} + R₋ − R₊)、Robin 資料 φ

    φ = d_k − γ₀u(R₋) = d_k + γ₀{e^{−d_k}(d_k+1) + A₊[ln A₊ − 1]}。
    """
    sup_grad = -math.log(fam._gap(fam.r_outer))
    u_inner = float(fam.profile(np.array([fam.r_inner]))[0][0])
    phi = fam.d_k - gamma0 * u_inner
    logger.debug(f"📋 梯度爆破族 d_k={fam.d_k}: sup|Du|={sup_grad:.6g}, φ={phi:.6g}")
    return BlowupFamilyResult(fam, sup_grad, phi)
