"""
線性化恆等式的有限差分檢查
F^{ij}u_{ijξξ} = ln(ψⁿ)_ξξ + F^{ij}u_{jkξ}F^{kl}u_{liξ}，以及一階版本 F^{ij}u_{ijξ} = ln(ψⁿ)_ξ
F = (D²u)^{-1}；三、四階導數由解析 Hessian 的中央差分取得
"""
import logging
import math
from typing import Dict, Sequence

import numpy as np

from ..closed_form.base import ClosedFormSolution
from ..errors import SingularHessian

logger = logging.getLogger(__name__)


def _hessian(sol: ClosedFormSolution, y: np.ndarray) -> np.ndarray:
    return sol.eval_many(y[None, :], check_domain=False).hess[0]


def _log_rhs(sol: ClosedFormSolution, y: np.ndarray) -> float:
    batch = sol.eval_many(y[None, :], check_domain=False)
    return float(np.log(sol.psi_spec().rhs(y[None, :], batch.u, batch.grad))[0])


def _inverse_at(sol: ClosedFormSolution, x: np.ndarray) -> np.ndarray:
    H = _hessian(sol, x)
    det = float(np.linalg.det(H))
    if det <= 0.0 or not math.isfinite(det):
        raise SingularHessian(f"❌ det D²u = {det:.3e} ≤ 0，F = (D²u)^{{-1}} 不存在")
    return np.linalg.inv(H)


def linearization_identity_check(sol: ClosedFormSolution, x, xi, h: float) -> float:
    """
    |F^{ij}u_{ijξξ} − ln(ψⁿ)_ξξ − F^{ij}u_{jkξ}F^{kl}u_{liξ}|

    Returns:
        殘差；精確解下為 O(h²)

    Raises:
        SingularHessian: det D²u ≤ 0
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    F = _inverse_at(sol, x)
    H0, Hp, Hm = _hessian(sol, x), _hessian(sol, x + h * xi), _hessian(sol, x - h * xi)
    H_xi = (Hp - Hm) / (2.0 * h)
    H_xixi = (Hp - 2.0 * H0 + Hm) / (h * h)
    log_xixi = (_log_rhs(sol, x + h * xi) - 2.0 * _log_rhs(sol, x) + _log_rhs(sol, x - h * xi)) / (h * h)
    lhs = float(np.trace(F @ H_xixi))
    rhs = log_xixi + float(np.trace(F @ H_xi @ F @ H_xi))
    return abs(lhs - rhs)


def first_order_identity_check(sol: ClosedFormSolution, x, xi, h: float = 1e-4) -> float:
    """|F^{ij}u_{ijξ} − ln(ψⁿ)_ξ|"""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    F = _inverse_at(sol, x)
    H_xi = (_hessian(sol, x + h * xi) - _hessian(sol, x - h * xi)) / (2.0 * h)
    log_xi = (_log_rhs(sol, x + h * xi) - _log_rhs(sol, x - h * xi)) / (2.0 * h)
    return abs(float(np.trace(F @ H_xi)) - log_xi)


def linearization_refinement(sol: ClosedFormSolution, x, xi, steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3)) -> Dict:
    """在一列步長上計算殘差與相鄰步長間的觀察階數"""
    residuals = [linearization_identity_check(sol, x, xi, h) for h in steps]
    orders = []
    for (h0, r0), (h1, r1) in zip(zip(steps, residuals), zip(steps[1:], residuals[1:])):
        orders.append(math.log(r0 / r1) / math.log(h0 / h1) if r0 > 0 and r1 > 0 else None)
    logger.debug(f"📋 線性化殘差 {residuals}，觀察階數 {orders}")
    return {"steps": list(steps), "residuals": residuals, "orders": orders}
