"""
問題規格
ProblemSpec 集合區域、ψ、γ₀、φ 與可選的流資料；可由 JSON 的內建項目組出
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np

from ..config import PSI_SAMPLE_COUNT
from ..errors import GammaZero, InvalidPsi, ParameterOutOfRange, SpecError
from .domain import AnnularDomain, sample_domain_points
from .psi import (
    ConstantPsi,
    GaussCurvaturePsi,
    GradientBlowupPsi,
    InverseGaussFlowPsi,
    PsiOfX,
    PsiOfXZ,
    PsiSpec,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryDatum:
    """Γ⁻ 上的 φ（連同 Ω 內的光滑延拓）"""
    kind: str
    func: Callable[[np.ndarray], np.ndarray]
    params: Dict[str, Any] = field(default_factory=dict)
    is_constant: bool = False

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(np.asarray(self.func(x[None, :]))[0])
        return np.asarray(self.func(x), dtype=float)

    def describe(self) -> Dict:
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class FlowData:
    """
    流方程資料

    theta(t) 為 Γ⁺ 上的 Dirichlet 值（θ′ < 0, θ(0) = 0），
    phi_t(x, t) 為時間相依的 Robin 資料，phi_rate(x, t) 為其時間導數（需 > 0）。
    """
    theta: Callable[[float], float]
    theta_rate: Callable[[float], float]
    phi_t: Callable[[np.ndarray, float], np.ndarray]
    phi_rate: Callable[[np.ndarray, float], np.ndarray]
    u0: Any
    horizon: float
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ProblemSpec:
    """完整問題實例：det D²u = ψⁿ，u = 0 on Γ⁺，u_ν = γ₀u + φ on Γ⁻"""
    domain: AnnularDomain
    psi: PsiSpec
    gamma0: float
    phi: BoundaryDatum
    flow: Optional[FlowData] = None
    name: str = "problem"
    source: Optional[Dict] = None

    def __post_init__(self):
        if self.gamma0 < 0:
            raise ParameterOutOfRange(f"❌ γ₀ 必須非負，收到 {self.gamma0}")
        self.psi.validate(sample_domain_points(self.domain, PSI_SAMPLE_COUNT))
        if self.flow is not None:
            theta0 = float(self.flow.theta(0.0))
            if abs(theta0) > 1e-14:
                raise SpecError(f"❌ 流資料需要 θ(0) = 0，收到 {theta0}")
            if self.flow.horizon < 0:
                raise ParameterOutOfRange("❌ 流的時間長度 T 必須非負")

    @property
    def dim(self) -> int:
        return self.domain.dim

    def require_positive_gamma(self) -> None:
        """引用 γ₀ > 0 假設的運算先呼叫這裡"""
        if self.gamma0 <= 0:
            raise GammaZero("❌ 此運算需要 γ₀ > 0")

    def inner_phi_value(self) -> float:
        """Γ⁻ 上 (R₋, 0, …) 處的 φ；徑向求解器用"""
        point = self.domain.inner_center.copy()
        point[0] += self.domain.r_inner
        return self.phi(point)

    def describe(self) -> Dict:
        out = {
            "name": self.name,
            "domain": self.domain.describe(),
            "psi": self.psi.describe(),
            "gamma0": self.gamma0,
            "phi": self.phi.describe(),
        }
        if self.flow is not None:
            out["flow"] = dict(self.flow.params)
        return out


# ---- 內建項目 ----

def _polynomial(coefficients):
    coeffs = [float(c) for c in coefficients]
    return lambda r: sum(c * r ** i for i, c in enumerate(coeffs))


def psi_from_dict(data: Dict, domain: AnnularDomain) -> PsiSpec:
    """
    由 JSON 內建項目建立 ψ

    支援：constant、power（c|x|^a）、radial-polynomial、exp-in-z（c·e^{sz}）、
    gauss-curvature（K 為 constant 或 outer-vanishing 剖面）、igcf、gradient-blowup。
    """
    kind = data.get("kind", "constant")
    if kind == "constant":
        return ConstantPsi(float(data.get("value", 1.0)))
    if kind == "power":
        c, a = float(data.get("coefficient", 1.0)), float(data.get("exponent", 0.0))
        return PsiOfX(lambda x: c * np.linalg.norm(x, axis=-1) ** a, label="power", params={"coefficient": c, "exponent": a})
    if kind == "radial-polynomial":
        poly = _polynomial(data["coefficients"])
        return PsiOfX(lambda x: poly(np.linalg.norm(x, axis=-1)), label="radial-polynomial",
                      params={"coefficients": list(data["coefficients"])})
    if kind == "exp-in-z":
        c, s = float(data.get("base", 1.0)), float(data.get("rate", 0.0))
        if s < 0:
            raise InvalidPsi("❌ exp-in-z 需要 rate ≥ 0（ψ_z ≥ 0）")
        return PsiOfXZ(lambda x, z: c * np.exp(s * np.asarray(z, dtype=float)) * np.ones(np.shape(x)[:-1]),
                       label="exp-in-z", params={"base": c, "rate": s})
    if kind == "gauss-curvature":
        profile = data.get("profile", {"kind": "constant", "value": 0.0})
        if profile.get("kind") == "constant":
            value = float(profile.get("value", 0.0))
            K = lambda x: np.full(np.shape(x)[:-1], value)
        elif profile.get("kind") == "outer-vanishing":
            k0, m = float(profile.get("k0", 1.0)), float(profile.get("power", 1.0))
            center, radius = domain.outer_center, domain.r_outer
            K = lambda x: k0 * np.maximum(radius - np.linalg.norm(x - center, axis=-1), 0.0) ** m
        else:
            raise InvalidPsi(f"❌ 未知的 K 剖面：{profile.get('kind')}")
        return GaussCurvaturePsi(K, params={"profile": profile})
    if kind == "igcf":
        return InverseGaussFlowPsi()
    if kind == "gradient-blowup":
        return GradientBlowupPsi()
    raise InvalidPsi(f"❌ 未知的 ψ 類型：{kind}")


def phi_from_dict(data: Dict, domain: AnnularDomain, psi: PsiSpec, gamma0: float) -> BoundaryDatum:
    """
    由 JSON 內建項目建立 φ

    支援：constant、phi-k（由 d_k 反推）、cosine（φ₀ + a cos(mθ)）、
    radial-polynomial（|x − γ₋| 的多項式）、skewed-quadratic。
    """
    from ..closed_form import RadialConcentric2D, RadialConcentricND, SkewedQuadratic, skewed_phi

    kind = data.get("kind", "constant")
    if kind == "constant":
        value = float(data.get("value", 0.0))
        return BoundaryDatum("constant", lambda x: np.full(np.shape(x)[0], value), {"value": value}, True)
    if kind == "phi-k":
        if not domain.is_concentric or not isinstance(psi, ConstantPsi):
            raise SpecError("❌ phi-k 需要同心區域與常數 ψ")
        d = float(data["d"])
        if domain.dim == 2:
            sol = RadialConcentric2D(psi.value, domain.r_inner, domain.r_outer, d)
        else:
            sol = RadialConcentricND(domain.dim, psi.value, domain.r_inner, domain.r_outer, d)
        value = sol.phi(gamma0)
        return BoundaryDatum("phi-k", lambda x: np.full(np.shape(x)[0], value), {"d": d, "value": value}, True)
    if kind == "cosine":
        base, amp, mode = float(data.get("base", 0.0)), float(data.get("amplitude", 0.0)), int(data.get("mode", 1))
        center = domain.inner_center

        def cosine(x):
            v = np.asarray(x, dtype=float) - center
            return base + amp * np.cos(mode * np.arctan2(v[:, 1], v[:, 0]))

        return BoundaryDatum("cosine", cosine, {"base": base, "amplitude": amp, "mode": mode}, amp == 0.0)
    if kind == "radial-polynomial":
        poly = _polynomial(data["coefficients"])
        center = domain.inner_center
        return BoundaryDatum("radial-polynomial", lambda x: poly(np.linalg.norm(np.asarray(x) - center, axis=-1)),
                             {"coefficients": list(data["coefficients"])}, len(data["coefficients"]) <= 1)
    if kind == "skewed-quadratic":
        if not isinstance(psi, ConstantPsi):
            raise SpecError("❌ skewed-quadratic φ 需要常數 ψ")
        return BoundaryDatum("skewed-quadratic", skewed_phi(SkewedQuadratic(psi.value, domain), gamma0), {})
    raise SpecError(f"❌ 未知的 φ 類型：{kind}")


def flow_from_dict(data: Dict, domain: AnnularDomain, phi: BoundaryDatum) -> FlowData:
    """
    流資料：theta 為 linear（θ = rate·t）或 saturating（θ = −a(1 − e^{−bt})），
    φ(x, t) = φ(x) + phi_rate·t，u0 為解析解族。
    """
    from ..closed_form import RadialConcentric2D, RadialConcentricND

    theta_data = data.get("theta", {"kind": "linear", "rate": -1.0})
    if theta_data.get("kind", "linear") == "linear":
        rate = float(theta_data.get("rate", -1.0))
        if rate >= 0:
            raise SpecError("❌ θ′ 必須為負")
        theta = lambda t: rate * t
        theta_rate = lambda t: rate
    elif theta_data["kind"] == "saturating":
        a, b = float(theta_data["amplitude"]), float(theta_data["speed"])
        if a <= 0 or b <= 0:
            raise SpecError("❌ saturating θ 需要正的 amplitude 與 speed")
        theta = lambda t: -a * (1.0 - math.exp(-b * t))
        theta_rate = lambda t: -a * b * math.exp(-b * t)
    else:
        raise SpecError(f"❌ 未知的 θ 類型：{theta_data.get('kind')}")

    phi_rate_value = float(data.get("phi_rate", 1.0))
    phi_t = lambda x, t: phi(np.atleast_2d(x)) + phi_rate_value * t
    phi_rate = lambda x, t: np.full(np.atleast_2d(x).shape[0], phi_rate_value)

    u0_data = data.get("u0", {"kind": "closed-form", "family": "radial2d", "psi": 1.0, "d": 1.0})
    psi_value = float(u0_data.get("psi", 1.0))
    d = float(u0_data.get("d", psi_value * domain.r_inner))
    if domain.dim == 2:
        u0 = RadialConcentric2D(psi_value, domain.r_inner, domain.r_outer, d)
    else:
        u0 = RadialConcentricND(domain.dim, psi_value, domain.r_inner, domain.r_outer, d)

    return FlowData(theta, theta_rate, phi_t, phi_rate, u0, float(data.get("T", 1.0)), dict(data))


def domain_from_dict(data: Dict) -> AnnularDomain:
    kind = data.get("kind", "concentric")
    if kind == "concentric":
        return AnnularDomain.concentric(int(data.get("dim", 2)), float(data["r_inner"]), float(data["r_outer"]))
    if kind == "skewed-2d":
        return AnnularDomain.skewed(data["center_inner"], data["center_outer"], float(data["r_inner"]), float(data["r_outer"]))
    raise SpecError(f"❌ 未知的區域類型：{kind}")


def problem_spec_from_dict(data: Dict, name: str = "problem") -> ProblemSpec:
    """{"domain":…, "psi":…, "gamma0":…, "phi":…, "flow":…} → ProblemSpec"""
    try:
        domain = domain_from_dict(data["domain"])
        psi = psi_from_dict(data.get("psi", {"kind": "constant", "value": 1.0}), domain)
        gamma0 = float(data.get("gamma0", 1.0))
        phi = phi_from_dict(data.get("phi", {"kind": "constant", "value": 0.0}), domain, psi, gamma0)
        flow = flow_from_dict(data["flow"], domain, phi) if data.get("flow") else None
    except KeyError as e:
        raise SpecError(f"❌ 問題規格缺少欄位：{e}") from e
    return ProblemSpec(domain, psi, gamma0, phi, flow, data.get("name", name), data)


def load_problem_spec(path: Path) -> ProblemSpec:
    """從 JSON 檔讀取問題規格"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SpecError(f"❌ 無法讀取問題規格 {path}: {e}") from e
    logger.info(f"✅ 載入問題規格: {path}")
    return problem_spec_from_dict(data, name=path.stem)
