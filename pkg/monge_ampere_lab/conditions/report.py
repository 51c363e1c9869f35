"""
條件檢查報告
每個檢查器回傳 ConditionReport：margin > 0 即滿足
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class ConditionId(Enum):
    """可檢查的可解性 / 結構條件"""
    CURVATURE = "Curvature"  # 2κ_ξ < γ₀ + max{0, min(γ₀u+φ)/(M−u)}
    CURVATURE_DU = "CurvatureDu"  # 帶 C̃、M̃、N 的加權版本
    STRUCTURE = "Structure"  # ∫_Ω g < ∫_{Rⁿ} h
    STRUCTURE_GRADIENT = "StructureGradient"  # Γ⁺ 附近 ψⁿ ≤ Z d^β |p|^{β+n+1}
    SUBSOLUTION = "Subsolution"  # 切向二階導數下界 τ
    FLOW_SUBSOLUTION = "FlowSubsolution"  # 嚴格拋物下解
    PRESCRIBED_GAUSS = "PrescribedGauss"  # ∫_Ω K < ω_n 且 K = 0 on Γ⁺


@dataclass(frozen=True)
class ConditionReport:
    """
    檢查結果

    satisfied 恆等於 margin > 0；constants_used 記錄不等式用到的所有常數，
    samples 放最差樣本之類的診斷資訊。
    """
    condition_id: ConditionId
    margin: float
    constants_used: Dict[str, Any] = field(default_factory=dict)
    samples: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return self.margin > 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "condition_id": self.condition_id.value,
            "satisfied": self.satisfied,
            "margin": self.margin,
            "constants_used": dict(self.constants_used),
            "samples": list(self.samples),
        }


def snap_margin(margin: float, scale: float, tolerance: float) -> float:
    """|margin| ≤ tolerance·scale 時視為等號邊界，回傳 0（不滿足）"""
    if abs(margin) <= tolerance * max(1.0, abs(scale)):
        return 0.0
    return float(margin)


def point_sample(x, **values) -> Dict[str, Any]:
    """把一個取樣點與其數值整理成可序列化的字典"""
    out: Dict[str, Any] = {"x": [float(c) for c in x]}
    for key, value in values.items():
        out[key] = None if value is None else float(value)
    return out


def optional_float(value: Optional[float]) -> Optional[float]:
    return None if value is None else float(value)
