"""
範例預設集
從 cli/config/presets.yml 讀取；檔案不存在或無法解析時改用內建的預設表
"""
import copy
import logging
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from ..errors import SpecError

logger = logging.getLogger(__name__)

# 配置文件路徑
CONFIG_DIR = Path(__file__).parent / "config"
CONFIG_FILE = CONFIG_DIR / "presets.yml"


class PresetLibrary:
    """
    預設集管理器

    每個預設是 {"description", "spec", "extras"}；spec 可直接交給 problem_spec_from_dict。
    取出的預設都是深拷貝，呼叫端可以自由修改。
    """

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = config_path or CONFIG_FILE
        self.presets: Dict[str, Dict] = {}
        self._load_config()

    def _load_config(self):
        """載入配置文件"""
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
            if not isinstance(data, dict) or not data:
                raise ValueError("預設檔是空的或格式不對")
            self.presets = data
            logger.debug(f"✅ 載入預設集: {self.config_path}")
        except Exception as e:
            logger.warning(f"⚠️ 無法讀取預設檔 {self.config_path}（{e}），使用內建預設")
            self._load_default_config()

    def _load_default_config(self):
        """載入默認配置"""
        unit_annulus = {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 2.0}
        self.presets = {
            "radial-blowup": {
                "description": "concentric annulus, psi = 1, phi from d_k",
                "spec": {
                    "domain": dict(unit_annulus),
                    "psi": {"kind": "constant", "value": 1.0},
                    "gamma0": 1.0,
                    "phi": {"kind": "phi-k", "d": 0.5},
                },
                "extras": {"mu": 2.0, "d_list": [1.0, 0.5, 0.1, 0.01, 0.001, 1e-6]},
            },
            "skewed-annulus": {
                "description": "skewed annulus with the quadratic solution",
                "spec": {
                    "domain": {"kind": "skewed-2d", "center_inner": [0.25, 0.0], "center_outer": [1.0, 0.0],
                               "r_inner": 0.5, "r_outer": 2.0},
                    "psi": {"kind": "constant", "value": 1.0},
                    "gamma0": 1.0,
                    "phi": {"kind": "skewed-quadratic"},
                },
                "extras": {"probe_points": [[0.75, 0.0], [7.0 / 12.0, 5.0 ** 0.5 / 6.0], [7.0 / 12.0, -(5.0 ** 0.5) / 6.0]]},
            },
            "structure-counterexample": {
                "description": "gradient blow-up counterexample, g = 1/|x|, h = exp(-rho)/rho",
                "spec": {
                    "domain": {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 1.5},
                    "psi": {"kind": "gradient-blowup"},
                    "gamma0": 1.0,
                    "phi": {"kind": "constant", "value": 0.0},
                },
                "extras": {"width": 0.5, "dk": 0.5},
            },
            "gauss-curvature-omega": {
                "description": "prescribed Gauss curvature vanishing on the outer boundary",
                "spec": {
                    "domain": dict(unit_annulus),
                    "psi": {"kind": "gauss-curvature", "profile": {"kind": "outer-vanishing", "k0": 0.05, "power": 1.0}},
                    "gamma0": 0.0,
                    "phi": {"kind": "constant", "value": 1.0},
                },
                "extras": {"mass_dims": [1, 2]},
            },
            "radial-flow": {
                "description": "radial flow benchmark u0 = r^2/2 - 2",
                "spec": {
                    "domain": dict(unit_annulus),
                    "psi": {"kind": "constant", "value": 1.0},
                    "gamma0": 2.0,
                    "phi": {"kind": "constant", "value": 4.0},
                    "flow": {
                        "theta": {"kind": "linear", "rate": -1.0},
                        "phi_rate": 1.0,
                        "u0": {"kind": "closed-form", "family": "radial2d", "psi": 1.0, "d": 1.0},
                        "T": 1.0,
                    },
                },
                "extras": {"dt": 4e-4, "nodes": 33},
            },
        }

    def names(self) -> List[str]:
        return sorted(self.presets)

    def get(self, name: str) -> Dict:
        """
        取出一個預設的深拷貝

        Raises:
            SpecError: 沒有這個預設
        """
        if name not in self.presets:
            raise SpecError(f"❌ 未知的預設 {name}，可用：{', '.join(self.names())}")
        preset = copy.deepcopy(self.presets[name])
        preset.setdefault("extras", {})
        preset["spec"].setdefault("name", name)
        return preset


# 全局單例
_preset_library: Optional[PresetLibrary] = None


def get_preset_library() -> PresetLibrary:
    """獲取全局預設集單例"""
    global _preset_library
    if _preset_library is None:
        _preset_library = PresetLibrary()
    return _preset_library
