"""
共用的測試夾具
單位環 1 < |x| < 2、偏心環，以及由字典建立問題規格的小工具
"""
import sys
from pathlib import Path

import pytest

_root = Path(__file__).resolve().parent.parent
if str(_root) not in sys.path:
    sys.path.insert(0, str(_root))

from monge_ampere_lab.geometry.domain import AnnularDomain
from monge_ampere_lab.geometry.problem import problem_spec_from_dict

UNIT_ANNULUS = {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 2.0}
SKEWED_ANNULUS = {"kind": "skewed-2d", "center_inner": [0.25, 0.0], "center_outer": [1.0, 0.0],
                  "r_inner": 0.5, "r_outer": 2.0}


def radial_spec(d: float = 0.5, psi: float = 1.0, gamma0: float = 1.0, dim: int = 2, **extra):
    """常數 ψ、phi-k 資料的同心規格"""
    domain = dict(UNIT_ANNULUS, dim=dim)
    data = {"domain": domain, "psi": {"kind": "constant", "value": psi}, "gamma0": gamma0,
            "phi": {"kind": "phi-k", "d": d}, **extra}
    return problem_spec_from_dict(data, f"radial-d{d:g}")


@pytest.fixture
def unit_annulus():
    return AnnularDomain.concentric(2, 1.0, 2.0)


@pytest.fixture
def skewed_annulus():
    return AnnularDomain.skewed((0.25, 0.0), (1.0, 0.0), 0.5, 2.0)


@pytest.fixture
def flow_spec():
    """u₀ = r²/2 − 2 的徑向流基準"""
    data = {
        "domain": dict(UNIT_ANNULUS),
        "psi": {"kind": "constant", "value": 1.0},
        "gamma0": 2.0,
        "phi": {"kind": "constant", "value": 4.0},
        "flow": {
            "theta": {"kind": "linear", "rate": -1.0},
            "phi_rate": 1.0,
            "u0": {"kind": "closed-form", "family": "radial2d", "psi": 1.0, "d": 1.0},
            "T": 1.0,
        },
    }
    return problem_spec_from_dict(data, "radial-flow")
