"""
Monge-Ampère 環形區域驗證實驗室
解析解、可解性條件、先驗常數與三種求解器（徑向打靶、2-D 極座標 Newton、流方程）
"""
__version__ = "1.0.0"

from .errors import MongeAmpereLabError, SolverError, SpecError

__all__ = ["__version__", "MongeAmpereLabError", "SolverError", "SpecError"]
