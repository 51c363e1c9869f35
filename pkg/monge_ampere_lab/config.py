"""
配置模組
包含數值容差、取樣數量、求解器參數與輸出路徑設定
"""
import os
from dotenv import load_dotenv

load_dotenv()

# 輸出目錄（CLI 產生的 CSV / JSON / manifest 都寫在這裡）
OUTPUT_DIR = os.getenv("MA_LAB_OUTPUT_DIR", "./ma_lab_output")

# 日誌等級
LOG_LEVEL = os.getenv("MA_LAB_LOG_LEVEL", "INFO").upper()

# 幾何配置
BOUNDARY_TOLERANCE = float(os.getenv("MA_LAB_BOUNDARY_TOLERANCE", "1e-12"))  # 邊界成員判斷的相對容差
MAX_DIMENSION = int(os.getenv("MA_LAB_MAX_DIMENSION", "8"))  # 稠密 Hessian 的維度上限
PSI_SAMPLE_COUNT = int(os.getenv("MA_LAB_PSI_SAMPLE_COUNT", "1000"))  # ψ 正性檢查的準隨機點數

# 邊界取樣配置
INNER_BOUNDARY_SAMPLES = int(os.getenv("MA_LAB_INNER_BOUNDARY_SAMPLES", "720"))  # Γ⁻ 上的取樣點數（2-D）
SPHERE_MESH_NODES = int(os.getenv("MA_LAB_SPHERE_MESH_NODES", "1282"))  # 3-D 球面取樣節點數

# 積分配置
QUADRATURE_REL_TOL = float(os.getenv("MA_LAB_QUADRATURE_REL_TOL", "1e-10"))  # 自適應 Gauss-Legendre 相對容差
QUADRATURE_MAX_DEPTH = int(os.getenv("MA_LAB_QUADRATURE_MAX_DEPTH", "40"))  # 二分最大深度
SHELL_TRUNCATION = float(os.getenv("MA_LAB_SHELL_TRUNCATION", "1e-12"))  # 無界積分的殼層截斷比例

# 有限差分配置
SUBSOLUTION_STEP_FACTOR = float(os.getenv("MA_LAB_SUBSOLUTION_STEP_FACTOR", "1e-3"))  # U″ 步長 = 係數 × R₋
RICHARDSON_TOLERANCE = float(os.getenv("MA_LAB_RICHARDSON_TOLERANCE", "1e-4"))  # Richardson 外推的容許差
BARRIER_FD_FACTOR = float(os.getenv("MA_LAB_BARRIER_FD_FACTOR", "1e-4"))  # a_k / b 導數步長 = 係數 × R₋
TAU_FLOOR = float(os.getenv("MA_LAB_TAU_FLOOR", "1e-3"))  # 下解條件的 τ 預設值

# 徑向打靶配置
SHOOT_TOLERANCE = float(os.getenv("MA_LAB_SHOOT_TOLERANCE", "1e-10"))
SHOOT_MAX_ITERATIONS = int(os.getenv("MA_LAB_SHOOT_MAX_ITERATIONS", "100"))
SHOOT_BISECTION_WIDTH = float(os.getenv("MA_LAB_SHOOT_BISECTION_WIDTH", "1e-3"))  # 二分法縮到此寬度後改用 Newton
SHOOT_MIN_SLOPE = float(os.getenv("MA_LAB_SHOOT_MIN_SLOPE", "1e-12"))  # d → 0 的保護下限
RADIAL_NODES = int(os.getenv("MA_LAB_RADIAL_NODES", "1024"))
RADIAL_SWEEP_DAMPING = float(os.getenv("MA_LAB_RADIAL_SWEEP_DAMPING", "0.5"))  # ψ 依賴 u 時的兩段式迭代阻尼
RADIAL_MAX_SWEEPS = int(os.getenv("MA_LAB_RADIAL_MAX_SWEEPS", "50"))

# 2-D Newton 配置
NEWTON_TOLERANCE = float(os.getenv("MA_LAB_NEWTON_TOLERANCE", "1e-9"))
NEWTON_MAX_ITERATIONS = int(os.getenv("MA_LAB_NEWTON_MAX_ITERATIONS", "30"))
NEWTON_DAMPING_FLOOR = 2.0 ** -20  # Armijo 回溯的最小步長
MIN_GRID_SIZE = int(os.getenv("MA_LAB_MIN_GRID_SIZE", "16"))
BARRIER_MIN_GRID = int(os.getenv("MA_LAB_BARRIER_MIN_GRID", "128"))  # 邊界極大值檢查所需的最小網格

# 流方程配置
FLOW_SAFETY = float(os.getenv("MA_LAB_FLOW_SAFETY", "0.9"))  # 顯式時間步長的安全係數
FLOW_DET_FLOOR = float(os.getenv("MA_LAB_FLOW_DET_FLOOR", "1e-12"))
FLOW_ROBIN_TOLERANCE = float(os.getenv("MA_LAB_FLOW_ROBIN_TOLERANCE", "1e-10"))
FLOW_HISTORY_LENGTH = int(os.getenv("MA_LAB_FLOW_HISTORY_LENGTH", "4096"))  # 歷史環形緩衝區長度
ENABLE_GRID_FLOW = os.getenv("MA_LAB_ENABLE_GRID_FLOW", "false").lower() == "true"  # 2-D 網格流（實驗性）

# CSV 輸出：17 位有效數字可完整還原 double
CSV_DIGITS = 17
