"""
系統常數與設定 - 單一真相來源
所有硬編碼數值統一在此管理（容許誤差、產生器、定位引擎、實驗預設值）
"""

import math
from dataclasses import dataclass
from typing import List


@dataclass
class ToleranceConfig:
    """數值比較容許誤差"""
    TIME_TOL: float = 1e-9        # 時間相等判斷（一致性更新、T_i^c 分組）
    SIGNATURE_TOL: float = 1e-9   # 非整數權重時的距離差簽章量化
    GAIN_TIE_TOL: float = 1e-12   # argmax 平手判斷


@dataclass
class GeneratorConfig:
    """隨機圖產生器設定"""
    ER_MAX_RETRIES: int = 10000
    RGG_MAX_RETRIES: int = 1000
    PLT_EXPONENT: float = 2.5     # 冪律樹的度數指數


@dataclass
class LocalizationConfig:
    """定位引擎預設值"""
    DELTA: float = 1.0                 # 感測器佈署間隔 δ
    TOLERANCE_SCALE: float = 1.0       # 容忍常數 C
    STAGNATION_STEPS: int = 2          # 候選集連續未縮小的步數門檻
    IRWIN_HALL_MAX_TERMS: int = 20     # 超過此邊數改用高斯近似


@dataclass
class ExperimentConfig:
    """實驗預設值"""
    SENSOR_FRACTION: float = 0.02      # K_s = K_d = 0.02 * N
    MIN_STATIC_SENSORS: int = 2
    TRIALS: int = 100
    CSV_COLUMNS: List[str] = None
    SUMMARY_METRICS: List[str] = None
    HISTORY_COLUMNS: List[str] = None

    def __post_init__(self):
        self.CSV_COLUMNS = [
            "graph", "model", "n", "eps", "delta", "gain", "trial",
            "cost", "success", "localized", "T", "mu", "dynamic_count",
            "error",
        ]
        self.SUMMARY_METRICS = [
            "cost", "success", "localized", "T", "mu", "dynamic_count"
        ]
        self.HISTORY_COLUMNS = ["graph", "eps", "delta", "gain", "trial", "step", "candidates"]


@dataclass
class WanConfig:
    """航空網路權重設定"""
    ALPHA: float = 0.7     # 平均載客率
    THETA: float = 0.05    # 出發城市的感染比例
    MIN_SEATS: float = 20  # 每日座位數低於此值的航線移除


@dataclass
class SystemConfig:
    """系統設定"""
    LOG_LEVEL: str = "INFO"
    LOGGER_NAME: str = "sourceloc"
    MAX_WORKERS: int = 4


# ============== 全域常數實例 ==============
TOLERANCE = ToleranceConfig()
GENERATOR = GeneratorConfig()
LOCALIZATION = LocalizationConfig()
EXPERIMENT = ExperimentConfig()
WAN = WanConfig()
SYSTEM = SystemConfig()


# ============== 輔助函數 ==============
def default_sensor_budget(n: int) -> int:
    """預設感測器數量 ⌈0.02·N⌉"""
    return math.ceil(EXPERIMENT.SENSOR_FRACTION * n)
