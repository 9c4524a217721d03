"""
定位引擎 Pydantic Schema
✅ GainKind：size / drs / rc / random
✅ LocalizationConfig：預算、δ、ε、容忍常數 C、亂數種子
✅ LocalizationResult：最終候選集合與執行軌跡
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator


class GainKind(str, Enum):
    """動態感測器的選擇準則"""
    SIZE = "size"
    DRS = "drs"
    RC = "rc"
    RANDOM = "random"


class LocalizationConfig(BaseModel):
    """單次定位的參數"""
    gain: GainKind = Field(default=GainKind.SIZE, description="增益函數", examples=["size"])
    k_d: Optional[int] = Field(
        default=None,
        ge=0,
        description="動態感測器預算，None 表示無上限",
        examples=[5, None],
    )
    delta: float = Field(default=1.0, gt=0, description="佈署間隔 δ", examples=[1.0])
    epsilon: float = Field(default=0.0, ge=0, le=1, description="延遲雜訊 ε", examples=[0.2])
    tolerance_scale: float = Field(
        default=1.0,
        gt=0,
        le=1,
        description="容忍常數 C（ε̃ = Cε）",
        examples=[1.0],
    )
    seed: int = Field(default=0, ge=0, description="RC / RANDOM 用的亂數種子", examples=[7])
    refresh_negatives: bool = Field(
        default=False,
        description="確定性模式下每一步以目前的 τ 重新套用尚未感染的感測器",
    )

    model_config = {"frozen": True}

    @property
    def noisy(self) -> bool:
        return self.epsilon > 0

    @property
    def effective_epsilon(self) -> float:
        return self.tolerance_scale * self.epsilon


class LocalizationResult(BaseModel):
    """定位結果"""
    final_candidates: List[int] = Field(..., description="結束時的候選源頭 B")
    static_sensors: List[int] = Field(default_factory=list, description="靜態感測器 S")
    sensor_sequence: List[int] = Field(
        default_factory=list,
        description="依佈署順序的動態感測器 D",
    )
    sensors_used: int = Field(..., ge=0, description="|U| = |S| + |D|")
    steps: int = Field(..., ge=0, description="執行的步數（含被動觀測）")
    start_time: float = Field(default=0.0, description="偵測時間 τ_0")
    localization_time: float = Field(..., description="結束時的 τ")
    localized: bool = Field(..., description="最終集合是否恰為真實源頭")
    history: List[int] = Field(default_factory=list, description="每一步的 |B_i|，從 |B_0| 開始")

    @field_validator("final_candidates")
    @classmethod
    def validate_candidates(cls, v):
        """候選集合不可為空"""
        if not v:
            raise ValueError("final_candidates 不可為空")
        return sorted(v)

    @property
    def dynamic_count(self) -> int:
        return len(self.sensor_sequence)

    def to_summary(self) -> dict:
        """CLI 輸出用的 JSON 結構"""
        return {
            "candidates": self.final_candidates,
            "sensors": self.static_sensors + self.sensor_sequence,
            "steps": self.steps,
            "localized": self.localized,
            "time": self.localization_time,
        }
