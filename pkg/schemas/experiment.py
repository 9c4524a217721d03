"""
實驗設定 / 結果 Pydantic Schema
✅ GraphSourceConfig：產生器設定或邊列表檔案
✅ ExperimentConfig：對應 JSON 設定檔（ε、δ 可給單一值或列表）
✅ MetricsRecord：每個試驗一列，欄位即 CSV 欄位
"""
import math
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from config.constants import EXPERIMENT
from schemas.graph import GeneratorModel
from schemas.localization import GainKind


class GraphSourceConfig(BaseModel):
    """圖的來源：產生器（model + 參數）或邊列表檔案（path）"""
    model: Optional[GeneratorModel] = Field(None, description="產生器模型", examples=["er"])
    n: Optional[int] = Field(None, ge=2, description="節點數", examples=[250])
    p: Optional[float] = Field(None, gt=0, lt=1, examples=[0.016])
    m: Optional[int] = Field(None, ge=1, examples=[2])
    radius: Optional[float] = Field(None, gt=0, examples=[0.3])
    degree: Optional[int] = Field(None, ge=2, examples=[3])
    seed: Optional[int] = Field(
        None,
        ge=0,
        description="固定產生器種子；省略時由 master_seed 推導",
    )
    path: Optional[str] = Field(None, description="邊列表檔案路徑", examples=["graphs/wan.txt"])
    instances: int = Field(default=1, ge=1, description="產生的圖實例數量", examples=[10])
    name: Optional[str] = Field(None, description="報表中的圖名稱", examples=["ER-250"])

    @model_validator(mode="after")
    def check_source(self):
        """model 與 path 必須恰好給一個"""
        if (self.model is None) == (self.path is None):
            raise ValueError("graph source 需要 model 或 path 其中之一")
        if self.model is not None and self.n is None:
            raise ValueError("產生器需要節點數 n")
        return self

    def display_name(self) -> str:
        if self.name:
            return self.name
        if self.path:
            return self.path
        return f"{self.model}-{self.n}"


class ExperimentConfig(BaseModel):
    """批次實驗設定（JSON 文件）"""
    graphs: List[GraphSourceConfig] = Field(..., min_length=1, description="圖來源列表")
    trials: int = Field(default=EXPERIMENT.TRIALS, ge=1, description="每個實例的試驗次數")
    epsilons: List[float] = Field(default=[0.0], min_length=1, description="ε 列表")
    deltas: List[float] = Field(default=[1.0], min_length=1, description="δ 列表")
    gains: List[GainKind] = Field(default=[GainKind.SIZE], min_length=1)
    k_s: Optional[int] = Field(
        None,
        description="靜態感測器數量，省略時為 ⌈0.02N⌉（最少 2）",
    )
    k_d: Optional[Union[int, Literal["inf"]]] = Field(
        None,
        description="動態感測器預算，省略時為 ⌈0.02N⌉，'inf' 表示無上限",
    )
    master_seed: int = Field(default=0, ge=0, description="主種子")
    baselines: List[Literal["random", "allstatic"]] = Field(default_factory=list)
    static_placement: Literal["kdrs"] = Field(default="kdrs")
    tolerance_scale: float = Field(default=1.0, gt=0, le=1, description="容忍常數 C")
    refresh_negatives: bool = Field(default=False)
    max_workers: Optional[int] = Field(None, ge=1, description="平行執行緒數量")

    @model_validator(mode="before")
    @classmethod
    def accept_single_values(cls, data):
        """允許 graph / epsilon / delta 寫成單一值"""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for single, plural in (("graph", "graphs"), ("epsilon", "epsilons"), ("delta", "deltas")):
            if single in data and plural not in data:
                data[plural] = data.pop(single)
        for plural in ("graphs", "epsilons", "deltas", "gains"):
            value = data.get(plural)
            if value is not None and not isinstance(value, list):
                data[plural] = [value]
        return data

    @field_validator("epsilons")
    @classmethod
    def validate_epsilons(cls, v):
        """ε 必須在 [0, 1]"""
        for eps in v:
            if not 0 <= eps <= 1:
                raise ValueError(f"epsilon 必須在 [0, 1]，收到 {eps}")
        return v

    @field_validator("deltas")
    @classmethod
    def validate_deltas(cls, v):
        """δ 必須大於 0"""
        for delta in v:
            if not delta > 0:
                raise ValueError(f"delta 必須大於 0，收到 {delta}")
        return v

    @field_validator("k_s")
    @classmethod
    def validate_k_s(cls, v):
        """靜態感測器至少 2 個（DRS 需要兩個見證點）"""
        if v is not None and v < EXPERIMENT.MIN_STATIC_SENSORS:
            raise ValueError("k_s 必須 >= 2")
        return v

    @field_validator("k_d")
    @classmethod
    def validate_k_d(cls, v):
        if isinstance(v, int) and v < 0:
            raise ValueError("k_d 不可為負")
        return v

    def all_gains(self) -> List[GainKind]:
        """實際執行的增益列表（RANDOM 基準線會自動加入）"""
        gains = list(dict.fromkeys(self.gains))
        if "random" in self.baselines and GainKind.RANDOM not in gains:
            gains.append(GainKind.RANDOM)
        return gains


class MetricsRecord(BaseModel):
    """單一試驗的結果列"""
    graph: str
    model: str
    n: int = Field(..., ge=1)
    eps: float = Field(..., ge=0, le=1)
    delta: float = Field(..., gt=0)
    gain: str
    trial: int = Field(..., ge=0)
    cost: Optional[float] = Field(None, description="|U|/N")
    success: Optional[float] = Field(None, description="1/|B|")
    localized: Optional[bool] = None
    T: Optional[float] = Field(None, description="從 t* 到定位完成的時間")
    mu: Optional[float] = Field(None, description="定位時已感染的節點比例")
    dynamic_count: Optional[int] = Field(None, ge=0)
    error: Optional[str] = None
    history: List[int] = Field(default_factory=list, description="每一步的 |B_i|，不寫入 CSV")

    @field_validator("cost", "success")
    @classmethod
    def validate_fraction(cls, v):
        """cost、success 在 (0, 1]"""
        if v is not None and not 0 < v <= 1 + 1e-12:
            raise ValueError(f"比例必須在 (0, 1]，收到 {v}")
        return v

    @field_validator("mu")
    @classmethod
    def validate_mu(cls, v):
        if v is not None and not 0 <= v <= 1:
            raise ValueError(f"mu 必須在 [0, 1]，收到 {v}")
        return v

    @model_validator(mode="after")
    def check_localized(self):
        """定位成功時 success 必須為 1"""
        if self.localized and self.success is not None and not math.isclose(self.success, 1.0):
            raise ValueError("localized=True 但 success != 1")
        return self

    @classmethod
    def failed(cls, error: str, **context) -> "MetricsRecord":
        """失敗的試驗：指標留空，只記錄錯誤訊息"""
        return cls(error=error, **context)

    def to_row(self) -> dict:
        return {column: getattr(self, column) for column in EXPERIMENT.CSV_COLUMNS}
