"""
隨機圖產生器 Pydantic Schema
✅ 五種模型：er / ba / rgg / rt / plt
✅ 參數範圍在建立時即驗證（0<p<1、m>=1、radius>0、degree>=2）
"""
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


GeneratorModel = Literal["er", "ba", "rgg", "rt", "plt"]


class GeneratorSpec(BaseModel):
    """產生器設定（model + n + seed + 模型參數）"""
    model: GeneratorModel = Field(..., description="產生器模型", examples=["er"])
    n: int = Field(..., ge=2, description="節點數", examples=[250])
    seed: int = Field(
        default=0,
        ge=0,
        lt=2**64,
        description="64-bit 亂數種子",
        examples=[7],
    )
    p: Optional[float] = Field(None, gt=0, lt=1, description="ER 連邊機率", examples=[0.016])
    m: Optional[int] = Field(None, ge=1, description="BA 每個新節點的邊數", examples=[2])
    radius: Optional[float] = Field(None, gt=0, description="RGG 球面半徑", examples=[0.3])
    degree: Optional[int] = Field(None, ge=2, description="正則樹的最大度數", examples=[3])

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_model_parameters(self):
        """驗證每個模型必要的參數"""
        required = {"er": "p", "ba": "m", "rgg": "radius", "rt": "degree"}
        name = required.get(self.model)
        if name and getattr(self, name) is None:
            raise ValueError(f"模型 {self.model} 需要參數 {name}")
        if self.model == "ba" and self.m >= self.n:
            raise ValueError("BA 模型需要 m < n")
        return self

    def label(self) -> str:
        """報表用的簡短名稱，例如 er(p=0.016)"""
        params = {"er": "p", "ba": "m", "rgg": "radius", "rt": "degree"}
        name = params.get(self.model)
        if name is None:
            return self.model
        return f"{self.model}({name}={getattr(self, name)})"
