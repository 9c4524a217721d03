"""
實驗結果資料存取層
✅ 實驗設定 JSON 讀取（pydantic 驗證）
✅ 每個試驗一列的 CSV、彙總 CSV
✅ 單次定位結果 JSON
"""
import io
import json

import pandas as pd
from pydantic import ValidationError

from config.constants import EXPERIMENT
from repository.base_repository import BaseFileRepository, PathLike
from schemas.experiment import ExperimentConfig
from services.errors import ConfigError
from services.logger import logger


class ResultRepository(BaseFileRepository):
    """實驗設定與結果檔案存取物件"""

    def load_config(self, path: PathLike) -> ExperimentConfig:
        text = self._read_text(path)
        try:
            return ExperimentConfig.model_validate(json.loads(text))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON: {e}") from e
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(p) for p in first["loc"])
            logger.error(f"❌ 實驗設定驗證失敗: {location}: {first['msg']}")
            raise ConfigError(f"{path}: {location}: {first['msg']}") from e

    def save_rows(self, rows: pd.DataFrame, path: PathLike) -> None:
        """固定欄位順序，確保相同設定輸出相同位元組"""
        rows = rows.reindex(columns=EXPERIMENT.CSV_COLUMNS)
        self._write_text(path, rows.to_csv(index=False, lineterminator="\n"))

    def load_rows(self, path: PathLike) -> pd.DataFrame:
        return pd.read_csv(io.StringIO(self._read_text(path)))

    def save_history(self, history: pd.DataFrame, path: PathLike) -> None:
        """候選集合大小曲線（每個試驗、每一步一列）"""
        history = history.reindex(columns=EXPERIMENT.HISTORY_COLUMNS)
        self._write_text(path, history.to_csv(index=False, lineterminator="\n"))

    def save_summary(self, summary: pd.DataFrame, path: PathLike) -> None:
        self._write_text(path, summary.to_csv(index=False, lineterminator="\n"))

    def save_json(self, payload: dict, path: PathLike) -> None:
        self._write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
