"""
環境變數設定
統一從 .env / os.environ 讀取執行期設定
"""
import os
from typing import Optional

from dotenv import load_dotenv

from config.constants import SYSTEM

# 載入 .env（本機開發用）
load_dotenv()


def get_env(var: str, default: Optional[str] = None) -> Optional[str]:
    """從 os.environ 讀環境變數，空字串視為未設定。"""
    value = os.getenv(var)
    if value:
        return value
    return default


def get_log_level() -> str:
    return (get_env("LOG_LEVEL", SYSTEM.LOG_LEVEL) or SYSTEM.LOG_LEVEL).upper()


def get_max_workers() -> int:
    """平行執行的 worker 數量（SOURCELOC_MAX_WORKERS）"""
    raw = get_env("SOURCELOC_MAX_WORKERS")
    if raw is None:
        return SYSTEM.MAX_WORKERS
    try:
        return max(1, int(raw))
    except ValueError:
        return SYSTEM.MAX_WORKERS


def get_master_seed(default: int = 0) -> int:
    raw = get_env("SOURCELOC_MASTER_SEED")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default
