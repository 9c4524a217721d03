import logging
from typing import Iterable, Optional

from config.constants import SYSTEM
from config.settings import get_log_level


def _get_log_level() -> int:
    """從環境變數讀取 LOG_LEVEL，預設 INFO。"""
    return getattr(logging, get_log_level(), logging.INFO)


# 設定基本 logging 格式（只會在第一次 import 時執行，輸出到 stderr）
logging.basicConfig(
    level=_get_log_level(),
    format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
)

# 專用的 app logger
logger = logging.getLogger(SYSTEM.LOGGER_NAME)
logger.setLevel(_get_log_level())

# --progress 專用，預設只輸出失敗的試驗
progress_logger = logging.getLogger(f"{SYSTEM.LOGGER_NAME}.progress")
progress_logger.setLevel(logging.WARNING)


def log_io_operation(
    operation: str,
    target: str,
    success: bool,
    rows: Optional[int] = None,
    error: Optional[str] = None,
) -> None:
    """統一的檔案讀寫日誌格式。

    Args:
        operation: 操作類型，例如 "READ", "WRITE"
        target: 檔案路徑
        success: 是否成功
        rows: 讀寫列數（可選）
        error: 錯誤訊息（失敗時可選）
    """
    status = "SUCCESS" if success else "FAILED"
    base_msg = f"[IO] {operation} {target} - {status}"

    if rows is not None:
        base_msg += f" (rows={rows})"

    if error and not success:
        base_msg += f" | error={error}"

    if success:
        logger.info(base_msg)
    else:
        logger.error(base_msg)


def log_step(
    run_id: str,
    step: int,
    tau: float,
    candidates: int,
    sensor: Optional[int],
    gain: str,
) -> None:
    """定位迴圈每一步的日誌（DEBUG）"""
    placed = "-" if sensor is None else str(sensor)
    logger.debug(
        f"[STEP] run={run_id} i={step} tau={tau:g} |B|={candidates} "
        f"d_i={placed} gain={gain}"
    )


def log_trial(run_id: str, success: bool, error: Optional[str] = None, **metrics) -> None:
    """單一試驗結束時的日誌"""
    parts: Iterable[str] = (f"{k}={_fmt(v)}" for k, v in metrics.items())
    base_msg = f"[TRIAL] {run_id} " + " ".join(parts)
    if error:
        base_msg += f" | error={error}"
    if success:
        progress_logger.info(base_msg)
    else:
        progress_logger.warning(base_msg)


def enable_progress() -> None:
    """--progress：每個試驗輸出一行到 stderr"""
    progress_logger.setLevel(logging.INFO)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


# 簡單的自我測試（本機直接執行 logger.py 時用）
if __name__ == "__main__":
    logger.info("Logger module test started")
    log_io_operation("READ", "graph.txt", True, rows=10)
    log_io_operation("WRITE", "results.csv", False, error="Sample error")
    logger.info("Logger module test finished")
