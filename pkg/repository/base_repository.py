"""
基礎 Repository 類別
提供檔案讀寫的統一介面（日誌 + 錯誤處理）
"""
from pathlib import Path
from typing import Optional, Union

from services.logger import log_io_operation, logger

PathLike = Union[str, Path]


class BaseFileRepository:
    """Repository 基礎類別"""

    def __init__(self, base_dir: Optional[PathLike] = None):
        self.base_dir = Path(base_dir) if base_dir else None

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        if self.base_dir is not None and not path.is_absolute():
            return self.base_dir / path
        return path

    def _read_text(self, path: PathLike) -> str:
        """
        讀取文字檔的統一介面

        Args:
            path: 檔案路徑（相對路徑以 base_dir 為準）

        Returns:
            檔案內容
        """
        target = self._resolve(path)
        try:
            text = target.read_text(encoding="utf-8")
        except OSError as e:
            log_io_operation("READ", str(target), False, error=str(e))
            raise
        log_io_operation("READ", str(target), True, rows=text.count("\n"))
        return text

    def _write_text(self, path: PathLike, text: str) -> Path:
        """寫入文字檔（自動建立上層目錄）"""
        target = self._resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        except OSError as e:
            log_io_operation("WRITE", str(target), False, error=str(e))
            raise
        log_io_operation("WRITE", str(target), True, rows=text.count("\n"))
        logger.debug(f"寫入 {target}")
        return target
