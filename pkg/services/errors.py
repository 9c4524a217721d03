"""
例外類別
所有服務層錯誤都繼承 SourceLocError，CLI 以此統一攔截
"""
from typing import Optional


class SourceLocError(Exception):
    """基礎例外"""


class ConfigError(SourceLocError, ValueError):
    """參數不合法（ε 超出範圍、k 超出範圍、K_s < 2 ...）"""


class DomainError(SourceLocError, ValueError):
    """數學上不合法的輸入（座位數 <= 0、空的見證集合 ...）"""


class EdgeListParseError(SourceLocError, ValueError):
    """邊列表解析錯誤，訊息包含行號與原始內容"""

    def __init__(self, line_no: int, line: str, reason: str):
        self.line_no = line_no
        self.line = line
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}: {line.strip()!r}")


class DisconnectedGraphError(SourceLocError):
    """圖不連通，存在無限距離"""


class DegenerateEvidenceError(SourceLocError):
    """候選源頭集合為空：觀測彼此矛盾"""


class TrialError(SourceLocError):
    """包裝單一試驗中的引擎錯誤，附帶試驗資訊"""

    def __init__(
        self,
        message: str,
        instance: Optional[str] = None,
        trial: Optional[int] = None,
        gain: Optional[str] = None,
        seed: Optional[int] = None,
    ):
        self.instance = instance
        self.trial = trial
        self.gain = gain
        self.seed = seed
        context = f"instance={instance} trial={trial} gain={gain} seed={seed}"
        super().__init__(f"{message} ({context})")
