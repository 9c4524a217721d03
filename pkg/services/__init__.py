"""
Services Package
統一管理所有服務層邏輯（圖、疫情模擬、解析集、定位引擎、實驗）
"""

from services.errors import (
    ConfigError,
    DegenerateEvidenceError,
    DisconnectedGraphError,
    DomainError,
    EdgeListParseError,
    SourceLocError,
    TrialError,
)
from services.logger import logger

__all__ = [
    'SourceLocError',
    'ConfigError',
    'DomainError',
    'EdgeListParseError',
    'DisconnectedGraphError',
    'DegenerateEvidenceError',
    'TrialError',
    'logger'
]
