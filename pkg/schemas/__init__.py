"""
Pydantic Schemas 統一匯出
"""

from .graph import GeneratorModel, GeneratorSpec

from .localization import (
    GainKind,
    LocalizationConfig,
    LocalizationResult,
)

from .experiment import (
    GraphSourceConfig,
    ExperimentConfig,
    MetricsRecord,
)

__all__ = [
    # Graph schemas
    "GeneratorModel",
    "GeneratorSpec",

    # Localization schemas
    "GainKind",
    "LocalizationConfig",
    "LocalizationResult",

    # Experiment schemas
    "GraphSourceConfig",
    "ExperimentConfig",
    "MetricsRecord",
]
