"""
数据模块

JSON 模式校验与文件读写
"""

from .schemas import (
    ExperimentFileSchema,
    GraphSidecar,
    ModelSpecSchema,
    PopulationSchema,
    ThetaSchema,
)
from .storage import POPULATION_COLUMNS, TIMING_COLUMNS, TRIAL_COLUMNS, DataStorage

__all__ = [
    'DataStorage',
    'ExperimentFileSchema',
    'GraphSidecar',
    'ModelSpecSchema',
    'POPULATION_COLUMNS',
    'PopulationSchema',
    'TIMING_COLUMNS',
    'TRIAL_COLUMNS',
    'ThetaSchema',
]
