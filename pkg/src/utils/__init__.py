"""
工具模块

提供日志、随机数流、辅助函数等工具
"""

from .logger import setup_logging, ExperimentLogger
from .helpers import format_number, format_duration_ms, version_string
from .random_streams import make_rng, trial_seed

__all__ = [
    'setup_logging',
    'ExperimentLogger',
    'format_number',
    'format_duration_ms',
    'version_string',
    'make_rng',
    'trial_seed',
]
