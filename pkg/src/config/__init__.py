"""
配置管理模块

提供统一的配置管理，支持实验配置档和环境变量配置
"""

from .base_config import BaseConfig
from .experiment_config import ExperimentConfig

__all__ = ['BaseConfig', 'ExperimentConfig']
