"""
基础配置类

提供环境变量管理和基础配置功能
"""

import os
import logging
from typing import Callable, TypeVar

from dotenv import load_dotenv

# 加载环境变量
load_dotenv()

T = TypeVar('T')

_TRUE_VALUES = ('true', '1', 'yes', 'on')
_FALSE_VALUES = ('false', '0', 'no', 'off')


class BaseConfig:
    """基础配置类"""

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)
        self._load_environment_variables()

    def _load_environment_variables(self):
        """加载环境变量"""
        # 系统配置
        self.LOG_LEVEL = getattr(logging, os.getenv('LOG_LEVEL', 'INFO').upper(), logging.INFO)
        self.LOG_DIR = os.getenv('LOG_DIR', 'logs')
        self.DEBUG_MODE = self.get_env_bool('DEBUG_MODE', False)

        # 输出与并行
        self.OUTPUT_DIR = os.getenv('OUTPUT_DIR', 'results')
        self.N_WORKERS = self.get_env_int('N_WORKERS', 1)
        self.DEFAULT_SEED = self.get_env_int('DEFAULT_SEED', 20240601)

        # Gibbs 抽样
        self.GIBBS_BURN_IN_SWEEPS = self.get_env_int('GIBBS_BURN_IN_SWEEPS', 50)
        self.GIBBS_SPACING_SWEEPS = self.get_env_int('GIBBS_SPACING_SWEEPS', 5)

        # 伪似然求解
        self.MPLE_GAMMA = self.get_env_float('MPLE_GAMMA', 1e-6)
        self.MPLE_MAX_ITER = self.get_env_int('MPLE_MAX_ITER', 100)
        self.DIVERGENCE_GUARD = self.get_env_float('DIVERGENCE_GUARD', 50.0)

    def _get_env(self, key: str, default: T, parse: Callable[[str], T]) -> T:
        """读取并转换环境变量, 未设置或无法转换时返回默认值"""
        raw = os.getenv(key)
        if raw is None or raw.strip() == '':
            return default
        try:
            return parse(raw.strip())
        except ValueError:
            self.logger.warning(f"无效的环境变量 {key}={raw!r}，使用默认值 {default}")
            return default

    def get_env_float(self, key: str, default: float = 0.0) -> float:
        return self._get_env(key, default, float)

    def get_env_int(self, key: str, default: int = 0) -> int:
        return self._get_env(key, default, int)

    def get_env_bool(self, key: str, default: bool = False) -> bool:
        def parse(raw: str) -> bool:
            value = raw.lower()
            if value in _TRUE_VALUES:
                return True
            if value in _FALSE_VALUES:
                return False
            raise ValueError(raw)
        return self._get_env(key, default, parse)

    def validate_config(self) -> bool:
        """验证配置有效性"""
        if self.N_WORKERS < 1:
            self.logger.error(f"N_WORKERS 必须至少为 1: {self.N_WORKERS}")
            return False
        if self.GIBBS_BURN_IN_SWEEPS < 0 or self.GIBBS_SPACING_SWEEPS < 1:
            self.logger.error("Gibbs 预热轮数不能为负, 间隔轮数至少为 1")
            return False
        if self.MPLE_GAMMA < 0 or self.MPLE_MAX_ITER < 1:
            self.logger.error("MPLE_GAMMA 不能为负, MPLE_MAX_ITER 至少为 1")
            return False
        if self.DIVERGENCE_GUARD <= 0:
            self.logger.error(f"DIVERGENCE_GUARD 必须为正: {self.DIVERGENCE_GUARD}")
            return False
        return True
