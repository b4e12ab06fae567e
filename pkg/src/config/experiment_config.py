"""
实验配置类

环境变量 → 配置档 → JSON 文件 → 命令行覆盖, 逐层合并
"""

import importlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from src.core.exceptions import ConfigError
from src.data.schemas import ExperimentFileSchema

from .base_config import BaseConfig
from .profiles import get_profile_module, is_profile_supported

# 模拟群体生成器要求 N 是该数的倍数
NODES_PER_SUBPOP = 25
VARIANTS = ('beta', 'brokerage', 'sparse_brokerage', 'size_dependent')
SCAN_ORDERS = ('systematic_lexicographic', 'random_permutation_per_sweep')
INIT_MODES = ('zero', 'beta-warm')


class ExperimentConfig(BaseConfig):
    """实验配置类"""

    def __init__(self, profile: str = None):
        super().__init__()
        self.profile = profile or os.getenv('EXPERIMENT_PROFILE', 'desk_scale')
        self._load_experiment_config()
        self._load_profile_config()

    def _load_experiment_config(self):
        """加载实验默认值"""
        self.N_VALUES = [50, 100, 200]
        self.REPLICATIONS = self.get_env_int('REPLICATIONS', 100)
        self.VARIANT = os.getenv('VARIANT', 'brokerage')
        self.ALPHA: Optional[float] = None

        # θ* 抽取
        self.THETA_LOW = -1.25
        self.THETA_HIGH = -0.75
        self.THETA_BROKERAGE = 0.25

        # Gibbs 抽样
        self.BURN_IN_SWEEPS = self.GIBBS_BURN_IN_SWEEPS
        self.SWEEPS_BETWEEN_SAMPLES = self.GIBBS_SPACING_SWEEPS
        self.SCAN_ORDER = 'systematic_lexicographic'

        # 求解器
        self.GAMMA = self.MPLE_GAMMA
        self.MAX_ITERATIONS = self.MPLE_MAX_ITER
        self.INIT = 'zero'

        # 运行
        self.SEED = self.DEFAULT_SEED
        self.RECORD_WALL_TIME = self.get_env_bool('RECORD_WALL_TIME', False)
        self.NORM_BOUND_U = 1.25
        self.DESCRIPTION = ''

    def _load_profile_config(self):
        """加载配置档"""
        if not is_profile_supported(self.profile):
            self.logger.info(f"未找到配置档 {self.profile}，使用默认配置")
            return
        config_module = f"src.config.profiles.{get_profile_module(self.profile)}"
        try:
            profile_config = importlib.import_module(config_module)
            self._apply_profile_config(profile_config)
            self.logger.info(f"已加载配置档 {self.profile}")
        except ImportError as e:
            self.logger.warning(f"加载配置档时出错: {str(e)}")

    def _apply_profile_config(self, profile_config):
        """应用配置档"""
        if hasattr(profile_config, 'PROFILE_CONFIG'):
            self.apply_overrides(profile_config.PROFILE_CONFIG)

    def apply_overrides(self, overrides: Dict[str, Any]):
        """
        按键名覆盖配置, 值为 None 的键忽略

        嵌套键 theta_star 与 gibbs 展开到对应字段
        """
        nested = {
            'theta_star': {'lo': 'THETA_LOW', 'hi': 'THETA_HIGH', 'brokerage': 'THETA_BROKERAGE'},
            'gibbs': {
                'burn_in_sweeps': 'BURN_IN_SWEEPS',
                'sweeps_between_samples': 'SWEEPS_BETWEEN_SAMPLES',
                'scan_order': 'SCAN_ORDER',
            },
        }
        for key, value in overrides.items():
            if value is None or key == 'profile':
                continue
            if key in nested:
                for sub_key, sub_value in value.items():
                    if sub_value is not None and sub_key in nested[key]:
                        setattr(self, nested[key][sub_key], sub_value)
            elif key == 'alpha':
                self.ALPHA = float(value)
            elif key == 'output_dir':
                self.OUTPUT_DIR = str(value)
            elif key == 'n_workers':
                self.N_WORKERS = int(value)
            elif hasattr(self, key.upper()):
                setattr(self, key.upper(), value)

    def load_json(self, path: Union[str, Path]):
        """
        读取 JSON 配置文件并覆盖当前配置

        Raises:
            ConfigError: 文件不存在、不是合法 JSON 或不符合模式
        """
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding='utf-8'))
            parsed = ExperimentFileSchema.model_validate(raw)
        except FileNotFoundError:
            raise ConfigError(f"配置文件不存在: {path}")
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"配置文件无效: {path} | {str(e)}")
        if parsed.profile and parsed.profile != self.profile:
            self.profile = parsed.profile
            self._load_experiment_config()
            self._load_profile_config()
        self.apply_overrides(parsed.model_dump(exclude_none=True))
        self.logger.info(f"已加载配置文件 {path}")

    @classmethod
    def build(
        cls,
        profile: str = None,
        config_path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> "ExperimentConfig":
        """按层合并构造并校验配置; 校验失败时抛出 ConfigError"""
        config = cls(profile)
        if config_path is not None:
            config.load_json(config_path)
        if overrides:
            config.apply_overrides(overrides)
        if not config.validate_experiment_config():
            raise ConfigError("实验配置校验失败, 详见日志")
        return config

    def validate_experiment_config(self) -> bool:
        """验证实验配置"""
        if not super().validate_config():
            return False

        if not self.N_VALUES:
            self.logger.error("N 网格不能为空")
            return False
        for n in self.N_VALUES:
            if n < NODES_PER_SUBPOP or n % NODES_PER_SUBPOP != 0:
                self.logger.error(f"N 必须是 {NODES_PER_SUBPOP} 的正整数倍: {n}")
                return False

        if self.REPLICATIONS < 1:
            self.logger.error(f"重复次数至少为 1: {self.REPLICATIONS}")
            return False

        if self.VARIANT not in VARIANTS:
            self.logger.error(f"未知的模型变体: {self.VARIANT}")
            return False
        if self.VARIANT == 'sparse_brokerage':
            if self.ALPHA is None or not 0.0 <= self.ALPHA < 0.5:
                self.logger.error(f"sparse_brokerage 需要 0 ≤ α < 1/2: {self.ALPHA}")
                return False
        elif self.ALPHA is not None:
            self.logger.error(f"只有 sparse_brokerage 接受 α, 当前变体: {self.VARIANT}")
            return False

        if self.THETA_LOW > self.THETA_HIGH:
            self.logger.error(f"θ* 区间下界不能大于上界: [{self.THETA_LOW}, {self.THETA_HIGH}]")
            return False

        if self.GAMMA < 0:
            self.logger.error(f"gamma 不能为负: {self.GAMMA}")
            return False

        if self.BURN_IN_SWEEPS < 0 or self.SWEEPS_BETWEEN_SAMPLES < 1:
            self.logger.error("预热轮数不能为负, 间隔轮数至少为 1")
            return False

        if self.SCAN_ORDER not in SCAN_ORDERS:
            self.logger.error(f"未知的扫描顺序: {self.SCAN_ORDER}")
            return False

        if self.INIT not in INIT_MODES:
            self.logger.error(f"未知的初值模式: {self.INIT}")
            return False

        return True

    def to_dict(self) -> Dict[str, Any]:
        """将配置转换为字典"""
        return {
            "profile": self.profile,
            "n_values": list(self.N_VALUES),
            "replications": self.REPLICATIONS,
            "variant": self.VARIANT,
            "alpha": self.ALPHA,
            "theta_star": {
                "lo": self.THETA_LOW,
                "hi": self.THETA_HIGH,
                "brokerage": self.THETA_BROKERAGE,
            },
            "gibbs": {
                "burn_in_sweeps": self.BURN_IN_SWEEPS,
                "sweeps_between_samples": self.SWEEPS_BETWEEN_SAMPLES,
                "scan_order": self.SCAN_ORDER,
            },
            "gamma": self.GAMMA,
            "max_iterations": self.MAX_ITERATIONS,
            "divergence_guard": self.DIVERGENCE_GUARD,
            "init": self.INIT,
            "seed": self.SEED,
            "output_dir": self.OUTPUT_DIR,
            "n_workers": self.N_WORKERS,
            "record_wall_time": self.RECORD_WALL_TIME,
            "norm_bound_u": self.NORM_BOUND_U,
        }
