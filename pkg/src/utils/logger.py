"""
日志配置模块

控制台与滚动文件两路输出, 以及实验专用的试验日志
"""

import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Iterable

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# 只保留警告以上的第三方日志
QUIET_LOGGERS = ('numba', 'matplotlib')


def setup_logging(
    log_level: int = logging.INFO,
    log_dir: str = "logs",
    log_file: str = "graph_lab.log",
    max_bytes: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
    quiet: Iterable[str] = QUIET_LOGGERS,
) -> Path:
    """
    设置日志配置

    重复调用时先关闭旧的处理器, 控制台输出写到 stderr, stdout 留给命令结果

    Args:
        log_level: 日志级别
        log_dir: 日志目录
        log_file: 日志文件名
        max_bytes: 单个日志文件最大大小
        backup_count: 备份文件数量
        quiet: 降到 WARNING 的第三方日志器

    Returns:
        Path: 日志文件路径
    """
    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    log_file_path = log_path / log_file
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    handlers = [
        logging.StreamHandler(sys.stderr),
        RotatingFileHandler(log_file_path, maxBytes=max_bytes, backupCount=backup_count, encoding='utf-8'),
    ]
    for handler in handlers:
        handler.setLevel(log_level)
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    for name in quiet:
        logging.getLogger(name).setLevel(logging.WARNING)

    logging.getLogger(__name__).info(f"日志系统已初始化 | 级别: {logging.getLevelName(log_level)} | 文件: {log_file_path}")
    return log_file_path


class ExperimentLogger:
    """实验专用日志记录器, 每次试验写入单独的滚动文件"""

    def __init__(self, name: str, log_dir: str = "logs"):
        self.logger = logging.getLogger(name)
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.trial_log_file = self.log_dir / f"{name}_trials.log"
        self._setup_trial_logger()

    def _setup_trial_logger(self):
        """设置试验日志"""
        self.trial_logger = logging.getLogger(f"{self.logger.name}.trial")
        self.trial_logger.setLevel(logging.INFO)
        # 防止重复日志
        self.trial_logger.propagate = False

        target = str(self.trial_log_file.resolve())
        for handler in self.trial_logger.handlers:
            if getattr(handler, 'baseFilename', None) == target:
                return

        trial_handler = RotatingFileHandler(
            self.trial_log_file,
            maxBytes=5 * 1024 * 1024,  # 5MB
            backupCount=10,
            encoding='utf-8'
        )
        trial_handler.setFormatter(logging.Formatter(
            '%(asctime)s - TRIAL - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        trial_handler.setLevel(logging.INFO)
        self.trial_logger.addHandler(trial_handler)

    def close(self):
        for handler in self.trial_logger.handlers[:]:
            handler.close()
            self.trial_logger.removeHandler(handler)

    def log_trial(self, n: int, rep: int, converged: bool, error_sup: float, **kwargs):
        """记录一次试验"""
        self.trial_logger.info(
            f"N: {n} | Rep: {rep} | Converged: {converged} | "
            f"Error: {error_sup:.6g} | {kwargs}"
        )

    def log_fit(self, status: str, iterations: int, grad_inf_norm: float):
        """记录一次拟合"""
        self.logger.debug(
            f"FIT [{status}] | Iterations: {iterations} | Grad: {grad_inf_norm:.3e}"
        )

    def log_assumption_event(self, event_type: str, n: int, rep: int, detail: str):
        """记录假设违例、发散与数据退化"""
        self.logger.warning(
            f"ASSUMPTION EVENT [{event_type}] | N: {n} | Rep: {rep} | {detail}"
        )
