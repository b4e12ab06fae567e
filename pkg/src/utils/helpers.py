"""
辅助函数模块

输出格式化与版本信息
"""

import math
import subprocess
from pathlib import Path
from typing import Optional, Union

FALLBACK_VERSION = "0.1.0"


def format_number(value: Optional[float], decimals: int = 4) -> str:
    """
    格式化误差、速率等数值

    Args:
        value: 数值, None 或 NaN 表示缺失 (如全部试验未收敛)
        decimals: 小数位数

    Returns:
        str: 缺失为 "--", 无穷为 "inf"
    """
    if value is None:
        return "--"
    try:
        value = float(value)
    except (TypeError, ValueError):
        return "--"
    if math.isnan(value):
        return "--"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{decimals}f}"


def format_duration_ms(milliseconds: int) -> str:
    """毫秒数转为 "1小时2分钟" 形式, 不足 1 秒时保留毫秒"""
    milliseconds = int(milliseconds)
    if milliseconds < 1000:
        return f"{milliseconds}毫秒"
    seconds = milliseconds // 1000
    if seconds < 60:
        return f"{seconds}秒"
    if seconds < 3600:
        return f"{seconds // 60}分钟{seconds % 60}秒"
    return f"{seconds // 3600}小时{(seconds % 3600) // 60}分钟"


def version_string(repo_dir: Union[str, Path, None] = None) -> str:
    """git describe 风格的版本号, 不在仓库中或 git 不可用时返回固定版本"""
    cwd = Path(repo_dir) if repo_dir else Path(__file__).resolve().parents[2]
    try:
        result = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=cwd, capture_output=True, text=True, timeout=5, check=True,
        )
        return result.stdout.strip() or FALLBACK_VERSION
    except (OSError, subprocess.SubprocessError):
        return FALLBACK_VERSION
