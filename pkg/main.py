#!/usr/bin/env python3
"""
依赖边广义 β 模型工具包主程序

等价于 graph-lab 命令行
"""

import sys
from pathlib import Path

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main


if __name__ == "__main__":
    if sys.version_info < (3, 13):
        print("错误: 需要Python 3.13或更高版本")
        sys.exit(1)

    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n程序被用户中断")
        sys.exit(1)
