"""
异常定义

图模型工具包的统一异常层级
"""


class GraphLabError(Exception):
    """工具包异常基类"""


class EmptyCoverageError(GraphLabError, ValueError):
    """存在不属于任何子群体的节点"""


class BadNodeIdError(GraphLabError, ValueError):
    """节点编号超出 1..N"""


class DuplicateEdgeError(GraphLabError, ValueError):
    """边列表中出现重复边"""


class SelfLoopError(GraphLabError, ValueError):
    """边列表中出现自环"""


class OutOfRangeError(GraphLabError, IndexError):
    """边索引或节点对越界"""


class WrongVariantError(GraphLabError, ValueError):
    """模型类型与操作不匹配"""


class TooLargeError(GraphLabError, ValueError):
    """问题规模超过穷举上限"""


class DegenerateDataError(GraphLabError, ValueError):
    """度序列位于边界, 估计量不存在"""


class AssumptionViolatedError(GraphLabError, ValueError):
    """结构假设不成立"""


class InsufficientDataError(GraphLabError, ValueError):
    """数据不足以计算汇总量"""


class BadNError(GraphLabError, ValueError):
    """节点数不满足生成器要求"""


class ConfigError(GraphLabError, ValueError):
    """配置无效"""
