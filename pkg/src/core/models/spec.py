"""
模型定义

四种模型变体 (β 模型、经纪模型、稀疏经纪模型、规模相关经纪模型) 与参数向量
"""

import math
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional

import numpy as np

from src.core.exceptions import ConfigError, WrongVariantError
from src.core.graph.population import Population
from src.core.models.kernels import KernelTables


class Variant(str, Enum):
    """模型变体"""

    BETA = "beta"
    BROKERAGE = "brokerage"
    SPARSE_BROKERAGE = "sparse_brokerage"
    SIZE_DEPENDENT = "size_dependent"

    @property
    def has_brokerage(self) -> bool:
        return self is not Variant.BETA


def size_weight(intersection_size: int) -> float:
    """规模权重 w = log(1 + log s / s), s <= 1 时为 0"""
    if intersection_size <= 1:
        return 0.0
    s = float(intersection_size)
    return math.log1p(math.log(s) / s)


class ModelSpec:
    """绑定到群体的模型"""

    def __init__(self, variant: Variant, population: Population, alpha: Optional[float] = None):
        self.variant = Variant(variant)
        self.population = population

        if self.variant is Variant.SPARSE_BROKERAGE:
            if alpha is None:
                raise WrongVariantError("稀疏经纪模型需要 alpha")
            alpha = float(alpha)
            if not 0.0 <= alpha < 0.5:
                raise ConfigError(f"alpha 必须位于 [0, 1/2): {alpha}")
        elif alpha is not None:
            raise WrongVariantError(f"只有稀疏经纪模型接受 alpha | 当前变体: {self.variant.value}")
        self.alpha = alpha

    @property
    def n_nodes(self) -> int:
        return self.population.n_nodes

    @property
    def n_params(self) -> int:
        """参数维数 p"""
        return self.n_nodes + (1 if self.variant.has_brokerage else 0)

    @property
    def has_brokerage(self) -> bool:
        return self.variant.has_brokerage

    @cached_property
    def unit_weight(self) -> np.ndarray:
        """交集非空的节点对为 1"""
        weight = (self.population.intersection_sizes > 0).astype(np.float64)
        weight.flags.writeable = False
        return weight

    @cached_property
    def pair_weight(self) -> np.ndarray:
        """经纪统计量中每个节点对的权重"""
        if self.variant is Variant.BETA:
            weight = np.zeros((self.n_nodes, self.n_nodes), dtype=np.float64)
        elif self.variant is Variant.SIZE_DEPENDENT:
            sizes = self.population.intersection_sizes.astype(np.float64)
            weight = np.zeros_like(sizes)
            big = sizes > 1
            weight[big] = np.log1p(np.log(sizes[big]) / sizes[big])
        else:
            weight = self.unit_weight.copy()
        weight.flags.writeable = False
        return weight

    @cached_property
    def log_penalty(self) -> float:
        """稀疏惩罚 −α log N, 其他变体为 0"""
        if self.variant is not Variant.SPARSE_BROKERAGE:
            return 0.0
        return -self.alpha * math.log(self.n_nodes)

    @cached_property
    def disjoint_mask(self) -> np.ndarray:
        """交集为空的节点对 (不含对角线)"""
        mask = self.population.intersection_sizes == 0
        np.fill_diagonal(mask, False)
        mask.flags.writeable = False
        return mask

    @cached_property
    def tables(self) -> KernelTables:
        """内核使用的连续数组"""
        return KernelTables.from_model(self)

    @cached_property
    def log_reference_matrix(self) -> np.ndarray:
        """每个节点对的 log a_{i,j}"""
        ref = np.where(self.disjoint_mask, self.log_penalty, 0.0).astype(np.float64)
        ref.flags.writeable = False
        return ref

    def to_dict(self) -> dict:
        data = {"variant": self.variant.value, "population": self.population.to_dict()}
        if self.alpha is not None:
            data["alpha"] = self.alpha
        return data

    def __repr__(self) -> str:
        alpha = f", alpha={self.alpha}" if self.alpha is not None else ""
        return f"ModelSpec({self.variant.value}{alpha}, {self.population!r})"


class Theta:
    """参数向量 θ: 度参数在前, 经纪参数 (若有) 在最后"""

    def __init__(self, degree_params: Iterable[float], brokerage_param: Optional[float] = None):
        degree = np.asarray(list(degree_params), dtype=np.float64)
        values = degree if brokerage_param is None else np.append(degree, float(brokerage_param))
        if not np.all(np.isfinite(values)):
            raise ValueError("θ 必须全部为有限实数")
        values.flags.writeable = False
        self.values = values
        self.n_nodes = degree.shape[0]
        self.has_brokerage = brokerage_param is not None

    @classmethod
    def from_vector(cls, values: Iterable[float], model: ModelSpec) -> "Theta":
        """按模型维数拆分扁平向量"""
        values = np.asarray(list(values), dtype=np.float64)
        if values.shape != (model.n_params,):
            raise WrongVariantError(
                f"θ 长度不匹配: {values.shape[0]} | 模型需要: {model.n_params}"
            )
        if model.has_brokerage:
            return cls(values[:-1], values[-1])
        return cls(values)

    @classmethod
    def zeros(cls, model: ModelSpec) -> "Theta":
        return cls.from_vector(np.zeros(model.n_params), model)

    @property
    def degree_params(self) -> np.ndarray:
        return self.values[: self.n_nodes]

    @property
    def brokerage_param(self) -> float:
        return float(self.values[-1]) if self.has_brokerage else 0.0

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def check_bound(self, model: ModelSpec) -> None:
        """检查 θ 与模型维数一致"""
        if self.n_nodes != model.n_nodes or self.has_brokerage != model.has_brokerage:
            raise WrongVariantError(
                f"θ 与模型不匹配 | θ 维数: {self.values.shape[0]} | 模型需要: {model.n_params}"
            )

    def norm_bound_ok(self, U: float, vartheta: float = 1.0) -> bool:
        """范数条件 ‖θ‖∞ ≤ U + (1−ϑ)/8 · log N"""
        if U <= 0 or not 0.5 < vartheta <= 1.0:
            raise ConfigError(f"需要 U > 0 且 ϑ ∈ (1/2, 1] | U: {U} | ϑ: {vartheta}")
        return self.sup_norm <= U + (1.0 - vartheta) / 8.0 * math.log(self.n_nodes)

    def with_brokerage(self, value: float) -> "Theta":
        return Theta(self.degree_params, value)

    def to_list(self) -> List[float]:
        return [float(v) for v in self.values]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Theta)
            and other.has_brokerage == self.has_brokerage
            and np.array_equal(other.values, self.values)
        )

    def __hash__(self) -> int:
        return hash((self.has_brokerage, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Theta(p={self.values.shape[0]}, sup={self.sup_norm:.4f})"
