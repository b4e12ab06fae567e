"""
穷举预言机

小规模图上的精确 ψ(θ)、E_θ s(X) 与 E_θ b(X)
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.core.exceptions import TooLargeError
from src.core.graph.graph import Graph
from src.core.models import kernels
from src.core.models.spec import ModelSpec, Theta

logger = logging.getLogger(__name__)

MAX_ENUMERATION_EDGES = 28
MAX_RETAINED_EDGES = 24


@dataclass(frozen=True)
class EnumerationResult:
    """穷举结果, 分布按状态编码 (第 m 位为边 m) 存放"""

    log_normalizer: float
    mean_suff_stats: np.ndarray
    mean_brokerage: float
    mean_disjoint_edges: float
    log_weights: Optional[np.ndarray] = None

    @property
    def has_distribution(self) -> bool:
        return self.log_weights is not None

    def probabilities(self) -> np.ndarray:
        if self.log_weights is None:
            raise ValueError("未保留完整分布, 请使用 keep_distribution=True")
        return np.exp(self.log_weights - self.log_normalizer)

    def probability(self, g: Graph) -> float:
        return float(self.probabilities()[g.state])


def enumerate_exact(theta: Theta, model: ModelSpec, keep_distribution: bool = False) -> EnumerationResult:
    """
    按 Gray 码顺序遍历全部图并做对数求和

    Args:
        theta: 参数
        model: 模型
        keep_distribution: 是否保留全部 2^M 个对数权重 (M ≤ 24)

    Returns:
        EnumerationResult: ψ(θ) 与各期望
    """
    theta.check_bound(model)
    tables = model.tables
    n_edges = tables.rows.shape[0]
    if n_edges > MAX_ENUMERATION_EDGES:
        raise TooLargeError(f"穷举规模过大 | M: {n_edges} | 上限: {MAX_ENUMERATION_EDGES}")
    if keep_distribution and n_edges > MAX_RETAINED_EDGES:
        raise TooLargeError(f"无法保留完整分布 | M: {n_edges} | 上限: {MAX_RETAINED_EDGES}")

    log_norm, mean_stats, mean_extra, log_weights = kernels.gray_code_enumeration(
        model.n_nodes, tables.rows, tables.cols,
        np.array(theta.degree_params, dtype=np.float64), float(theta.brokerage_param),
        tables.weight, tables.unit_weight, tables.log_reference, tables.disjoint,
        tables.neighbor_mask, tables.neighbor_ptr, tables.neighbor_idx, keep_distribution,
    )
    logger.debug(f"穷举完成 | M: {n_edges} | ψ: {log_norm:.6f}")
    return EnumerationResult(
        log_normalizer=float(log_norm),
        mean_suff_stats=mean_stats[: model.n_params].copy(),
        mean_brokerage=float(mean_extra[0]),
        mean_disjoint_edges=float(mean_extra[1]),
        log_weights=log_weights if keep_distribution else None,
    )


def brokerage_excess(theta: Theta, model: ModelSpec) -> dict:
    """θ 下的 E b(X) 与同一度参数、经纪参数为 0 时的对比"""
    current = enumerate_exact(theta, model)
    baseline = enumerate_exact(theta.with_brokerage(0.0), model)
    return {
        "mean_brokerage": current.mean_brokerage,
        "baseline_mean_brokerage": baseline.mean_brokerage,
        "excess": current.mean_brokerage - baseline.mean_brokerage,
    }
