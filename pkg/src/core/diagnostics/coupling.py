"""
耦合矩阵的蒙特卡洛估计

对每个顶点 i 与前缀 x_{<i}, 令 X_i^⋆=0, X_i^⋆⋆=1, 按贪心顺序扩展两条链,
每一步从两个满条件分布的单调最大耦合中抽取; 𝒟_ij 为各前缀下不一致频率的最大值
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.diagnostics.cond_ind import build_cond_ind_graph
from src.core.exceptions import ConfigError, TooLargeError
from src.core.models import kernels
from src.core.models.spec import ModelSpec, Theta
from src.core.sampling.enumeration import MAX_RETAINED_EDGES, enumerate_exact
from src.utils.random_streams import PURPOSE_COUPLING, make_rng

logger = logging.getLogger(__name__)

# 穷举前缀模式的边数上限
MAX_EXHAUSTIVE_PREFIX_EDGES = 15
# 抽样前缀模式使用的专用流编号, 大于任何前缀编码
_PREFIX_STREAM = 1 << 32


@dataclass
class CouplingEstimate:
    """𝒟 的估计: 上三角, 对角为 1; standard_errors 为取到最大值的前缀下的蒙特卡洛标准误"""

    matrix: np.ndarray
    standard_errors: np.ndarray
    mode: str
    n_mc: int
    low_confidence: bool

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_mc": self.n_mc,
            "low_confidence": self.low_confidence,
            "matrix": self.matrix.tolist(),
            "standard_errors": self.standard_errors.tolist(),
        }


def _distribution(model: ModelSpec, theta: Theta) -> np.ndarray:
    total = model.population.edge_index.total
    if total > MAX_RETAINED_EDGES:
        raise TooLargeError(f"耦合需要完整分布 | M: {total} | 上限: {MAX_RETAINED_EDGES}")
    return enumerate_exact(theta, model, keep_distribution=True).probabilities()


def _run(probs, total, start, prefix_bits, ci_ptr, ci_idx, n_mc, rng) -> Tuple[np.ndarray, np.ndarray]:
    width = max(total - start - 1, 1)
    uniforms = rng.random((n_mc, width))
    return kernels.coupled_runs(probs, total, start, int(prefix_bits), ci_ptr, ci_idx, uniforms)


def coupled_draws(
    model: ModelSpec,
    theta: Theta,
    start: int,
    prefix_bits: int,
    n_mc: int,
    seed: int = 0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    固定前缀下的 n_mc 对耦合抽样

    Returns:
        tuple: (X^⋆, X^⋆⋆), 形状均为 n_mc × M
    """
    theta.check_bound(model)
    total = model.population.edge_index.total
    if not 0 <= start < total:
        raise ConfigError(f"起始顶点越界 | start: {start} | M: {total}")
    if prefix_bits >> start:
        raise ConfigError(f"前缀编码超出前 {start} 位: {prefix_bits}")
    probs = _distribution(model, theta)
    ci_ptr, ci_idx = build_cond_ind_graph(model.population, model.variant).csr
    rng = make_rng(seed, PURPOSE_COUPLING, start, prefix_bits)
    return _run(probs, total, start, prefix_bits, ci_ptr, ci_idx, n_mc, rng)


def prefix_conditional_marginals(
    model: ModelSpec,
    theta: Theta,
    start: int,
    prefix_bits: int,
    value: int,
) -> np.ndarray:
    """P(X_j = 1 | x_{<start} = 前缀, X_start = value), 对全部 j"""
    probs = _distribution(model, theta)
    total = model.population.edge_index.total
    states = np.arange(probs.shape[0], dtype=np.int64)
    mask = (1 << (start + 1)) - 1
    target = prefix_bits | (int(value) << start)
    selected = (states & mask) == target
    weight = probs[selected]
    bits = (states[selected, None] >> np.arange(total)) & 1
    return (weight @ bits) / weight.sum()


def coupling_matrix_mc(
    model: ModelSpec,
    theta: Theta,
    n_mc: int = 200,
    seed: int = 0,
    mode: str = "exhaustive",
    n_prefixes: int = 64,
) -> CouplingEstimate:
    """
    估计耦合矩阵 𝒟

    Args:
        model: 模型
        theta: 参数
        n_mc: 每个 (i, 前缀) 的耦合抽样次数
        seed: 随机种子
        mode: "exhaustive" 遍历全部前缀 (M ≤ 15), "sampled" 每个 i 随机抽取 n_prefixes 个前缀
        n_prefixes: 抽样前缀数

    Raises:
        TooLargeError: 穷举模式下 M > 15, 或完整分布无法保留
    """
    theta.check_bound(model)
    if n_mc < 1:
        raise ConfigError(f"n_mc 至少为 1: {n_mc}")
    if mode not in ("exhaustive", "sampled"):
        raise ConfigError(f"未知的前缀模式: {mode}")
    total = model.population.edge_index.total
    if mode == "exhaustive" and total > MAX_EXHAUSTIVE_PREFIX_EDGES:
        raise TooLargeError(f"穷举前缀规模过大 | M: {total} | 上限: {MAX_EXHAUSTIVE_PREFIX_EDGES}")

    probs = _distribution(model, theta)
    ci_ptr, ci_idx = build_cond_ind_graph(model.population, model.variant).csr
    matrix = np.eye(total)
    errors = np.zeros((total, total))

    for i in range(total - 1):
        if mode == "exhaustive" or (1 << i) <= n_prefixes:
            prefixes = np.arange(1 << i, dtype=np.int64)
        else:
            picker = make_rng(seed, PURPOSE_COUPLING, i, _PREFIX_STREAM)
            prefixes = np.unique(picker.integers(0, 1 << i, size=n_prefixes, dtype=np.int64))

        for prefix in prefixes:
            rng = make_rng(seed, PURPOSE_COUPLING, i, int(prefix))
            first, second = _run(probs, total, i, prefix, ci_ptr, ci_idx, n_mc, rng)
            freq = (first[:, i + 1:] != second[:, i + 1:]).mean(axis=0)
            row = matrix[i, i + 1:]
            better = freq > row
            row[better] = freq[better]
            errors[i, i + 1:][better] = np.sqrt(freq[better] * (1.0 - freq[better]) / n_mc)

    logger.info(f"耦合矩阵估计完成 | M: {total} | 模式: {mode} | n_mc: {n_mc}")
    return CouplingEstimate(
        matrix=matrix,
        standard_errors=errors,
        mode=mode,
        n_mc=n_mc,
        low_confidence=mode == "sampled",
    )
