"""
充分统计量与条件概率

度统计、经纪统计量、参考测度、未归一化对数密度以及单边满条件概率
"""

from typing import Tuple

import numpy as np
from scipy.special import expit

from src.core.graph.graph import Graph
from src.core.graph.population import Population
from src.core.models import kernels
from src.core.models.spec import ModelSpec, Theta


def graph_state(g: Graph, model: ModelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """邻接矩阵与共享伙伴计数, 供增量计算使用"""
    adjacency = g.adjacency()
    shared = kernels.shared_partner_counts(adjacency, model.tables.neighbor_mask)
    return adjacency, shared


def brokerage_indicator(g: Graph, i: int, j: int, pop: Population) -> int:
    """
    经纪指示 b_ij

    交集为空时为 0; 否则为 x_ij 与 "存在共同伙伴 h ∈ 𝒩_i∩𝒩_j" 的乘积
    """
    if i == j:
        raise ValueError(f"节点对必须不同: ({i}, {j})")
    if not g.has_edge(i, j):
        return 0
    for h in pop.intersection(i, j):
        if g.has_edge(i, h) and g.has_edge(j, h):
            return 1
    return 0


def _brokered_matrix(adjacency: np.ndarray, shared: np.ndarray) -> np.ndarray:
    brokered = (adjacency == 1) & (shared > 0)
    return np.triu(brokered, k=1)


def brokerage_count(g: Graph, model: ModelSpec) -> int:
    """不加权的经纪边数 Σ b_ij"""
    adjacency, shared = graph_state(g, model)
    return int(_brokered_matrix(adjacency, shared).sum())


def suff_stats(g: Graph, model: ModelSpec) -> np.ndarray:
    """充分统计量 s(x): 度序列, 以及 (加权) 经纪总数"""
    degrees = g.degrees().astype(np.float64)
    if not model.has_brokerage:
        return degrees
    adjacency, shared = graph_state(g, model)
    brokered = _brokered_matrix(adjacency, shared)
    return np.append(degrees, float(model.pair_weight[brokered].sum()))


def log_reference(g: Graph, model: ModelSpec) -> float:
    """log a(x), 只有稀疏经纪模型非零"""
    if model.log_penalty == 0.0:
        return 0.0
    index = g.edge_index
    penalized = model.disjoint_mask[index.rows, index.cols] & g.edges
    return model.log_penalty * int(penalized.sum())


def disjoint_edge_count(g: Graph, model: ModelSpec) -> int:
    """交集为空的已连边数"""
    index = g.edge_index
    return int((model.disjoint_mask[index.rows, index.cols] & g.edges).sum())


def log_unnormalized_density(g: Graph, theta: Theta, model: ModelSpec) -> float:
    """⟨θ, s(x)⟩ + log a(x), 省略 ψ(θ)"""
    theta.check_bound(model)
    return float(theta.values @ suff_stats(g, model)) + log_reference(g, model)


def statistic_delta(g: Graph, i: int, j: int, model: ModelSpec) -> np.ndarray:
    """x_ij 由 0 变 1 时充分统计量的变化向量"""
    if i > j:
        i, j = j, i
    delta = np.zeros(model.n_params)
    delta[i] = 1.0
    delta[j] = 1.0
    if model.has_brokerage:
        adjacency, shared = graph_state(g, model)
        tables = model.tables
        delta[-1] = kernels.brokerage_delta(
            i, j, adjacency, shared, tables.neighbor_mask,
            tables.neighbor_ptr, tables.neighbor_idx, tables.weight,
        )
    return delta


def log_odds(g: Graph, i: int, j: int, theta: Theta, model: ModelSpec) -> float:
    """满条件对数几率 Δ"""
    theta.check_bound(model)
    if i > j:
        i, j = j, i
    degree = theta.degree_params
    value = degree[i] + degree[j] + model.log_reference_matrix[i, j]
    if model.has_brokerage:
        value += theta.brokerage_param * statistic_delta(g, i, j, model)[-1]
    return float(value)


def conditional_edge_prob(g: Graph, i: int, j: int, theta: Theta, model: ModelSpec) -> float:
    """P(X_ij = 1 | 其余边) = logistic(Δ)"""
    return float(expit(log_odds(g, i, j, theta, model)))


def change_statistics(g: Graph, model: ModelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """所有边的经纪统计量变化 (加权, 不加权), 长度 M"""
    tables = model.tables
    if not model.has_brokerage:
        zeros = np.zeros(tables.rows.shape[0])
        return zeros, zeros.copy()
    adjacency, shared = graph_state(g, model)
    return kernels.change_statistics(
        adjacency, shared, tables.neighbor_mask, tables.neighbor_ptr, tables.neighbor_idx,
        tables.weight, tables.unit_weight, tables.rows, tables.cols,
    )


def all_log_odds(g: Graph, theta: Theta, model: ModelSpec) -> np.ndarray:
    """所有边的满条件对数几率, 长度 M"""
    theta.check_bound(model)
    tables = model.tables
    degree = theta.degree_params
    weighted, _ = change_statistics(g, model)
    odds = degree[tables.rows] + degree[tables.cols] + tables.log_reference[tables.rows, tables.cols]
    if model.has_brokerage:
        odds = odds + theta.brokerage_param * weighted
    return odds


def all_conditional_probs(g: Graph, theta: Theta, model: ModelSpec) -> np.ndarray:
    """所有边的满条件概率, 长度 M"""
    return expit(all_log_odds(g, theta, model))
