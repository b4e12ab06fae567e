"""
数值内核

Gibbs 扫描、单边变化统计量、共享伙伴计数维护和 Gray 码穷举的 numba 实现
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import jit


@dataclass(frozen=True)
class KernelTables:
    """内核所需的连续数组, 每个模型构造一次"""

    n_nodes: int
    rows: np.ndarray
    cols: np.ndarray
    neighbor_mask: np.ndarray
    neighbor_ptr: np.ndarray
    neighbor_idx: np.ndarray
    weight: np.ndarray
    unit_weight: np.ndarray
    log_reference: np.ndarray
    disjoint: np.ndarray

    @classmethod
    def from_model(cls, model) -> "KernelTables":
        population = model.population
        ptr, idx = population.neighbor_csr
        index = population.edge_index
        return cls(
            n_nodes=population.n_nodes,
            rows=np.array(index.rows, dtype=np.int64),
            cols=np.array(index.cols, dtype=np.int64),
            neighbor_mask=np.array(population.neighbor_mask, dtype=np.uint8),
            neighbor_ptr=np.array(ptr, dtype=np.int64),
            neighbor_idx=np.array(idx, dtype=np.int64),
            weight=np.array(model.pair_weight, dtype=np.float64),
            unit_weight=np.array(model.unit_weight, dtype=np.float64),
            log_reference=np.array(model.log_reference_matrix, dtype=np.float64),
            disjoint=np.array(model.disjoint_mask, dtype=np.uint8),
        )


def shared_partner_counts(adjacency: np.ndarray, neighbor_mask: np.ndarray) -> np.ndarray:
    """c_ab = Σ_{h ∈ 𝒩_a∩𝒩_b} x_ah x_bh, 对角线置 0"""
    masked = (adjacency.astype(np.float64) * neighbor_mask)
    counts = np.rint(masked @ masked.T).astype(np.int64)
    np.fill_diagonal(counts, 0)
    return counts


@jit(nopython=True)  # pragma: no cover
def logistic(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@jit(nopython=True)  # pragma: no cover
def brokerage_delta(i, j, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx, weight):
    """x_ij 从 0 变为 1 时经纪统计量的变化, 其余边取当前值"""
    x_ij = adjacency[i, j]
    total = 0.0
    if shared[i, j] > 0:
        total += weight[i, j]
    if neighbor_mask[i, j] == 1:
        # j ∈ 𝒩_i∩𝒩_h 的节点对 (i, h)
        for k in range(neighbor_ptr[j], neighbor_ptr[j + 1]):
            h = neighbor_idx[k]
            if h != i and adjacency[i, h] == 1 and adjacency[j, h] == 1:
                if shared[i, h] - x_ij == 0:
                    total += weight[i, h]
        for k in range(neighbor_ptr[i], neighbor_ptr[i + 1]):
            h = neighbor_idx[k]
            if h != j and adjacency[i, h] == 1 and adjacency[j, h] == 1:
                if shared[j, h] - x_ij == 0:
                    total += weight[j, h]
    return total


@jit(nopython=True)  # pragma: no cover
def flip_edge(i, j, value, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx):
    """设置 x_ij 并增量更新共享伙伴计数"""
    if adjacency[i, j] == value:
        return
    step = 1 if value == 1 else -1
    adjacency[i, j] = value
    adjacency[j, i] = value
    if neighbor_mask[i, j] == 1:
        for k in range(neighbor_ptr[j], neighbor_ptr[j + 1]):
            h = neighbor_idx[k]
            if h != i and adjacency[j, h] == 1:
                shared[i, h] += step
                shared[h, i] += step
        for k in range(neighbor_ptr[i], neighbor_ptr[i + 1]):
            h = neighbor_idx[k]
            if h != j and adjacency[i, h] == 1:
                shared[j, h] += step
                shared[h, j] += step


@jit(nopython=True)  # pragma: no cover
def gibbs_sweeps(order, uniforms, adjacency, shared, theta_degree, theta_brokerage,
                 weight, log_reference, neighbor_mask, neighbor_ptr, neighbor_idx, rows, cols):
    """按给定顺序执行若干次单边 Gibbs 扫描, 原地修改 adjacency 与 shared"""
    n_sweeps = order.shape[0]
    n_sites = order.shape[1]
    for s in range(n_sweeps):
        for t in range(n_sites):
            m = order[s, t]
            i = rows[m]
            j = cols[m]
            delta = theta_degree[i] + theta_degree[j] + log_reference[i, j]
            if theta_brokerage != 0.0:
                delta += theta_brokerage * brokerage_delta(
                    i, j, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx, weight
                )
            value = 1 if uniforms[s, t] < logistic(delta) else 0
            flip_edge(i, j, value, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx)


@jit(nopython=True)  # pragma: no cover
def change_statistics(adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx,
                      weight, unit_weight, rows, cols):
    """每条边的经纪统计量变化 (加权, 不加权)"""
    n_edges = rows.shape[0]
    weighted = np.zeros(n_edges)
    unweighted = np.zeros(n_edges)
    for m in range(n_edges):
        i = rows[m]
        j = cols[m]
        weighted[m] = brokerage_delta(
            i, j, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx, weight
        )
        unweighted[m] = brokerage_delta(
            i, j, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx, unit_weight
        )
    return weighted, unweighted


@jit(nopython=True)  # pragma: no cover
def gray_code_enumeration(n_nodes, rows, cols, theta_degree, theta_brokerage, weight,
                          unit_weight, log_reference, disjoint, neighbor_mask,
                          neighbor_ptr, neighbor_idx, keep):
    """
    按 Gray 码顺序遍历全部 2^M 个图

    返回 (log 归一化常数, 充分统计量均值, [不加权经纪数均值, 空交集边数均值], 对数权重)
    """
    n_edges = rows.shape[0]
    n_states = 1 << n_edges
    adjacency = np.zeros((n_nodes, n_nodes), dtype=np.uint8)
    shared = np.zeros((n_nodes, n_nodes), dtype=np.int64)
    stats = np.zeros(n_nodes + 1)
    extra = np.zeros(2)
    acc_stats = np.zeros(n_nodes + 1)
    acc_extra = np.zeros(2)
    log_f = 0.0
    log_max = 0.0
    acc = 1.0
    if keep:
        log_weights = np.empty(n_states)
        log_weights[0] = 0.0
    else:
        log_weights = np.empty(1)
    code = 0
    for g in range(1, n_states):
        k = 0
        while ((g >> k) & 1) == 0:
            k += 1
        i = rows[k]
        j = cols[k]
        db = brokerage_delta(i, j, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx, weight)
        du = brokerage_delta(i, j, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx, unit_weight)
        step = theta_degree[i] + theta_degree[j] + theta_brokerage * db + log_reference[i, j]
        if adjacency[i, j] == 0:
            sign = 1.0
            value = 1
        else:
            sign = -1.0
            value = 0
        log_f += sign * step
        stats[i] += sign
        stats[j] += sign
        stats[n_nodes] += sign * db
        extra[0] += sign * du
        if disjoint[i, j] == 1:
            extra[1] += sign
        flip_edge(i, j, value, adjacency, shared, neighbor_mask, neighbor_ptr, neighbor_idx)
        code ^= (1 << k)

        if log_f > log_max:
            scale = math.exp(log_max - log_f)
            acc *= scale
            for t in range(n_nodes + 1):
                acc_stats[t] *= scale
            acc_extra[0] *= scale
            acc_extra[1] *= scale
            log_max = log_f
        w = math.exp(log_f - log_max)
        acc += w
        for t in range(n_nodes + 1):
            acc_stats[t] += w * stats[t]
        acc_extra[0] += w * extra[0]
        acc_extra[1] += w * extra[1]
        if keep:
            log_weights[code] = log_f

    log_norm = log_max + math.log(acc)
    return log_norm, acc_stats / acc, acc_extra / acc, log_weights


@jit(nopython=True)  # pragma: no cover
def coupled_runs(probs, n_edges, start, prefix_bits, ci_ptr, ci_idx, uniforms):
    """
    贪心耦合: 前缀固定, 第 start 条边分别取 0/1, 其余顶点按不一致邻接优先的顺序抽取

    probs 为按状态编码索引的完整分布; 每对条件分布用同一个均匀数做单调最大耦合
    """
    n_runs = uniforms.shape[0]
    out_first = np.zeros((n_runs, n_edges), dtype=np.uint8)
    out_second = np.zeros((n_runs, n_edges), dtype=np.uint8)
    n_states = probs.shape[0]
    for r in range(n_runs):
        assigned = np.zeros(n_edges, dtype=np.uint8)
        first = np.zeros(n_edges, dtype=np.uint8)
        second = np.zeros(n_edges, dtype=np.uint8)
        amask = 0
        bits_first = 0
        bits_second = 0
        for v in range(start):
            b = (prefix_bits >> v) & 1
            first[v] = b
            second[v] = b
            assigned[v] = 1
            amask |= (1 << v)
            if b == 1:
                bits_first |= (1 << v)
                bits_second |= (1 << v)
        second[start] = 1
        assigned[start] = 1
        amask |= (1 << start)
        bits_second |= (1 << start)

        n_assigned = start + 1
        step = 0
        while n_assigned < n_edges:
            chosen = -1
            for v in range(n_edges):
                if assigned[v] == 0:
                    for k in range(ci_ptr[v], ci_ptr[v + 1]):
                        u = ci_idx[k]
                        if assigned[u] == 1 and first[u] != second[u]:
                            chosen = v
                            break
                    if chosen >= 0:
                        break
            if chosen < 0:
                for v in range(n_edges):
                    if assigned[v] == 0:
                        chosen = v
                        break

            tot_first = 0.0
            one_first = 0.0
            tot_second = 0.0
            one_second = 0.0
            for s in range(n_states):
                p = probs[s]
                on = (s >> chosen) & 1
                masked = s & amask
                if masked == bits_first:
                    tot_first += p
                    if on == 1:
                        one_first += p
                if masked == bits_second:
                    tot_second += p
                    if on == 1:
                        one_second += p
            u = uniforms[r, step]
            step += 1
            if u < one_first / tot_first:
                first[chosen] = 1
                bits_first |= (1 << chosen)
            if u < one_second / tot_second:
                second[chosen] = 1
                bits_second |= (1 << chosen)
            assigned[chosen] = 1
            amask |= (1 << chosen)
            n_assigned += 1

        for v in range(n_edges):
            out_first[r, v] = first[v]
            out_second[r, v] = second[v]
    return out_first, out_second
