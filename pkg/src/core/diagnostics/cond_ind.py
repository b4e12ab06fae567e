"""
条件独立图

以边变量为顶点, 两个边变量出现在同一经纪因子中时相邻
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.core.exceptions import TooLargeError
from src.core.graph.graph import Graph
from src.core.graph.population import Population
from src.core.models.spec import ModelSpec, Theta, Variant
from src.core.models.statistics import (
    all_conditional_probs,
    conditional_edge_prob,
    log_unnormalized_density,
)
from src.utils.random_streams import PURPOSE_SURVEY, make_rng

logger = logging.getLogger(__name__)

# 穷举检验的边数上限
MAX_EXHAUSTIVE_EDGES = 16
# 概率相等的判定容差
EQUALITY_TOL = 1e-14

SHARED_SUBPOP = 2
OVERLAP_ONLY = 3
DISJOINT = 1


class CondIndGraph:
    """条件独立图, 顶点为线性边索引 0..M-1"""

    def __init__(self, n_vertices: int, graph: nx.Graph):
        self.n_vertices = n_vertices
        self.graph = graph

    def neighbors(self, m: int) -> FrozenSet[int]:
        return frozenset(self.graph.neighbors(m))

    def has_edge(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def is_isolated(self, m: int) -> bool:
        return self.graph.degree(m) == 0

    @property
    def n_edges(self) -> int:
        return self.graph.number_of_edges()

    @property
    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree()), default=0)

    def degrees(self) -> np.ndarray:
        return np.array([self.graph.degree(m) for m in range(self.n_vertices)], dtype=np.int64)

    @cached_property
    def csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """邻接的压缩行表示, 邻居按升序"""
        ptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        idx: List[int] = []
        for m in range(self.n_vertices):
            nbrs = sorted(self.graph.neighbors(m))
            idx.extend(nbrs)
            ptr[m + 1] = len(idx)
        return ptr, np.array(idx, dtype=np.int64)

    def reachable_above(self, start: int) -> FrozenSet[int]:
        """只经过编号 ≥ start 的顶点可以到达的顶点"""
        sub = self.graph.subgraph(range(start, self.n_vertices))
        return frozenset(nx.node_connected_component(sub, start))


def factor_variables(pop: Population, i: int, j: int) -> Tuple[int, ...]:
    """经纪因子 b_ij 依赖的边变量: x_ij 以及 x_ih, x_jh (h ∈ 𝒩_i∩𝒩_j)"""
    index = pop.edge_index
    members = [index.edge_linear(i, j)]
    for h in pop.intersection(i, j):
        members.append(index.edge_linear(i, h))
        members.append(index.edge_linear(j, h))
    return tuple(sorted(set(members)))


def build_cond_ind_graph(pop: Population, variant: Variant = Variant.BROKERAGE) -> CondIndGraph:
    """
    构造条件独立图

    β 模型无边; 其他变体中, 同一经纪因子内的边变量两两相邻
    """
    total = pop.edge_index.total
    graph = nx.Graph()
    graph.add_nodes_from(range(total))
    if Variant(variant).has_brokerage:
        for i, j in pop.intersection_index:
            graph.add_edges_from(itertools.combinations(factor_variables(pop, i, j), 2))
    return CondIndGraph(total, graph)


def pair_condition(pop: Population, i: int, j: int) -> int:
    """节点对的类别: 2 共享子群体, 3 仅邻域相交, 1 交集为空"""
    if pop.shares_subpop(i, j):
        return SHARED_SUBPOP
    if pop.intersection_size(i, j) > 0:
        return OVERLAP_ONLY
    return DISJOINT


def claimed_blanket(pop: Population, i: int, j: int) -> FrozenSet[int]:
    """按节点对类别给出的条件集合 (线性边索引)"""
    index = pop.edge_index
    condition = pair_condition(pop, i, j)
    if condition == SHARED_SUBPOP:
        nodes = sorted(pop.neighborhood(i) | pop.neighborhood(j) | {i, j})
        blanket = {index.edge_linear(a, b) for a, b in itertools.combinations(nodes, 2)}
    elif condition == OVERLAP_ONLY:
        blanket = set()
        for h in pop.intersection(i, j):
            blanket.add(index.edge_linear(i, h))
            blanket.add(index.edge_linear(j, h))
    else:
        blanket = set()
    blanket.discard(index.edge_linear(i, j))
    return frozenset(blanket)


@dataclass
class AssumptionAReport:
    neighbor_sets: List[FrozenSet[int]]
    max_size: int
    cap: Optional[int]
    bounded: bool

    def to_dict(self) -> dict:
        return {"max_size": self.max_size, "cap": self.cap, "bounded": self.bounded}


def assumption_A_neighbors(
    pop: Population,
    variant: Variant = Variant.BROKERAGE,
    cap: Optional[int] = None,
) -> AssumptionAReport:
    """每个边变量的依赖集合 𝔑_m 以及最大规模"""
    cig = build_cond_ind_graph(pop, variant)
    sets = [cig.neighbors(m) for m in range(cig.n_vertices)]
    max_size = max((len(s) for s in sets), default=0)
    bounded = True if cap is None else max_size <= cap
    return AssumptionAReport(neighbor_sets=sets, max_size=max_size, cap=cap, bounded=bounded)


@dataclass
class CondIndReport:
    """条件独立性检验结果, violations 应为空"""

    mode: str
    n_checks: int
    violations: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"mode": self.mode, "n_checks": self.n_checks, "violations": self.violations}


def _blankets(model: ModelSpec, pairs: Sequence[int]) -> Dict[int, FrozenSet[int]]:
    cig = build_cond_ind_graph(model.population, model.variant)
    return {m: cig.neighbors(m) for m in pairs}


def verify_cond_ind_empirically(
    model: ModelSpec,
    theta: Theta,
    pairs: Optional[Iterable[int]] = None,
    mode: str = "auto",
    n_random: int = 1000,
    seed: int = 0,
) -> CondIndReport:
    """
    检验 P(X_m = 1 | 其余) 对条件集合之外的任何单边翻转不变

    Args:
        model: 模型
        theta: 参数
        pairs: 待检验的边变量 (默认全部)
        mode: "exhaustive" 遍历全部状态, "randomized" 随机抽取图与翻转, "auto" 按规模选择
        n_random: 随机检验次数
        seed: 随机种子
    """
    theta.check_bound(model)
    index = model.population.edge_index
    total = index.total
    pairs = list(range(total)) if pairs is None else list(pairs)
    blankets = _blankets(model, pairs)
    if mode == "auto":
        mode = "exhaustive" if total <= 12 else "randomized"

    if mode == "exhaustive":
        return _verify_exhaustive(model, theta, pairs, blankets)
    return _verify_randomized(model, theta, pairs, blankets, n_random, seed)


def _verify_exhaustive(model, theta, pairs, blankets) -> CondIndReport:
    total = model.population.edge_index.total
    if total > MAX_EXHAUSTIVE_EDGES:
        raise TooLargeError(f"穷举检验规模过大 | M: {total} | 上限: {MAX_EXHAUSTIVE_EDGES}")
    n_states = 1 << total
    table = np.vstack([
        all_conditional_probs(Graph.from_state(model.n_nodes, s), theta, model)
        for s in range(n_states)
    ])
    states = np.arange(n_states, dtype=np.int64)
    report = CondIndReport(mode="exhaustive", n_checks=0)
    for m in pairs:
        outside = [e for e in range(total) if e != m and e not in blankets[m]]
        for e in outside:
            diff = np.abs(table[states, m] - table[states ^ (1 << e), m])
            report.n_checks += n_states
            worst = int(np.argmax(diff))
            if diff[worst] > EQUALITY_TOL:
                report.violations.append(
                    {"edge": m, "flipped": e, "state": worst, "difference": float(diff[worst])}
                )
    logger.info(f"条件独立穷举检验完成 | 检验数: {report.n_checks} | 违例: {len(report.violations)}")
    return report


def _verify_randomized(model, theta, pairs, blankets, n_random, seed) -> CondIndReport:
    index = model.population.edge_index
    total = index.total
    rng = make_rng(seed, PURPOSE_SURVEY, model.n_nodes)
    report = CondIndReport(mode="randomized", n_checks=0)
    for _ in range(n_random):
        m = int(pairs[rng.integers(len(pairs))])
        outside = [e for e in range(total) if e != m and e not in blankets[m]]
        if not outside:
            continue
        e = int(outside[rng.integers(len(outside))])
        density = rng.uniform(0.1, 0.9)
        g = Graph(model.n_nodes, rng.random(total) < density)
        i, j = index.edge_pair(m)
        before = conditional_edge_prob(g, i, j, theta, model)
        after = conditional_edge_prob(g.flipped(e), i, j, theta, model)
        report.n_checks += 1
        if abs(before - after) > EQUALITY_TOL:
            report.violations.append(
                {"edge": m, "flipped": e, "state": None, "difference": abs(before - after)}
            )
    logger.info(f"条件独立随机检验完成 | 检验数: {report.n_checks} | 违例: {len(report.violations)}")
    return report


def mixed_difference_violations(model: ModelSpec, theta: Theta, tol: float = 1e-12) -> List[Tuple[int, int]]:
    """
    不相邻的边变量对中, 对数密度混合二阶差分不为零的对

    f(x^{a,b}) − f(x^a) − f(x^b) + f(x) 对所有补全计算
    """
    total = model.population.edge_index.total
    if total > MAX_EXHAUSTIVE_EDGES:
        raise TooLargeError(f"穷举检验规模过大 | M: {total} | 上限: {MAX_EXHAUSTIVE_EDGES}")
    n_states = 1 << total
    log_f = np.array([
        log_unnormalized_density(Graph.from_state(model.n_nodes, s), theta, model)
        for s in range(n_states)
    ])
    cig = build_cond_ind_graph(model.population, model.variant)
    states = np.arange(n_states, dtype=np.int64)
    bad = []
    for a, b in itertools.combinations(range(total), 2):
        if cig.has_edge(a, b):
            continue
        base = states[((states >> a) & 1 == 0) & ((states >> b) & 1 == 0)]
        bit_a, bit_b = 1 << a, 1 << b
        diff = log_f[base | bit_a | bit_b] - log_f[base | bit_a] - log_f[base | bit_b] + log_f[base]
        if np.max(np.abs(diff)) > tol:
            bad.append((a, b))
    return bad
