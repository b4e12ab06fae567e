"""
模拟群体生成

K = N/25 个子群体; 节点 i 属于 1+Y_i 个子群体, Y_i ~ Binomial(K−1, 1/K);
成员关系按平衡拥挤度的概率逐个无放回抽取
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.core.exceptions import BadNError, ConfigError
from src.core.graph.population import Population, build_population
from src.core.models.spec import Theta, Variant
from src.utils.random_streams import PURPOSE_POPULATION, PURPOSE_THETA, make_rng

logger = logging.getLogger(__name__)

NODES_PER_SUBPOP = 25


def membership_probabilities(counts: np.ndarray) -> np.ndarray:
    """
    下一个节点对各子群体的选择概率

    p_k = (1 − N_k / Σ N) / (K − 1); 尚无成员时为均匀分布
    """
    n_subpops = counts.shape[0]
    total = counts.sum()
    if n_subpops == 1:
        return np.ones(1)
    if total == 0:
        return np.full(n_subpops, 1.0 / n_subpops)
    return (1.0 - counts / total) / (n_subpops - 1)


def _draw_memberships(rng: np.random.Generator, probs: np.ndarray, n_draws: int) -> List[int]:
    """无放回依次抽取 n_draws 个互不相同的子群体, 每次对剩余概率重新归一化"""
    available = np.ones(probs.shape[0], dtype=bool)
    chosen = []
    for _ in range(n_draws):
        weights = np.where(available, probs, 0.0)
        total = weights.sum()
        if total <= 0:
            weights = available.astype(np.float64)
            total = weights.sum()
        k = int(rng.choice(probs.shape[0], p=weights / total))
        chosen.append(k)
        available[k] = False
    return chosen


def generate_simulated_population(n_nodes: int, seed: int, stream_key: Tuple[int, ...] = ()) -> Population:
    """
    生成模拟群体

    Args:
        n_nodes: 节点数 N, 必须是 25 的正整数倍
        seed: 随机种子
        stream_key: 附加的流标识, 如重复编号

    Raises:
        BadNError: N 不是 25 的正整数倍
    """
    if n_nodes < NODES_PER_SUBPOP or n_nodes % NODES_PER_SUBPOP != 0:
        raise BadNError(f"N 必须是 {NODES_PER_SUBPOP} 的正整数倍: {n_nodes}")
    n_subpops = n_nodes // NODES_PER_SUBPOP
    rng = make_rng(seed, PURPOSE_POPULATION, n_nodes, *stream_key)

    extra = rng.binomial(n_subpops - 1, 1.0 / n_subpops, size=n_nodes)
    counts = np.zeros(n_subpops, dtype=np.float64)
    members: List[List[int]] = [[] for _ in range(n_subpops)]
    for node in range(n_nodes):
        chosen = _draw_memberships(rng, membership_probabilities(counts), 1 + int(extra[node]))
        for k in chosen:
            members[k].append(node)
        # 概率只依赖此前节点的计数
        counts[chosen] += 1

    nonempty = [m for m in members if m]
    if len(nonempty) < n_subpops:
        logger.warning(f"丢弃空子群体 | N: {n_nodes} | 空子群体数: {n_subpops - len(nonempty)}")
    return build_population(nonempty, n_nodes, one_based=False)


@dataclass(frozen=True)
class ThetaStarSpec:
    """θ* 的抽取: 度参数 ~ Uniform(lo, hi), 经纪参数固定"""

    lo: float = -1.25
    hi: float = -0.75
    brokerage: float = 0.25

    def __post_init__(self):
        if self.lo > self.hi:
            raise ConfigError(f"lo 不能大于 hi: {self.lo} > {self.hi}")

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "brokerage": self.brokerage}


def draw_theta_star(
    pop: Population,
    spec: ThetaStarSpec,
    seed: int,
    variant: Variant = Variant.BROKERAGE,
    stream_key: Tuple[int, ...] = (),
) -> Theta:
    """独立均匀抽取度参数; β 模型不含经纪参数"""
    rng = make_rng(seed, PURPOSE_THETA, pop.n_nodes, *stream_key)
    degrees = rng.uniform(spec.lo, spec.hi, size=pop.n_nodes)
    if Variant(variant).has_brokerage:
        return Theta(degrees, spec.brokerage)
    return Theta(degrees)
