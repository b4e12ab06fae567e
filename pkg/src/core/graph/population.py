"""
群体结构

节点、重叠子群体、邻域 𝒩_i 以及邻域交集的统一管理
"""

import logging
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from src.core.exceptions import BadNodeIdError, EmptyCoverageError
from src.core.graph.edge_index import EdgeIndex

logger = logging.getLogger(__name__)

# 推论部分要求每个子群体至少 3 个节点
MIN_SUBPOP_SIZE = 3


class Population:
    """
    群体: N 个节点与 K 个可能重叠的子群体

    节点内部从 0 开始编号; 构造后只读, 可在线程间共享
    """

    def __init__(self, n_nodes: int, subpops: Sequence[FrozenSet[int]]):
        self.n_nodes = int(n_nodes)
        self.subpops: Tuple[FrozenSet[int], ...] = tuple(frozenset(s) for s in subpops)
        self.n_subpops = len(self.subpops)

        membership = np.zeros((self.n_nodes, self.n_subpops), dtype=np.float32)
        for k, members in enumerate(self.subpops):
            membership[list(members), k] = 1.0
        self._membership = membership

        # 共享至少一个子群体 <=> 邻居
        shared = (membership @ membership.T) > 0
        np.fill_diagonal(shared, False)
        self._neighbor_bool = shared

        self.neighborhoods: Tuple[FrozenSet[int], ...] = tuple(
            frozenset(np.flatnonzero(shared[i]).tolist()) for i in range(self.n_nodes)
        )
        self.max_neighborhood = max((len(n) for n in self.neighborhoods), default=0)
        self.assumption_min3 = all(len(s) >= MIN_SUBPOP_SIZE for s in self.subpops)

    @property
    def D(self) -> int:
        """最大邻域规模 D = max_i |𝒩_i|"""
        return self.max_neighborhood

    @cached_property
    def edge_index(self) -> EdgeIndex:
        return EdgeIndex(self.n_nodes)

    @cached_property
    def memberships(self) -> Tuple[Tuple[int, ...], ...]:
        """每个节点所属的子群体编号"""
        return tuple(
            tuple(np.flatnonzero(self._membership[i]).tolist()) for i in range(self.n_nodes)
        )

    @cached_property
    def neighbor_mask(self) -> np.ndarray:
        """邻居关系的 0/1 矩阵 (uint8), 供内核使用"""
        mask = self._neighbor_bool.astype(np.uint8)
        mask.flags.writeable = False
        return mask

    @cached_property
    def neighbor_csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """邻域的压缩行表示 (ptr, idx)"""
        sizes = np.array([len(n) for n in self.neighborhoods], dtype=np.int64)
        ptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(sizes, out=ptr[1:])
        idx = np.flatnonzero(self._neighbor_bool.ravel()) % max(self.n_nodes, 1)
        return ptr, idx.astype(np.int64)

    @cached_property
    def intersection_sizes(self) -> np.ndarray:
        """|𝒩_i ∩ 𝒩_j| 的稠密矩阵, 对角线为 0"""
        nbr = self._neighbor_bool.astype(np.float32)
        sizes = np.rint(nbr @ nbr).astype(np.int64)
        np.fill_diagonal(sizes, 0)
        sizes.flags.writeable = False
        return sizes

    @cached_property
    def intersection_index(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        """非空交集的稀疏映射 (i, j) -> 成员, 仅保存 i < j"""
        rows, cols = np.nonzero(np.triu(self.intersection_sizes > 0, k=1))
        nbr = self._neighbor_bool
        index = {}
        for i, j in zip(rows.tolist(), cols.tolist()):
            index[(i, j)] = tuple(np.flatnonzero(nbr[i] & nbr[j]).tolist())
        return index

    def neighborhood(self, i: int) -> FrozenSet[int]:
        return self.neighborhoods[i]

    def intersection(self, i: int, j: int) -> Tuple[int, ...]:
        """𝒩_i ∩ 𝒩_j, 为空时返回空元组"""
        if i > j:
            i, j = j, i
        if self.intersection_sizes[i, j] == 0:
            return ()
        return tuple(np.flatnonzero(self._neighbor_bool[i] & self._neighbor_bool[j]).tolist())

    def intersection_size(self, i: int, j: int) -> int:
        return int(self.intersection_sizes[i, j])

    def shares_subpop(self, i: int, j: int) -> bool:
        return bool(self._neighbor_bool[i, j])

    def subpop_sizes(self) -> List[int]:
        return [len(s) for s in self.subpops]

    def to_dict(self) -> dict:
        """JSON 表示, 节点从 1 开始编号"""
        return {
            "n_nodes": self.n_nodes,
            "subpops": [sorted(i + 1 for i in s) for s in self.subpops],
        }

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Population)
            and other.n_nodes == self.n_nodes
            and other.subpops == self.subpops
        )

    def __hash__(self) -> int:
        return hash((self.n_nodes, self.subpops))

    def __repr__(self) -> str:
        return f"Population(N={self.n_nodes}, K={self.n_subpops}, D={self.max_neighborhood})"


def build_population(
    subpops: Iterable[Iterable[int]],
    n_nodes: int,
    one_based: bool = True,
) -> Population:
    """
    构造群体并计算邻域与交集

    Args:
        subpops: 子群体节点集合列表
        n_nodes: 节点数 N
        one_based: 输入编号是否从 1 开始 (JSON 与 CSV 文件的记法)

    Returns:
        Population: 构造完成的群体
    """
    offset = 1 if one_based else 0
    converted: List[FrozenSet[int]] = []
    for k, members in enumerate(subpops):
        nodes = set()
        for node in members:
            if isinstance(node, bool) or int(node) != node:
                raise BadNodeIdError(f"子群体 {k + offset} 含非整数节点: {node}")
            internal = int(node) - offset
            if internal < 0 or internal >= n_nodes:
                raise BadNodeIdError(
                    f"子群体 {k + offset} 引用了不存在的节点: {node} | N: {n_nodes}"
                )
            nodes.add(internal)
        converted.append(frozenset(nodes))

    covered = set().union(*converted) if converted else set()
    missing = sorted(set(range(n_nodes)) - covered)
    if missing:
        shown = [m + offset for m in missing[:10]]
        raise EmptyCoverageError(f"{len(missing)} 个节点不属于任何子群体: {shown}")

    population = Population(n_nodes, converted)
    if not population.assumption_min3:
        small = [k + offset for k, s in enumerate(converted) if len(s) < MIN_SUBPOP_SIZE]
        logger.warning(f"存在少于 {MIN_SUBPOP_SIZE} 个节点的子群体: {small[:10]} | assumption_min3=false")
    return population
