"""
边索引

无向节点对 {i, j} (i < j) 与线性索引 0..M-1 之间的字典序双射
"""

from functools import cached_property
from typing import Tuple

import numpy as np

from src.core.exceptions import OutOfRangeError


class EdgeIndex:
    """边索引 (内部节点编号从 0 开始)"""

    def __init__(self, n_nodes: int):
        if n_nodes < 1:
            raise OutOfRangeError(f"节点数必须为正: {n_nodes}")
        self.n_nodes = int(n_nodes)
        self.total = self.n_nodes * (self.n_nodes - 1) // 2

    def edge_linear(self, i: int, j: int) -> int:
        """节点对 -> 线性索引, 无序输入会被交换"""
        if i > j:
            i, j = j, i
        if i == j or i < 0 or j >= self.n_nodes:
            raise OutOfRangeError(f"无效节点对: ({i}, {j}) | N: {self.n_nodes}")
        return i * (2 * self.n_nodes - i - 1) // 2 + (j - i - 1)

    def edge_pair(self, m: int) -> Tuple[int, int]:
        """线性索引 -> 节点对"""
        if m < 0 or m >= self.total:
            raise OutOfRangeError(f"边索引越界: {m} | M: {self.total}")
        return int(self.rows[m]), int(self.cols[m])

    @cached_property
    def rows(self) -> np.ndarray:
        """每条边的较小端点"""
        return self._pairs[0]

    @cached_property
    def cols(self) -> np.ndarray:
        """每条边的较大端点"""
        return self._pairs[1]

    @cached_property
    def _pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        # triu_indices 按行优先输出, 即 (i, j) 的字典序
        rows, cols = np.triu_indices(self.n_nodes, k=1)
        rows = rows.astype(np.int64)
        cols = cols.astype(np.int64)
        rows.flags.writeable = False
        cols.flags.writeable = False
        return rows, cols

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeIndex) and other.n_nodes == self.n_nodes

    def __hash__(self) -> int:
        return hash(("EdgeIndex", self.n_nodes))

    def __repr__(self) -> str:
        return f"EdgeIndex(n_nodes={self.n_nodes}, total={self.total})"
