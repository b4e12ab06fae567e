"""
图存储

长度为 M 的 numpy 布尔边向量 (每条边一个字节), 按字典序边索引存放, 无自环且无向;
packed 仅作哈希键, 不参与计算
"""

from functools import cached_property
from typing import Iterable, List, Tuple

import numpy as np

from src.core.exceptions import OutOfRangeError
from src.core.graph.edge_index import EdgeIndex


class Graph:
    """不可变的无向图"""

    def __init__(self, n_nodes: int, edges: np.ndarray):
        self.edge_index = EdgeIndex(n_nodes)
        self.n_nodes = self.edge_index.n_nodes
        edges = np.asarray(edges, dtype=bool)
        if edges.shape != (self.edge_index.total,):
            raise OutOfRangeError(
                f"边向量长度不匹配: {edges.shape} | 期望: ({self.edge_index.total},)"
            )
        edges = edges.copy()
        edges.flags.writeable = False
        self.edges = edges

    @classmethod
    def empty(cls, n_nodes: int) -> "Graph":
        return cls(n_nodes, np.zeros(n_nodes * (n_nodes - 1) // 2, dtype=bool))

    @classmethod
    def complete(cls, n_nodes: int) -> "Graph":
        return cls(n_nodes, np.ones(n_nodes * (n_nodes - 1) // 2, dtype=bool))

    @classmethod
    def from_edge_list(cls, n_nodes: int, pairs: Iterable[Tuple[int, int]]) -> "Graph":
        """由 0 起始编号的节点对构造"""
        index = EdgeIndex(n_nodes)
        edges = np.zeros(index.total, dtype=bool)
        for i, j in pairs:
            edges[index.edge_linear(int(i), int(j))] = True
        return cls(n_nodes, edges)

    @classmethod
    def from_adjacency(cls, adjacency: np.ndarray) -> "Graph":
        adjacency = np.asarray(adjacency)
        n_nodes = adjacency.shape[0]
        rows, cols = np.triu_indices(n_nodes, k=1)
        return cls(n_nodes, adjacency[rows, cols] != 0)

    @classmethod
    def from_state(cls, n_nodes: int, state: int) -> "Graph":
        """由整数状态构造, 第 m 位对应边 m"""
        total = n_nodes * (n_nodes - 1) // 2
        bits = (int(state) >> np.arange(total, dtype=np.int64)) & 1
        return cls(n_nodes, bits.astype(bool))

    @property
    def n_edges(self) -> int:
        return int(self.edges.sum())

    @cached_property
    def packed(self) -> bytes:
        """按位压缩的边向量副本, 用作哈希键"""
        return np.packbits(self.edges).tobytes()

    @property
    def state(self) -> int:
        """整数状态, 仅用于小图穷举"""
        return int(sum(1 << int(m) for m in np.flatnonzero(self.edges)))

    def adjacency(self) -> np.ndarray:
        """对称 0/1 邻接矩阵 (uint8), 返回副本"""
        adjacency = np.zeros((self.n_nodes, self.n_nodes), dtype=np.uint8)
        rows, cols = self.edge_index.rows, self.edge_index.cols
        adjacency[rows, cols] = self.edges
        adjacency[cols, rows] = self.edges
        return adjacency

    def degrees(self) -> np.ndarray:
        degrees = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(degrees, self.edge_index.rows[self.edges], 1)
        np.add.at(degrees, self.edge_index.cols[self.edges], 1)
        return degrees

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.edges[self.edge_index.edge_linear(i, j)])

    def with_edge(self, i: int, j: int, value: bool) -> "Graph":
        """返回修改了一条边的新图"""
        edges = self.edges.copy()
        edges[self.edge_index.edge_linear(i, j)] = bool(value)
        return Graph(self.n_nodes, edges)

    def flipped(self, m: int) -> "Graph":
        edges = self.edges.copy()
        edges[m] = not edges[m]
        return Graph(self.n_nodes, edges)

    def edge_list(self) -> List[Tuple[int, int]]:
        """0 起始编号的边列表, 字典序"""
        present = np.flatnonzero(self.edges)
        rows, cols = self.edge_index.rows, self.edge_index.cols
        return [(int(rows[m]), int(cols[m])) for m in present]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and other.n_nodes == self.n_nodes
            and np.array_equal(other.edges, self.edges)
        )

    def __hash__(self) -> int:
        return hash((self.n_nodes, self.packed))

    def __repr__(self) -> str:
        return f"Graph(N={self.n_nodes}, edges={self.n_edges})"
