"""
子群体图

顶点为子群体, 两个子群体有公共成员时相邻
"""

import itertools
import math
from functools import cached_property
from typing import Dict, FrozenSet

import networkx as nx
import numpy as np

from src.core.graph.population import Population


class SubpopGraph:
    """子群体图及其全源最短距离, 不连通的距离为 inf"""

    def __init__(self, population: Population):
        self.population = population
        self.n_subpops = population.n_subpops
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_subpops))
        for k, l in itertools.combinations(range(self.n_subpops), 2):
            if population.subpops[k] & population.subpops[l]:
                graph.add_edge(k, l)
        self.graph = graph

    @cached_property
    def distances(self) -> np.ndarray:
        dist = np.full((self.n_subpops, self.n_subpops), np.inf)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, d in lengths.items():
                dist[source, target] = d
        dist.flags.writeable = False
        return dist

    def distance(self, k: int, l: int) -> float:
        return float(self.distances[k, l])

    def layer(self, k: int, distance: int) -> FrozenSet[int]:
        """与子群体 k 距离恰为 distance 的子群体"""
        return frozenset(np.flatnonzero(self.distances[k] == distance).tolist())

    @cached_property
    def diameter(self) -> int:
        """有限距离的最大值"""
        finite = self.distances[np.isfinite(self.distances)]
        return int(finite.max()) if finite.size else 0

    @cached_property
    def layer_maxima(self) -> Dict[int, int]:
        """g(l) = max_k |𝒱_{k,l}|, l = 1..diameter"""
        result = {}
        for distance in range(1, self.diameter + 1):
            counts = (self.distances == distance).sum(axis=1)
            result[distance] = int(counts.max())
        return result

    def layer_max(self, distance: int) -> int:
        return self.layer_maxima.get(distance, 0)

    @property
    def is_connected(self) -> bool:
        return self.n_subpops > 0 and nx.is_connected(self.graph)

    @property
    def is_tree(self) -> bool:
        return self.n_subpops > 0 and nx.is_tree(self.graph)

    def growth_ratios(self) -> Dict[int, float]:
        """log g(l) / l, 次指数增长时趋于 0"""
        return {l: math.log(g) / l for l, g in self.layer_maxima.items() if g > 0}


def build_subpop_graph(population: Population) -> SubpopGraph:
    return SubpopGraph(population)
