"""
图基础模块

群体结构、边索引与图存储
"""

from .edge_index import EdgeIndex
from .graph import Graph
from .population import MIN_SUBPOP_SIZE, Population, build_population

__all__ = ['EdgeIndex', 'Graph', 'Population', 'build_population', 'MIN_SUBPOP_SIZE']
