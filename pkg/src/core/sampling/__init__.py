"""
抽样模块

β 模型精确抽样、Gibbs 抽样与穷举预言机
"""

from .enumeration import EnumerationResult, brokerage_excess, enumerate_exact
from .exact import sample_beta_exact
from .gibbs import (
    GibbsConfig,
    GibbsSampler,
    ScanOrder,
    gibbs_sample,
    gibbs_transition_matrix,
    stationary_law,
)

__all__ = [
    'EnumerationResult',
    'GibbsConfig',
    'GibbsSampler',
    'ScanOrder',
    'brokerage_excess',
    'enumerate_exact',
    'gibbs_sample',
    'gibbs_transition_matrix',
    'sample_beta_exact',
    'stationary_law',
]
