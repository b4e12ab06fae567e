"""
模型模块

模型变体、充分统计量、满条件概率与包络
"""

from .envelopes import Envelope, conditional_prob_envelope, envelope_for_pair
from .spec import ModelSpec, Theta, Variant, size_weight
from .statistics import (
    all_conditional_probs,
    brokerage_count,
    brokerage_indicator,
    conditional_edge_prob,
    log_reference,
    log_unnormalized_density,
    statistic_delta,
    suff_stats,
)

__all__ = [
    'Envelope',
    'ModelSpec',
    'Theta',
    'Variant',
    'all_conditional_probs',
    'brokerage_count',
    'brokerage_indicator',
    'conditional_edge_prob',
    'conditional_prob_envelope',
    'envelope_for_pair',
    'log_reference',
    'log_unnormalized_density',
    'size_weight',
    'statistic_delta',
    'suff_stats',
]
