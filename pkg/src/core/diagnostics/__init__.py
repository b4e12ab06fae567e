"""
诊断模块

条件独立图、子群体图、解析界与耦合矩阵估计
"""

from .bounds import (
    AssumptionB1,
    AssumptionB2,
    AssumptionBReport,
    PsiBound,
    check_assumption_B,
    coupling_norm_bound,
    entry_bound_matrix,
    max_conditional_tv,
    pi_star_bound,
    psi_bound,
)
from .cond_ind import (
    AssumptionAReport,
    CondIndGraph,
    CondIndReport,
    assumption_A_neighbors,
    build_cond_ind_graph,
    claimed_blanket,
    mixed_difference_violations,
    pair_condition,
    verify_cond_ind_empirically,
)
from .coupling import CouplingEstimate, coupled_draws, coupling_matrix_mc, prefix_conditional_marginals
from .report import DependenceReport, diagnose, rate_threshold
from .subpop_graph import SubpopGraph, build_subpop_graph

__all__ = [
    'AssumptionAReport',
    'AssumptionB1',
    'AssumptionB2',
    'AssumptionBReport',
    'CondIndGraph',
    'CondIndReport',
    'CouplingEstimate',
    'DependenceReport',
    'PsiBound',
    'SubpopGraph',
    'assumption_A_neighbors',
    'build_cond_ind_graph',
    'build_subpop_graph',
    'check_assumption_B',
    'claimed_blanket',
    'coupled_draws',
    'coupling_matrix_mc',
    'coupling_norm_bound',
    'diagnose',
    'entry_bound_matrix',
    'max_conditional_tv',
    'mixed_difference_violations',
    'pair_condition',
    'pi_star_bound',
    'prefix_conditional_marginals',
    'psi_bound',
    'rate_threshold',
    'verify_cond_ind_empirically',
]
