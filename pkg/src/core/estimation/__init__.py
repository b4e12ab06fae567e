"""
估计模块

伪对数似然、极大伪似然求解与 β 模型极大似然
"""

from .pseudo_likelihood import (
    PseudoLikelihoodDesign,
    expected_pseudo_grad,
    pseudo_grad,
    pseudo_hessian,
    pseudo_loglik,
)
from .solver import FitResult, FitStatus, InitMode, SolverOptions, fit_mple, mle_beta

__all__ = [
    'FitResult',
    'FitStatus',
    'InitMode',
    'PseudoLikelihoodDesign',
    'SolverOptions',
    'expected_pseudo_grad',
    'fit_mple',
    'mle_beta',
    'pseudo_grad',
    'pseudo_hessian',
    'pseudo_loglik',
]
