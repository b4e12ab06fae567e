"""
依赖结构诊断报告
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.core.diagnostics.bounds import (
    Assumption,
    AssumptionB1,
    AssumptionB2,
    check_assumption_B,
    coupling_norm_bound,
    pi_star_bound,
    psi_bound,
)
from src.core.diagnostics.cond_ind import assumption_A_neighbors
from src.core.diagnostics.coupling import coupling_matrix_mc
from src.core.diagnostics.subpop_graph import build_subpop_graph
from src.core.exceptions import AssumptionViolatedError
from src.core.models.spec import ModelSpec, Theta

logger = logging.getLogger(__name__)


def rate_threshold(n_nodes: int, epsilon: float = 1.0, vartheta: float = 1.0) -> float:
    """ε·√(N^{2ϑ−1}/log N), 与 |||𝒟|||₂ 的上界并列给出"""
    return epsilon * math.sqrt(n_nodes ** (2.0 * vartheta - 1.0) / math.log(n_nodes))


@dataclass
class DependenceReport:
    D: int
    pi_star_bound: float
    psi_bound: float
    psi_empirical_max_change: float
    max_dependence_set: int
    assumption_B: dict
    assumption: str
    coupling_norm_bound: float
    coupling_bound_reason: Optional[str]
    rate_threshold: float
    mc_coupling_matrix: Optional[np.ndarray] = None
    mc_standard_errors: Optional[np.ndarray] = None
    mc_mode: str = "off"

    def to_dict(self) -> dict:
        bound = self.coupling_norm_bound
        return {
            "D": self.D,
            "pi_star_bound": self.pi_star_bound,
            "psi_bound": self.psi_bound,
            "psi_empirical_max_change": self.psi_empirical_max_change,
            "max_dependence_set": self.max_dependence_set,
            **self.assumption_B,
            "assumption": self.assumption,
            "coupling_norm_bound": bound if math.isfinite(bound) else "inf",
            "coupling_bound_reason": self.coupling_bound_reason,
            "rate_threshold": self.rate_threshold,
            "mc_mode": self.mc_mode,
            "mc_coupling_matrix": None if self.mc_coupling_matrix is None else self.mc_coupling_matrix.tolist(),
            "mc_standard_errors": None if self.mc_standard_errors is None else self.mc_standard_errors.tolist(),
        }


def diagnose(
    model: ModelSpec,
    theta: Theta,
    assumption: Assumption,
    mc_coupling: str = "off",
    n_mc: int = 200,
    seed: int = 0,
) -> DependenceReport:
    """
    汇总依赖结构诊断

    假设不成立时耦合范数上界记为 inf, 并记录原因
    """
    pop = model.population
    pi_star = pi_star_bound(model, theta)
    psi = psi_bound(pop, model, seed=seed)
    omega1 = assumption.omega1 if isinstance(assumption, AssumptionB1) else None
    omega2 = assumption.omega2 if isinstance(assumption, AssumptionB1) else None
    b_report = check_assumption_B(build_subpop_graph(pop), omega1, omega2, pi_star)

    reason = None
    try:
        bound = coupling_norm_bound(pop, model, theta, assumption)
    except AssumptionViolatedError as e:
        logger.warning(f"耦合范数上界不可用: {str(e)}")
        bound, reason = math.inf, str(e)

    report = DependenceReport(
        D=pop.max_neighborhood,
        pi_star_bound=pi_star,
        psi_bound=psi.analytic,
        psi_empirical_max_change=psi.empirical_max_change,
        max_dependence_set=assumption_A_neighbors(pop, model.variant).max_size,
        assumption_B=b_report.to_dict(),
        assumption="b2" if isinstance(assumption, AssumptionB2) else "b1",
        coupling_norm_bound=bound,
        coupling_bound_reason=reason,
        rate_threshold=rate_threshold(pop.n_nodes),
        mc_mode=mc_coupling,
    )
    if mc_coupling != "off":
        estimate = coupling_matrix_mc(model, theta, n_mc=n_mc, seed=seed, mode=mc_coupling)
        report.mc_coupling_matrix = estimate.matrix
        report.mc_standard_errors = estimate.standard_errors
    return report
