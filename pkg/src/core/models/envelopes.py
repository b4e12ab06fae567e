"""
条件概率包络

满条件概率 P(X_ij = x | 其余边) 的解析上下界
"""

import math
from dataclasses import dataclass
from typing import Dict

from src.core.models.spec import ModelSpec, Theta, Variant

INTERSECTING = "intersecting"
DISJOINT = "disjoint"


@dataclass(frozen=True)
class Envelope:
    """L_0 ≤ P(X=0|·) ≤ U_0, L_1 ≤ P(X=1|·) ≤ U_1"""

    lower_zero: float
    upper_zero: float
    lower_one: float
    upper_one: float

    def contains(self, prob_one: float, tol: float = 1e-12) -> bool:
        prob_zero = 1.0 - prob_one
        return (
            self.lower_one - tol <= prob_one <= self.upper_one + tol
            and self.lower_zero - tol <= prob_zero <= self.upper_zero + tol
        )

    def to_dict(self) -> Dict[str, float]:
        return {
            "L0": self.lower_zero,
            "U0": self.upper_zero,
            "L1": self.lower_one,
            "U1": self.upper_one,
        }


def _bounds(exponent: float, penalty: float) -> Envelope:
    # penalty = N^{-α}, 为 1 时无参考测度
    low = 1.0 / (1.0 + math.exp(exponent))
    high = 1.0 / (1.0 + math.exp(-exponent))
    return Envelope(
        lower_zero=low,
        upper_zero=1.0 / (1.0 + math.exp(-exponent) * penalty),
        lower_one=penalty * low,
        upper_one=high,
    )


def dependence_exponent(model: ModelSpec, theta: Theta) -> float:
    """|Δ| 的线性部分上界: β 模型为 2‖θ‖∞, 其他为 (3+2D)‖θ‖∞"""
    t = theta.sup_norm
    if model.variant is Variant.BETA:
        return 2.0 * t
    return (3.0 + 2.0 * model.population.max_neighborhood) * t


def conditional_prob_envelope(model: ModelSpec, theta: Theta) -> Dict[str, Envelope]:
    """
    按节点对类别返回包络

    Returns:
        dict: {"intersecting": 交集非空的节点对, "disjoint": 交集为空的节点对}
    """
    theta.check_bound(model)
    exponent = dependence_exponent(model, theta)
    penalty = math.exp(model.log_penalty)
    return {
        INTERSECTING: _bounds(exponent, 1.0),
        DISJOINT: _bounds(exponent, penalty),
    }


def envelope_for_pair(model: ModelSpec, theta: Theta, i: int, j: int) -> Envelope:
    envelopes = conditional_prob_envelope(model, theta)
    key = INTERSECTING if model.population.intersection_size(i, j) > 0 else DISJOINT
    return envelopes[key]
