"""
伪对数似然

ℓ̃(θ; x) = Σ_m log P_θ(X_m = x_m | x_{-m}) 及其梯度与 Hessian
"""

import numpy as np
from scipy.special import expit, log_expit

from src.core.graph.graph import Graph
from src.core.models.spec import ModelSpec, Theta
from src.core.models.statistics import change_statistics
from src.core.sampling.enumeration import enumerate_exact


class PseudoLikelihoodDesign:
    """
    观测图上的变化统计量表

    边 m 的统计量变化 δ_m 只依赖 x_{-m}, 因此与 θ 无关, 每个观测图只需计算一次
    """

    def __init__(self, g: Graph, model: ModelSpec):
        tables = model.tables
        self.model = model
        self.n_nodes = model.n_nodes
        self.n_params = model.n_params
        self.has_brokerage = model.has_brokerage
        self.rows = tables.rows
        self.cols = tables.cols
        self.x = g.edges.astype(np.float64)
        self.offset = tables.log_reference[self.rows, self.cols]
        self.brokerage_delta, _ = change_statistics(g, model)

    def _vector(self, theta) -> np.ndarray:
        if isinstance(theta, Theta):
            theta.check_bound(self.model)
            return theta.values
        return np.asarray(theta, dtype=np.float64)

    def log_odds(self, theta) -> np.ndarray:
        values = self._vector(theta)
        odds = values[self.rows] + values[self.cols] + self.offset
        if self.has_brokerage:
            odds = odds + values[-1] * self.brokerage_delta
        return odds

    def value(self, theta) -> float:
        odds = self.log_odds(theta)
        sign = 2.0 * self.x - 1.0
        return float(log_expit(sign * odds).sum())

    def gradient(self, theta) -> np.ndarray:
        residual = self.x - expit(self.log_odds(theta))
        grad = np.zeros(self.n_params)
        grad[: self.n_nodes] = (
            np.bincount(self.rows, weights=residual, minlength=self.n_nodes)
            + np.bincount(self.cols, weights=residual, minlength=self.n_nodes)
        )
        if self.has_brokerage:
            grad[-1] = float(residual @ self.brokerage_delta)
        return grad

    def hessian(self, theta) -> np.ndarray:
        p = expit(self.log_odds(theta))
        w = p * (1.0 - p)
        n = self.n_nodes
        info = np.zeros((self.n_params, self.n_params))
        diag = np.bincount(self.rows, weights=w, minlength=n) + np.bincount(self.cols, weights=w, minlength=n)
        info[np.arange(n), np.arange(n)] = diag
        info[self.rows, self.cols] = w
        info[self.cols, self.rows] = w
        if self.has_brokerage:
            wd = w * self.brokerage_delta
            cross = np.bincount(self.rows, weights=wd, minlength=n) + np.bincount(self.cols, weights=wd, minlength=n)
            info[:n, -1] = cross
            info[-1, :n] = cross
            info[-1, -1] = float(wd @ self.brokerage_delta)
        return -info


def pseudo_loglik(theta: Theta, g: Graph, model: ModelSpec) -> float:
    """伪对数似然 ℓ̃(θ; x)"""
    return PseudoLikelihoodDesign(g, model).value(theta)


def pseudo_grad(theta: Theta, g: Graph, model: ModelSpec) -> np.ndarray:
    """伪梯度 g(θ; x) = Σ_m (x_m − p_m) δ_m"""
    return PseudoLikelihoodDesign(g, model).gradient(theta)


def pseudo_hessian(theta: Theta, g: Graph, model: ModelSpec) -> np.ndarray:
    """伪 Hessian −Σ_m p_m(1−p_m) δ_m δ_mᵀ, 半负定"""
    return PseudoLikelihoodDesign(g, model).hessian(theta)


def expected_pseudo_grad(theta_star: Theta, model: ModelSpec, theta=None) -> np.ndarray:
    """
    E_{θ*} ∇ℓ̃(θ; X), 通过穷举精确计算

    theta 缺省时取 θ*, 此时结果应为零向量
    """
    theta = theta_star if theta is None else theta
    result = enumerate_exact(theta_star, model, keep_distribution=True)
    probs = result.probabilities()
    total = np.zeros(model.n_params)
    for state, weight in enumerate(probs):
        g = Graph.from_state(model.n_nodes, state)
        total += weight * PseudoLikelihoodDesign(g, model).gradient(theta)
    return total
