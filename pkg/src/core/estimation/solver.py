"""
伪似然求解器

阻尼牛顿上升 (回溯线搜索、岭修正、梯度上升回退), 以及 β 模型的精确极大似然
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import expit

from src.core.exceptions import DegenerateDataError, WrongVariantError
from src.core.graph.graph import Graph
from src.core.models.spec import ModelSpec, Theta, Variant
from src.core.estimation.pseudo_likelihood import PseudoLikelihoodDesign

logger = logging.getLogger(__name__)

# Armijo 常数
_ARMIJO = 1e-4
# 目标函数在机器精度内持平时的相对容差
_FLAT_TOL = 1e-12


class FitStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"
    DEGENERATE_DATA = "DegenerateData"
    # 迭代上限之前线搜索已找不到上升步
    LINE_SEARCH_FAILED = "LineSearchFailed"


class InitMode(str, Enum):
    ZERO = "zero"
    BETA_WARM = "beta-warm"


@dataclass
class SolverOptions:
    """求解器选项"""

    max_iterations: int = 100
    divergence_guard: float = 50.0
    max_halvings: int = 60
    init: InitMode = InitMode.ZERO
    initial: Optional[Theta] = None

    def __post_init__(self):
        self.init = InitMode(self.init)


@dataclass
class FitResult:
    """拟合结果, in_theta_tilde_set 由梯度范数与 γ 决定"""

    theta_hat: Theta
    grad_inf_norm: float
    gamma: float
    iterations: int
    status: FitStatus
    trace: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def in_theta_tilde_set(self) -> bool:
        return self.grad_inf_norm <= self.gamma

    @property
    def converged(self) -> bool:
        return self.status is FitStatus.CONVERGED

    def to_dict(self) -> dict:
        return {
            "theta_hat": self.theta_hat.to_list(),
            "grad_inf_norm": self.grad_inf_norm,
            "gamma": self.gamma,
            "in_theta_tilde_set": self.in_theta_tilde_set,
            "iterations": self.iterations,
            "status": self.status.value,
            "trace": [{"objective": f, "grad_inf_norm": g} for f, g in self.trace],
        }


def _newton_direction(hessian: np.ndarray, grad: np.ndarray) -> Optional[np.ndarray]:
    """解 (−H) d = g; 分解失败或结果非有限时加岭"""
    info = -hessian
    size = info.shape[0]
    ridge = 1e-8 * max(float(np.trace(info)), 1e-300) / size
    for attempt in range(6):
        shifted = info if attempt == 0 else info + ridge * np.eye(size)
        try:
            factor = cho_factor(shifted, lower=True, check_finite=True)
            direction = cho_solve(factor, grad)
        except (LinAlgError, ValueError):
            direction = None
        if direction is not None and np.all(np.isfinite(direction)):
            return direction
        if attempt > 0:
            ridge *= 100.0
    return None


def _line_search(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    f: float,
    grad_norm: float,
    slope: float,
    direction: np.ndarray,
    max_halvings: int,
) -> Optional[Tuple[np.ndarray, float, np.ndarray]]:
    """步长从 1 开始减半, 直到目标上升"""
    alpha = 1.0
    for _ in range(max_halvings):
        trial = x + alpha * direction
        if np.all(np.isfinite(trial)):
            f_trial = objective(trial)
            if np.isfinite(f_trial):
                if f_trial >= f + _ARMIJO * alpha * slope:
                    return trial, f_trial, gradient(trial)
                if abs(f_trial - f) <= _FLAT_TOL * (1.0 + abs(f)):
                    g_trial = gradient(trial)
                    if np.max(np.abs(g_trial)) < grad_norm:
                        return trial, f_trial, g_trial
        alpha *= 0.5
    return None


def newton_ascent(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    hessian: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    gamma: float,
    opts: SolverOptions,
) -> Tuple[np.ndarray, FitStatus, int, List[Tuple[float, float]], float]:
    """
    凹目标函数的阻尼牛顿上升

    Returns:
        tuple: (解, 状态, 迭代次数, 轨迹, 梯度上确界范数)
    """
    x = np.array(x0, dtype=np.float64)
    f = objective(x)
    grad = gradient(x)
    grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
    trace = [(f, grad_norm)]
    status = FitStatus.MAX_ITERATIONS
    iterations = 0

    while True:
        if grad_norm <= gamma:
            status = FitStatus.CONVERGED
            break
        if iterations >= opts.max_iterations:
            break

        step = None
        direction = _newton_direction(hessian(x), grad)
        if direction is not None:
            slope = float(grad @ direction)
            if slope > 0:
                step = _line_search(objective, gradient, x, f, grad_norm, slope, direction, opts.max_halvings)
        if step is None:
            # 回退到梯度方向
            step = _line_search(
                objective, gradient, x, f, grad_norm, float(grad @ grad), grad, opts.max_halvings
            )
        if step is None:
            status = FitStatus.LINE_SEARCH_FAILED
            logger.warning(f"线搜索未找到上升步 | 迭代: {iterations} | 梯度范数: {grad_norm:.3e}")
            break

        x, f, grad = step
        grad_norm = float(np.max(np.abs(grad)))
        iterations += 1
        trace.append((f, grad_norm))

        if float(np.max(np.abs(x))) > opts.divergence_guard:
            status = FitStatus.DIVERGED
            logger.info(f"参数超出发散阈值 | 迭代: {iterations} | ‖θ‖∞: {np.max(np.abs(x)):.2f}")
            break

    return x, status, iterations, trace, grad_norm


def check_beta_degrees(g: Graph) -> None:
    """β 模型存在性的必要条件: 所有度严格位于 (0, N−1)"""
    degrees = g.degrees()
    boundary = np.flatnonzero((degrees == 0) | (degrees == g.n_nodes - 1))
    if boundary.size:
        raise DegenerateDataError(
            f"度序列位于边界, 估计量不存在 | 节点: {(boundary + 1).tolist()[:10]}"
        )


def _degenerate_result(model: ModelSpec, gamma: float, error: Exception) -> FitResult:
    logger.warning(f"数据退化: {str(error)}")
    return FitResult(
        theta_hat=Theta.zeros(model),
        grad_inf_norm=float("inf"),
        gamma=gamma,
        iterations=0,
        status=FitStatus.DEGENERATE_DATA,
    )


def _initial_theta(g: Graph, model: ModelSpec, opts: SolverOptions) -> np.ndarray:
    if opts.initial is not None:
        opts.initial.check_bound(model)
        return np.array(opts.initial.values)
    start = np.zeros(model.n_params)
    if opts.init is InitMode.BETA_WARM and model.variant is not Variant.BETA:
        try:
            warm = mle_beta(g, gamma=1e-8)
            start[: model.n_nodes] = warm.theta_hat.values
        except DegenerateDataError as e:
            logger.info(f"β 模型热启动不可用, 改用零初值: {str(e)}")
    return start


def fit_mple(
    g: Graph,
    model: ModelSpec,
    gamma: float = 1e-6,
    opts: Optional[SolverOptions] = None,
    strict: bool = True,
) -> FitResult:
    """
    极大伪似然估计

    Args:
        g: 观测图
        model: 模型
        gamma: 随机集合 Θ̃ 的梯度阈值
        opts: 求解器选项
        strict: 为 False 时退化数据返回 DegenerateData 状态而不抛出

    Returns:
        FitResult: 拟合结果
    """
    if gamma < 0:
        raise ValueError(f"gamma 不能为负: {gamma}")
    opts = opts or SolverOptions()
    if model.variant is Variant.BETA:
        try:
            check_beta_degrees(g)
        except DegenerateDataError as e:
            if strict:
                raise
            return _degenerate_result(model, gamma, e)

    design = PseudoLikelihoodDesign(g, model)
    x, status, iterations, trace, grad_norm = newton_ascent(
        design.value, design.gradient, design.hessian,
        _initial_theta(g, model, opts), gamma, opts,
    )
    logger.debug(
        f"MPLE 完成 | 变体: {model.variant.value} | 状态: {status.value} | "
        f"迭代: {iterations} | 梯度范数: {grad_norm:.3e}"
    )
    return FitResult(
        theta_hat=Theta.from_vector(x, model),
        grad_inf_norm=grad_norm,
        gamma=gamma,
        iterations=iterations,
        status=status,
        trace=trace,
    )


class _BetaLikelihood:
    """β 模型完整对数似然 ℓ(θ) = Σ θ_i d_i − Σ_{i<j} log(1 + e^{θ_i+θ_j})"""

    def __init__(self, g: Graph):
        self.degrees = g.degrees().astype(np.float64)
        self.upper = np.triu(np.ones((g.n_nodes, g.n_nodes), dtype=bool), k=1)

    def value(self, theta: np.ndarray) -> float:
        pair = theta[:, None] + theta[None, :]
        return float(theta @ self.degrees - np.logaddexp(0.0, pair[self.upper]).sum())

    def _probs(self, theta: np.ndarray) -> np.ndarray:
        probs = expit(theta[:, None] + theta[None, :])
        np.fill_diagonal(probs, 0.0)
        return probs

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        return self.degrees - self._probs(theta).sum(axis=1)

    def hessian(self, theta: np.ndarray) -> np.ndarray:
        probs = self._probs(theta)
        var = probs * (1.0 - probs)
        return -(var + np.diag(var.sum(axis=1)))


def mle_beta(g: Graph, gamma: float = 1e-6, model: Optional[ModelSpec] = None, opts: Optional[SolverOptions] = None) -> FitResult:
    """
    β 模型极大似然: 解矩方程 d_i = Σ_{j≠i} logistic(θ_i + θ_j)

    Raises:
        DegenerateDataError: 度序列位于边界
    """
    if model is not None and model.variant is not Variant.BETA:
        raise WrongVariantError(f"mle_beta 只适用于 β 模型 | 当前变体: {model.variant.value}")
    check_beta_degrees(g)
    opts = opts or SolverOptions()
    likelihood = _BetaLikelihood(g)
    x0 = np.array(opts.initial.values) if opts.initial is not None else np.zeros(g.n_nodes)
    x, status, iterations, trace, grad_norm = newton_ascent(
        likelihood.value, likelihood.gradient, likelihood.hessian, x0, gamma, opts,
    )
    return FitResult(
        theta_hat=Theta(x),
        grad_inf_norm=grad_norm,
        gamma=gamma,
        iterations=iterations,
        status=status,
        trace=trace,
    )
