"""
解析界

π* 界、光滑度 Ψ 界、假设 B 检查与耦合矩阵范数上界
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from src.core.diagnostics.cond_ind import MAX_EXHAUSTIVE_EDGES, CondIndGraph
from src.core.diagnostics.subpop_graph import SubpopGraph, build_subpop_graph
from src.core.exceptions import AssumptionViolatedError, ConfigError, TooLargeError
from src.core.graph.graph import Graph
from src.core.graph.population import Population
from src.core.models.envelopes import dependence_exponent
from src.core.models.spec import ModelSpec, Theta, Variant
from src.core.models.statistics import all_conditional_probs, suff_stats
from src.utils.random_streams import PURPOSE_SURVEY, make_rng

logger = logging.getLogger(__name__)

# 级数截断阈值
SERIES_TOL = 1e-15
# 级数显式求和的最大项数
MAX_SERIES_TERMS = 1_000_000
_SERIES_CHUNK = 100_000
# exp 溢出前的对数上限
_LOG_OVERFLOW = 700.0


def pi_star_bound(model: ModelSpec, theta: Theta) -> float:
    """β 模型为 0, 其他变体为 1/(1+exp(−(3+2D)‖θ‖∞))"""
    theta.check_bound(model)
    if model.variant is Variant.BETA:
        return 0.0
    return 1.0 / (1.0 + math.exp(-dependence_exponent(model, theta)))


def max_conditional_tv(model: ModelSpec, theta: Theta) -> float:
    """穷举所有 (边, 其余配置), 满条件概率 P(X_m=1|·) 的最大变化幅度"""
    theta.check_bound(model)
    total = model.population.edge_index.total
    if total > MAX_EXHAUSTIVE_EDGES:
        raise TooLargeError(f"穷举规模过大 | M: {total} | 上限: {MAX_EXHAUSTIVE_EDGES}")
    table = np.vstack([
        all_conditional_probs(Graph.from_state(model.n_nodes, s), theta, model)
        for s in range(1 << total)
    ])
    return float(np.max(table.max(axis=0) - table.min(axis=0))) if total else 0.0


@dataclass
class PsiBound:
    """Ψ 的解析界, 以及随机翻转下 s_{N+1} 的经验最大变化"""

    analytic: float
    empirical_max_change: float
    lipschitz_cap: float

    def to_dict(self) -> dict:
        return {
            "analytic": self.analytic,
            "empirical_max_change": self.empirical_max_change,
            "lipschitz_cap": self.lipschitz_cap,
        }


def psi_bound(pop: Population, model: ModelSpec, n_flips: int = 200, seed: int = 0) -> PsiBound:
    """
    Ψ ≤ √N (β 模型) 或 max{1, 3D²}·√N

    经验部分: 随机图上随机单边翻转, 记录 s_{N+1} 的最大变化, 应不超过 2D+1
    """
    n = pop.n_nodes
    D = pop.max_neighborhood
    if model.variant is Variant.BETA:
        return PsiBound(analytic=math.sqrt(n), empirical_max_change=0.0, lipschitz_cap=0.0)

    rng = make_rng(seed, PURPOSE_SURVEY, n, 1)
    total = pop.edge_index.total
    worst = 0.0
    for _ in range(n_flips if total else 0):
        g = Graph(n, rng.random(total) < rng.uniform(0.1, 0.9))
        m = int(rng.integers(total))
        change = abs(suff_stats(g.flipped(m), model)[-1] - suff_stats(g, model)[-1])
        worst = max(worst, float(change))
    return PsiBound(
        analytic=max(1.0, 3.0 * D * D) * math.sqrt(n),
        empirical_max_change=worst,
        lipschitz_cap=2.0 * D + 1.0,
    )


@dataclass(frozen=True)
class AssumptionB1:
    """g(l) ≤ ω₁ + ω₂/(8D²)·log l; absorbed=True 时 ω₁ 已吸收 8D² 因子"""

    omega1: float
    omega2: float
    absorbed: bool = False

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0:
            raise ConfigError(f"ω₁, ω₂ 不能为负 | ω₁: {self.omega1} | ω₂: {self.omega2}")


@dataclass(frozen=True)
class AssumptionB2:
    """子群体图为树"""


Assumption = Union[AssumptionB1, AssumptionB2]


@dataclass
class AssumptionBReport:
    layer_maxima: Dict[int, int]
    is_tree: bool
    growth_ratios: Dict[int, float]
    omega1: Optional[float] = None
    omega2: Optional[float] = None
    b1_raw_holds: Optional[bool] = None
    b1_absorbed_holds: Optional[bool] = None
    b1_violations: List[int] = field(default_factory=list)
    fitted_omega1: Optional[float] = None
    omega2_admissible: Optional[bool] = None

    @property
    def holds_with(self):
        """B.1 按原始形式成立时返回 (ω₁, ω₂)"""
        if self.b1_raw_holds:
            return (self.omega1, self.omega2)
        return None

    @property
    def max_growth_ratio(self) -> float:
        return max(self.growth_ratios.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "layer_maxima": {str(k): v for k, v in self.layer_maxima.items()},
            "assumption_B1": {
                "holds_with": list(self.holds_with) if self.holds_with else None,
                "raw_holds": self.b1_raw_holds,
                "absorbed_holds": self.b1_absorbed_holds,
                "violations_at_distance": self.b1_violations,
                "fitted_omega1": self.fitted_omega1,
                "omega2_admissible": self.omega2_admissible,
            },
            "assumption_B2": {
                "tree": self.is_tree,
                "growth_subexponential_witness": {str(k): v for k, v in self.growth_ratios.items()},
                "max_growth_ratio": self.max_growth_ratio,
            },
        }


def check_assumption_B(
    subpop_graph: SubpopGraph,
    omega1: Optional[float] = None,
    omega2: Optional[float] = None,
    pi_star: Optional[float] = None,
) -> AssumptionBReport:
    """
    检查假设 B

    Args:
        subpop_graph: 子群体图
        omega1, omega2: B.1 的包络常数, 缺省时只给出拟合的最小 ω₁ (取 ω₂=0)
        pi_star: 给出时检查 ω₂ < 1/|log(1−π*)|
    """
    maxima = subpop_graph.layer_maxima
    scale = 8.0 * max(subpop_graph.population.max_neighborhood, 1) ** 2
    report = AssumptionBReport(
        layer_maxima=dict(maxima),
        is_tree=subpop_graph.is_tree,
        growth_ratios=subpop_graph.growth_ratios(),
        omega1=omega1,
        omega2=omega2,
    )

    slope = 0.0 if omega2 is None else omega2
    report.fitted_omega1 = max(
        (g - slope / scale * math.log(l) for l, g in maxima.items()), default=0.0
    )

    if omega1 is not None:
        raw_fail = [l for l, g in maxima.items() if g > omega1 + slope / scale * math.log(l) + 1e-12]
        absorbed_fail = [l for l, g in maxima.items() if scale * g > omega1 + slope * math.log(l) + 1e-12]
        report.b1_raw_holds = not raw_fail
        report.b1_absorbed_holds = not absorbed_fail
        report.b1_violations = raw_fail

    if omega2 is not None and pi_star is not None:
        report.omega2_admissible = omega2 * abs(math.log1p(-pi_star)) < 1.0

    return report


def _b1_series(omega1_eff: float, omega2: float, log_a: float, rho: float) -> float:
    """1 + Σ_k (ω₁ + ω₂ log k)·exp(−A k^ρ), 截断后加解析尾项"""
    a = math.exp(log_a)
    if a == 0.0:
        return math.inf
    total = 1.0
    last = 0
    start = 1
    truncated = False
    while start <= MAX_SERIES_TERMS and not truncated:
        k = np.arange(start, min(start + _SERIES_CHUNK, MAX_SERIES_TERMS + 1), dtype=np.float64)
        terms = (omega1_eff + omega2 * np.log(k)) * np.exp(-a * k ** rho)
        small = np.flatnonzero(terms < SERIES_TOL)
        if small.size:
            terms = terms[: small[0]]
            truncated = True
        total += float(terms.sum())
        last = start + terms.size - 1
        start += _SERIES_CHUNK
    last = max(last, 1)

    # e^y ≥ y^u/u!, 且 ω₁ + ω₂ log k ≤ (ω₁+ω₂)k, 尾项由 Σ_{k>K} k^{1−uρ} 的积分控制
    u = math.ceil(3.0 / rho)
    exponent = u * rho
    log_tail = (
        math.log(omega1_eff + omega2) + math.lgamma(u + 1) - u * log_a
        + (2.0 - exponent) * math.log(last) - math.log(exponent - 2.0)
    ) if omega1_eff + omega2 > 0 else -math.inf
    if log_tail > _LOG_OVERFLOW:
        return math.inf
    return total + math.exp(log_tail)


def coupling_norm_bound(pop: Population, model: ModelSpec, theta: Theta, assumption: Assumption) -> float:
    """
    |||𝒟|||₂ 的解析上界

    Raises:
        AssumptionViolatedError: B.2 下子群体图不是树, 或 B.1 的 ω₂ 不可行/包络不成立
    """
    if model.variant is Variant.BETA:
        return 1.0
    pi_star = pi_star_bound(model, theta)
    log_stay = math.log1p(-pi_star)
    D = pop.max_neighborhood
    sg = build_subpop_graph(pop)

    if isinstance(assumption, AssumptionB2):
        if not sg.is_tree:
            raise AssumptionViolatedError("子群体图不是树")
        q = -math.expm1(2.0 * D * D * log_stay)
        return 1.0 + sum(
            2.0 * D * D * g * q ** k for k, g in sg.layer_maxima.items()
        )

    report = check_assumption_B(sg, assumption.omega1, assumption.omega2, pi_star)
    if not report.omega2_admissible:
        raise AssumptionViolatedError(
            f"需要 ω₂ < 1/|log(1−π*)| | ω₂: {assumption.omega2} | π*: {pi_star:.6f}"
        )
    holds = report.b1_absorbed_holds if assumption.absorbed else report.b1_raw_holds
    if not holds:
        raise AssumptionViolatedError(
            f"子群体层规模超出 B.1 包络 | 距离: {report.b1_violations[:10]}"
        )
    omega1_eff = assumption.omega1 if assumption.absorbed else 8.0 * D * D * assumption.omega1
    rho = 1.0 - assumption.omega2 * abs(log_stay)
    return _b1_series(omega1_eff, assumption.omega2, -omega1_eff * abs(log_stay), rho)


def entry_bound_matrix(cig: CondIndGraph, pi_star: float) -> np.ndarray:
    """
    𝒟 的逐项上界

    j > i 只有经过编号 ≥ i 的顶点可达时才可能不一致, 此时上界为 π*, 否则为 0
    """
    size = cig.n_vertices
    bound = np.eye(size)
    for i in range(size):
        for j in cig.reachable_above(i):
            if j > i:
                bound[i, j] = pi_star
    return bound
