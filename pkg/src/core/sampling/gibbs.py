"""
Gibbs 抽样器

基于满条件概率的单边 Gibbs 更新, 以及小规模下的完整转移矩阵
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse

from src.core.exceptions import ConfigError, TooLargeError
from src.core.graph.graph import Graph
from src.core.models import kernels
from src.core.models.spec import ModelSpec, Theta
from src.core.models.statistics import all_conditional_probs
from src.utils.random_streams import PURPOSE_GIBBS, make_rng

# 单批次最多生成的均匀随机数个数
_BATCH_DRAWS = 2_000_000
# 构造完整转移矩阵的边数上限
MAX_KERNEL_EDGES = 12


class ScanOrder(str, Enum):
    SYSTEMATIC = "systematic_lexicographic"
    RANDOM_PERMUTATION = "random_permutation_per_sweep"


@dataclass(frozen=True)
class GibbsConfig:
    """Gibbs 链配置"""

    burn_in_sweeps: int = 50
    sweeps_between_samples: int = 5
    seed: int = 0
    scan_order: ScanOrder = ScanOrder.SYSTEMATIC
    # 随机流标识, 如 (N, 重复编号, 链编号)
    stream_key: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.burn_in_sweeps < 0:
            raise ConfigError(f"burn-in 扫描数不能为负: {self.burn_in_sweeps}")
        if self.sweeps_between_samples < 1:
            raise ConfigError(f"样本间隔至少为 1 次扫描: {self.sweeps_between_samples}")
        object.__setattr__(self, "scan_order", ScanOrder(self.scan_order))

    def to_dict(self) -> dict:
        return {
            "burn_in_sweeps": self.burn_in_sweeps,
            "sweeps_between_samples": self.sweeps_between_samples,
            "seed": self.seed,
            "scan_order": self.scan_order.value,
            "stream_key": list(self.stream_key),
        }


class GibbsSampler:
    """单条 Gibbs 链, 状态只属于本对象"""

    def __init__(self, theta: Theta, model: ModelSpec, cfg: GibbsConfig, initial: Optional[Graph] = None):
        theta.check_bound(model)
        self.logger = logging.getLogger(self.__class__.__name__)
        self.theta = theta
        self.model = model
        self.cfg = cfg
        self.tables = model.tables
        self.n_sites = self.tables.rows.shape[0]
        self.rng = make_rng(cfg.seed, PURPOSE_GIBBS, *cfg.stream_key)

        start = initial if initial is not None else Graph.empty(model.n_nodes)
        self.adjacency = start.adjacency()
        self.shared = kernels.shared_partner_counts(self.adjacency, self.tables.neighbor_mask)
        self.theta_degree = np.array(theta.degree_params, dtype=np.float64)
        self.theta_brokerage = float(theta.brokerage_param)
        self.sweeps_done = 0

    def _scan(self, n_sweeps: int) -> np.ndarray:
        base = np.tile(np.arange(self.n_sites, dtype=np.int64), (n_sweeps, 1))
        if self.cfg.scan_order is ScanOrder.RANDOM_PERMUTATION:
            return self.rng.permuted(base, axis=1)
        return base

    def run_sweeps(self, n_sweeps: int) -> None:
        """执行 n_sweeps 次完整扫描"""
        if self.n_sites == 0 or n_sweeps <= 0:
            return
        per_batch = max(1, _BATCH_DRAWS // self.n_sites)
        remaining = n_sweeps
        while remaining > 0:
            batch = min(per_batch, remaining)
            order = self._scan(batch)
            uniforms = self.rng.random((batch, self.n_sites))
            kernels.gibbs_sweeps(
                order, uniforms, self.adjacency, self.shared,
                self.theta_degree, self.theta_brokerage,
                self.tables.weight, self.tables.log_reference,
                self.tables.neighbor_mask, self.tables.neighbor_ptr, self.tables.neighbor_idx,
                self.tables.rows, self.tables.cols,
            )
            remaining -= batch
        self.sweeps_done += n_sweeps

    def current_graph(self) -> Graph:
        return Graph.from_adjacency(self.adjacency)

    def sample(self, n_samples: int) -> List[Graph]:
        """burn-in 之后每隔 sweeps_between_samples 次扫描记录一个图"""
        self.run_sweeps(self.cfg.burn_in_sweeps)
        graphs = []
        for _ in range(n_samples):
            self.run_sweeps(self.cfg.sweeps_between_samples)
            graphs.append(self.current_graph())
        self.logger.debug(
            f"Gibbs 抽样完成 | 样本数: {n_samples} | 扫描数: {self.sweeps_done} | 边变量: {self.n_sites}"
        )
        return graphs


def gibbs_sample(
    theta: Theta,
    model: ModelSpec,
    cfg: GibbsConfig,
    n_samples: int,
    initial: Optional[Graph] = None,
) -> List[Graph]:
    """从空图 (或给定初始图) 出发运行一条链并返回 n_samples 个图"""
    return GibbsSampler(theta, model, cfg, initial).sample(n_samples)


def gibbs_transition_matrix(theta: Theta, model: ModelSpec) -> sparse.csr_matrix:
    """
    系统扫描一整轮的转移矩阵 P = P_0 P_1 ... P_{M-1}

    状态编码: 第 m 位为边 m; 仅适用于 M ≤ MAX_KERNEL_EDGES
    """
    n_sites = model.population.edge_index.total
    if n_sites > MAX_KERNEL_EDGES:
        raise TooLargeError(f"转移矩阵过大 | M: {n_sites} | 上限: {MAX_KERNEL_EDGES}")
    n_states = 1 << n_sites
    states = np.arange(n_states, dtype=np.int64)
    probs = np.vstack([
        all_conditional_probs(Graph.from_state(model.n_nodes, s), theta, model)
        for s in range(n_states)
    ])

    kernel = sparse.identity(n_states, format="csr")
    for m in range(n_sites):
        bit = np.int64(1) << m
        on = states | bit
        off = states & ~bit
        site = sparse.csr_matrix(
            (
                np.concatenate([probs[:, m], 1.0 - probs[:, m]]),
                (np.concatenate([states, states]), np.concatenate([on, off])),
            ),
            shape=(n_states, n_states),
        )
        kernel = kernel @ site
    return kernel.tocsr()


def stationary_law(kernel) -> np.ndarray:
    """求解 πP = π, Σπ = 1"""
    dense = kernel.toarray() if sparse.issparse(kernel) else np.asarray(kernel)
    n_states = dense.shape[0]
    system = dense.T - np.eye(n_states)
    system[-1, :] = 1.0
    rhs = np.zeros(n_states)
    rhs[-1] = 1.0
    return np.linalg.solve(system, rhs)
