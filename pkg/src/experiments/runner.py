"""
重复实验

对每个 (N, 重复编号): 生成群体, 抽取 θ*, Gibbs 抽取一张图, 拟合 MPLE, 记录误差
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.config.experiment_config import ExperimentConfig
from src.core.estimation.solver import FitStatus, SolverOptions, fit_mple
from src.core.exceptions import InsufficientDataError
from src.core.models.spec import ModelSpec, Variant
from src.core.models.statistics import brokerage_count
from src.core.sampling.gibbs import GibbsConfig, gibbs_sample
from src.data.storage import DataStorage
from src.experiments.population_generator import ThetaStarSpec, draw_theta_star, generate_simulated_population
from src.experiments.summary import summarize_rate, summarize_trials
from src.utils.helpers import version_string
from src.utils.random_streams import trial_seed

logger = logging.getLogger(__name__)

# Gibbs 链在随机流中的编号
_CHAIN_ID = 0


@dataclass
class TrialRecord:
    """单次试验的结果, error_sup = max(error_degrees, error_brokerage)"""

    n: int
    rep: int
    seed: int
    converged: bool
    error_sup: float
    error_degrees: float
    error_brokerage: float
    iterations: int
    wall_ms: int = 0

    def to_row(self) -> dict:
        return asdict(self)


@dataclass
class PopulationRecord:
    n: int
    rep: int
    k: int
    d_max: int
    min_subpop_size: int
    assumption_min3: bool
    n_edges: int
    n_brokered: int
    norm_bound_ok: bool

    def to_row(self) -> dict:
        return asdict(self)


@dataclass
class TrialOutcome:
    record: TrialRecord
    population: Optional[PopulationRecord]
    status: str
    elapsed_ms: int
    message: str = ""


@dataclass(frozen=True)
class TrialSettings:
    """可在进程间传递的试验参数"""

    variant: str
    alpha: Optional[float]
    theta_star: ThetaStarSpec
    burn_in_sweeps: int
    sweeps_between_samples: int
    scan_order: str
    gamma: float
    max_iterations: int
    divergence_guard: float
    init: str
    seed: int
    record_wall_time: bool
    norm_bound_u: float

    @classmethod
    def from_config(cls, cfg: ExperimentConfig) -> "TrialSettings":
        return cls(
            variant=cfg.VARIANT,
            alpha=cfg.ALPHA,
            theta_star=ThetaStarSpec(cfg.THETA_LOW, cfg.THETA_HIGH, cfg.THETA_BROKERAGE),
            burn_in_sweeps=cfg.BURN_IN_SWEEPS,
            sweeps_between_samples=cfg.SWEEPS_BETWEEN_SAMPLES,
            scan_order=cfg.SCAN_ORDER,
            gamma=cfg.GAMMA,
            max_iterations=cfg.MAX_ITERATIONS,
            divergence_guard=cfg.DIVERGENCE_GUARD,
            init=cfg.INIT,
            seed=cfg.SEED,
            record_wall_time=cfg.RECORD_WALL_TIME,
            norm_bound_u=cfg.NORM_BOUND_U,
        )


@dataclass
class ExperimentResult:
    records: List[TrialRecord]
    populations: List[PopulationRecord]
    timings: List[Tuple[int, int, int]]
    summary: Dict = field(default_factory=dict)
    statuses: List[str] = field(default_factory=list)


def _failed_record(n: int, rep: int, seed: int) -> TrialRecord:
    nan = float("nan")
    return TrialRecord(n, rep, seed, False, nan, nan, nan, 0)


def run_trial(settings: TrialSettings, n: int, rep: int) -> TrialOutcome:
    """运行一次试验; 试验种子由根种子与 (N, 重复编号) 导出"""
    return run_seeded_trial(settings, n, rep, trial_seed(settings.seed, (n, rep)))


def run_seeded_trial(settings: TrialSettings, n: int, rep: int, seed: int) -> TrialOutcome:
    """
    以试验种子运行一次试验; 群体、θ* 与 Gibbs 链只依赖 seed, 可由 trials.csv 的 seed 列重现

    任何异常都转为 converged=false 的记录
    """
    started = time.perf_counter()
    population_record = None
    try:
        variant = Variant(settings.variant)
        pop = generate_simulated_population(n, seed)
        model = ModelSpec(variant, pop, settings.alpha)
        theta_star = draw_theta_star(pop, settings.theta_star, seed, variant)

        gibbs_cfg = GibbsConfig(
            burn_in_sweeps=settings.burn_in_sweeps,
            sweeps_between_samples=settings.sweeps_between_samples,
            seed=seed,
            scan_order=settings.scan_order,
            stream_key=(_CHAIN_ID,),
        )
        g = gibbs_sample(theta_star, model, gibbs_cfg, 1)[0]

        population_record = PopulationRecord(
            n=n,
            rep=rep,
            k=pop.n_subpops,
            d_max=pop.max_neighborhood,
            min_subpop_size=min(pop.subpop_sizes()),
            assumption_min3=pop.assumption_min3,
            n_edges=g.n_edges,
            n_brokered=brokerage_count(g, model) if model.has_brokerage else 0,
            norm_bound_ok=theta_star.norm_bound_ok(settings.norm_bound_u),
        )

        opts = SolverOptions(
            max_iterations=settings.max_iterations,
            divergence_guard=settings.divergence_guard,
            init=settings.init,
        )
        fit = fit_mple(g, model, gamma=settings.gamma, opts=opts, strict=False)
        diff = np.abs(fit.theta_hat.values - theta_star.values)
        error_degrees = float(diff[:n].max())
        error_brokerage = float(diff[-1]) if model.has_brokerage else 0.0
        elapsed = int(round((time.perf_counter() - started) * 1000))
        record = TrialRecord(
            n=n,
            rep=rep,
            seed=seed,
            converged=fit.status is FitStatus.CONVERGED,
            error_sup=max(error_degrees, error_brokerage),
            error_degrees=error_degrees,
            error_brokerage=error_brokerage,
            iterations=fit.iterations,
            wall_ms=elapsed if settings.record_wall_time else 0,
        )
        return TrialOutcome(record, population_record, fit.status.value, elapsed)
    except Exception as e:
        elapsed = int(round((time.perf_counter() - started) * 1000))
        return TrialOutcome(_failed_record(n, rep, seed), population_record, "Error", elapsed, str(e))


def _tasks(cfg: ExperimentConfig) -> List[Tuple[int, int]]:
    return [(n, rep) for n in cfg.N_VALUES for rep in range(cfg.REPLICATIONS)]


def run_experiment(cfg: ExperimentConfig, experiment_logger=None) -> ExperimentResult:
    """
    运行全部试验, 结果按 (N, 重复编号) 排序, 与完成顺序无关

    Args:
        cfg: 实验配置
        experiment_logger: 可选的 ExperimentLogger, 记录每次试验
    """
    settings = TrialSettings.from_config(cfg)
    tasks = _tasks(cfg)
    logger.info(
        f"开始实验 | 变体: {cfg.VARIANT} | N: {cfg.N_VALUES} | "
        f"重复: {cfg.REPLICATIONS} | 进程数: {cfg.N_WORKERS}"
    )

    if cfg.N_WORKERS > 1:
        with ProcessPoolExecutor(max_workers=cfg.N_WORKERS) as executor:
            outcomes = list(executor.map(
                run_trial, [settings] * len(tasks), [t[0] for t in tasks], [t[1] for t in tasks]
            ))
    else:
        outcomes = [run_trial(settings, n, rep) for n, rep in tasks]

    result = ExperimentResult(records=[], populations=[], timings=[])
    for outcome in outcomes:
        record = outcome.record
        result.records.append(record)
        result.statuses.append(outcome.status)
        result.timings.append((record.n, record.rep, outcome.elapsed_ms))
        if outcome.population is not None:
            result.populations.append(outcome.population)
            if not outcome.population.assumption_min3:
                detail = f"最小子群体规模: {outcome.population.min_subpop_size}"
                logger.warning(f"子群体规模不足 3 | N: {record.n} | Rep: {record.rep} | {detail}")
                if experiment_logger:
                    experiment_logger.log_assumption_event("min3", record.n, record.rep, detail)
        if outcome.status == "Error":
            logger.error(f"试验失败 | N: {record.n} | Rep: {record.rep} | {outcome.message}")
        elif outcome.status != FitStatus.CONVERGED.value and experiment_logger:
            experiment_logger.log_assumption_event(outcome.status, record.n, record.rep, "未收敛")
        if experiment_logger:
            experiment_logger.log_trial(
                record.n, record.rep, record.converged, record.error_sup, status=outcome.status
            )

    result.summary = summarize_trials(result.records)
    n_converged = sum(r.converged for r in result.records)
    logger.info(f"实验完成 | 试验数: {len(result.records)} | 收敛: {n_converged}")
    return result


def error_identity_holds(record: TrialRecord) -> bool:
    """error_sup = max(error_degrees, error_brokerage), 失败记录视为成立"""
    if math.isnan(record.error_sup):
        return True
    return record.error_sup == max(record.error_degrees, record.error_brokerage)


def build_summary(result: ExperimentResult) -> dict:
    """summary.json 的内容: 每个 N 的汇总与速率表 (N 不足两个时省略)"""
    payload = {"per_n": result.summary}
    try:
        payload["rate"] = summarize_rate(result.records).to_dict()
    except InsufficientDataError as e:
        payload["rate"] = None
        logger.info(f"速率表不可用: {str(e)}")
    return payload


def build_manifest(cfg: ExperimentConfig) -> dict:
    return {
        "version": version_string(),
        "config": cfg.to_dict(),
        "simulation": {
            "mechanism": "single-site Gibbs, one independent chain per trial, started from the empty graph",
            "burn_in_sweeps": cfg.BURN_IN_SWEEPS,
            "scan_order": cfg.SCAN_ORDER,
        },
        "files": ["trials.csv", "populations.csv", "timings.csv", "summary.json"],
    }


def write_experiment_outputs(result: ExperimentResult, cfg: ExperimentConfig, storage: Optional[DataStorage] = None) -> DataStorage:
    """写出 trials.csv、populations.csv、timings.csv、summary.json 与 manifest.json"""
    storage = storage or DataStorage(cfg.OUTPUT_DIR)
    storage.write_trials(result.records)
    storage.write_populations(result.populations)
    storage.write_timings(result.timings)
    storage.write_json(build_summary(result), "summary.json")
    storage.write_json(build_manifest(cfg), "manifest.json")
    return storage
