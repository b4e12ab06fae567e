"""
命令行入口

子命令: generate-population / sample / fit / diagnose / experiment / summarize
退出码: 0 完成, 2 配置或输入错误, 1 其他错误
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from src.config.base_config import BaseConfig
from src.config.experiment_config import ExperimentConfig
from src.config.profiles import get_available_profiles
from src.core.diagnostics.bounds import AssumptionB1, AssumptionB2
from src.core.diagnostics.report import diagnose
from src.core.estimation.solver import SolverOptions, fit_mple
from src.core.exceptions import (
    BadNError,
    BadNodeIdError,
    ConfigError,
    DuplicateEdgeError,
    EmptyCoverageError,
    GraphLabError,
    InsufficientDataError,
    OutOfRangeError,
    SelfLoopError,
    WrongVariantError,
)
from src.core.models.spec import ModelSpec, Theta, Variant
from src.core.sampling.exact import sample_beta_exact
from src.core.sampling.gibbs import GibbsConfig, ScanOrder, gibbs_sample
from src.data.storage import DataStorage
from src.experiments.population_generator import generate_simulated_population
from src.experiments.runner import run_experiment, write_experiment_outputs
from src.experiments.summary import summarize_rate, summarize_trials
from src.utils.helpers import format_duration_ms, format_number, version_string
from src.utils.logger import ExperimentLogger, setup_logging

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# 归为配置/输入错误的异常
INPUT_ERRORS = (
    BadNError,
    BadNodeIdError,
    ConfigError,
    DuplicateEdgeError,
    EmptyCoverageError,
    OutOfRangeError,
    SelfLoopError,
    WrongVariantError,
)

logger = logging.getLogger("graph_lab.cli")


def _storage() -> DataStorage:
    # CLI 路径按当前工作目录解析
    return DataStorage(Path.cwd())


def _load_model(args) -> ModelSpec:
    storage = _storage()
    population = storage.load_population(args.population) if args.population else None
    return storage.load_model(args.model, population)


def cmd_generate_population(args) -> int:
    pop = generate_simulated_population(args.n, args.seed)
    _storage().save_population(pop, args.out)
    print(f"群体已生成 | N: {pop.n_nodes} | K: {pop.n_subpops} | D: {pop.max_neighborhood} | "
          f"min3: {pop.assumption_min3} -> {args.out}")
    return EXIT_OK


def _sample_manifest(args, model: ModelSpec, theta: Theta, gibbs_cfg: Optional[GibbsConfig]) -> dict:
    return {
        "sampler": "exact" if gibbs_cfg is None else "gibbs",
        "gibbs": gibbs_cfg.to_dict() if gibbs_cfg is not None else None,
        "variant": model.variant.value,
        "alpha": model.alpha,
        "n_nodes": model.n_nodes,
        "theta": theta.to_list(),
        "n_samples": args.n_samples,
        "seed": args.seed,
        "model_file": args.model,
        "theta_file": args.theta,
        "version": version_string(),
    }


def cmd_sample(args) -> int:
    storage = _storage()
    model = _load_model(args)
    theta = storage.load_theta(args.theta, model)
    gibbs_cfg = None
    if args.exact:
        graphs = [
            sample_beta_exact(theta, model, args.seed, stream_key=(k,))
            for k in range(args.n_samples)
        ]
    else:
        # 未指定时沿用 GIBBS_* 环境变量
        base = BaseConfig()
        gibbs_cfg = GibbsConfig(
            burn_in_sweeps=base.GIBBS_BURN_IN_SWEEPS if args.burn_in is None else args.burn_in,
            sweeps_between_samples=base.GIBBS_SPACING_SWEEPS if args.spacing is None else args.spacing,
            seed=args.seed,
            scan_order=args.scan_order,
        )
        graphs = gibbs_sample(theta, model, gibbs_cfg, args.n_samples)
    out_dir = Path(args.out)
    for k, g in enumerate(graphs, 1):
        storage.save_graph(g, out_dir / f"sample_{k:04d}.csv", variant=model.variant.value, seed=args.seed)
    storage.write_json(_sample_manifest(args, model, theta, gibbs_cfg), out_dir / "manifest.json")
    print(f"已写出 {len(graphs)} 个样本 -> {out_dir}")
    return EXIT_OK


def cmd_fit(args) -> int:
    storage = _storage()
    model = _load_model(args)
    g = storage.load_graph(args.graph, model.n_nodes)
    opts = SolverOptions(max_iterations=args.max_iter, init=args.init)
    started = time.perf_counter()
    result = fit_mple(g, model, gamma=args.gamma, opts=opts, strict=False)
    wall_ms = int(round((time.perf_counter() - started) * 1000))
    storage.write_json({**result.to_dict(), "wall_ms": wall_ms}, args.out)
    print(f"拟合完成 | 状态: {result.status.value} | 迭代: {result.iterations} | "
          f"梯度范数: {result.grad_inf_norm:.3e} | 耗时: {format_duration_ms(wall_ms)} -> {args.out}")
    if not result.converged:
        logger.warning(f"拟合未收敛 | 状态: {result.status.value}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    storage = _storage()
    model = _load_model(args)
    theta = storage.load_theta(args.theta, model)
    if args.assumption == "b1":
        if args.omega1 is None or args.omega2 is None:
            raise ConfigError("假设 b1 需要 --omega1 与 --omega2")
        assumption = AssumptionB1(args.omega1, args.omega2, absorbed=args.absorbed)
    else:
        assumption = AssumptionB2()
    report = diagnose(model, theta, assumption, mc_coupling=args.mc_coupling, n_mc=args.n_mc, seed=args.seed)
    storage.write_json(report.to_dict(), args.out)
    print(f"诊断完成 | D: {report.D} | π*: {report.pi_star_bound:.4f} | "
          f"|||𝒟|||₂ ≤ {report.coupling_norm_bound} | 阈值: {report.rate_threshold:.4f} -> {args.out}")
    return EXIT_OK


def _experiment_overrides(args) -> dict:
    return {
        "n_values": args.n_list,
        "replications": args.reps,
        "variant": args.variant,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "seed": args.seed,
        "output_dir": args.out,
        "n_workers": args.workers,
        "init": args.init,
        "record_wall_time": True if args.record_wall_time else None,
    }


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.build(args.profile, args.config, _experiment_overrides(args))
    experiment_logger = ExperimentLogger("experiment", cfg.LOG_DIR)
    try:
        result = run_experiment(cfg, experiment_logger)
    finally:
        experiment_logger.close()
    write_experiment_outputs(result, cfg)

    total_ms = sum(t[2] for t in result.timings)
    for n, entry in result.summary.items():
        median = entry.get("median_error_sup")
        print(f"N={n}: 收敛 {entry['n_converged']}/{entry['n_trials']} | "
              f"中位误差 {format_number(median)} | "
              f"r(N) {format_number(entry.get('rate_diagnostic'))}")
    print(f"实验完成, 试验耗时合计 {format_duration_ms(total_ms)} -> {cfg.OUTPUT_DIR}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    storage = _storage()
    records = storage.read_trials(args.trials)
    payload = {"per_n": summarize_trials(records)}
    try:
        rate = summarize_rate(records)
        payload["rate"] = rate.to_dict()
        print(rate.to_frame().to_string(index=False))
        print(f"max r / min r = {rate.ratio:.3f} | 速率一致: {rate.rate_ok}")
    except InsufficientDataError as e:
        payload["rate"] = None
        print(f"速率表不可用: {str(e)}")
    if args.out:
        storage.write_json(payload, args.out)
    return EXIT_OK


def _add_model_args(parser):
    parser.add_argument('--model', required=True, help='模型 JSON 文件')
    parser.add_argument('--population', help='群体 JSON 文件 (覆盖模型文件中的群体)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='graph-lab',
        description="依赖边的广义 β 模型: 抽样、估计与诊断",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  # 生成 N=125 的模拟群体
  graph-lab generate-population --n 125 --seed 7 --out pop.json

  # 用 Gibbs 抽取 10 个样本
  graph-lab sample --model model.json --theta theta.json --n-samples 10 --out samples/

  # 拟合
  graph-lab fit --model model.json --graph samples/sample_0001.csv --out fit.json

  # 桌面规模实验
  graph-lab experiment --profile desk_scale --out results/
        """
    )
    parser.add_argument('--log-level', default=None, help='日志级别 (默认读取 LOG_LEVEL)')
    subparsers = parser.add_subparsers(dest='command', help='可用命令')

    gen = subparsers.add_parser('generate-population', help='按模拟设计生成群体')
    gen.add_argument('--n', type=int, required=True, help='节点数, 25 的倍数')
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--out', required=True)

    sample = subparsers.add_parser('sample', help='从模型抽取图')
    _add_model_args(sample)
    sample.add_argument('--theta', required=True)
    sample.add_argument('--n-samples', type=int, default=1)
    sample.add_argument('--burn-in', type=int, default=None, help='预热扫描数 (默认读取 GIBBS_BURN_IN_SWEEPS)')
    sample.add_argument('--spacing', type=int, default=None, help='样本间隔扫描数 (默认读取 GIBBS_SPACING_SWEEPS)')
    sample.add_argument('--scan-order', choices=[s.value for s in ScanOrder], default=ScanOrder.SYSTEMATIC.value)
    sample.add_argument('--exact', action='store_true', help='β 模型的独立精确抽样')
    sample.add_argument('--seed', type=int, default=0)
    sample.add_argument('--out', required=True, help='输出目录')

    fit = subparsers.add_parser('fit', help='极大伪似然估计')
    _add_model_args(fit)
    fit.add_argument('--graph', required=True, help='边表 CSV')
    fit.add_argument('--gamma', type=float, default=1e-6)
    fit.add_argument('--max-iter', type=int, default=100)
    fit.add_argument('--init', choices=['zero', 'beta-warm'], default='zero')
    fit.add_argument('--out', required=True)

    diag = subparsers.add_parser('diagnose', help='依赖结构诊断')
    _add_model_args(diag)
    diag.add_argument('--theta', required=True)
    diag.add_argument('--assumption', choices=['b1', 'b2'], default='b2')
    diag.add_argument('--omega1', type=float)
    diag.add_argument('--omega2', type=float)
    diag.add_argument('--absorbed', action='store_true', help='ω₁ 已吸收 8D² 因子')
    diag.add_argument('--mc-coupling', choices=['off', 'exhaustive', 'sampled'], default='off')
    diag.add_argument('--n-mc', type=int, default=200)
    diag.add_argument('--seed', type=int, default=0)
    diag.add_argument('--out', default='report.json')

    exp = subparsers.add_parser('experiment', help='重复模拟实验')
    exp.add_argument('--config', help='实验配置 JSON')
    exp.add_argument('--profile', choices=get_available_profiles(), default=None)
    exp.add_argument('--n-list', type=int, nargs='+')
    exp.add_argument('--reps', type=int)
    exp.add_argument('--variant', choices=[v.value for v in Variant])
    exp.add_argument('--alpha', type=float)
    exp.add_argument('--gamma', type=float)
    exp.add_argument('--seed', type=int)
    exp.add_argument('--init', choices=['zero', 'beta-warm'])
    exp.add_argument('--workers', type=int)
    exp.add_argument('--record-wall-time', action='store_true')
    exp.add_argument('--out')

    summ = subparsers.add_parser('summarize', help='汇总 trials.csv')
    summ.add_argument('--trials', default='trials.csv')
    summ.add_argument('--out')

    return parser


COMMANDS = {
    'generate-population': cmd_generate_population,
    'sample': cmd_sample,
    'fit': cmd_fit,
    'diagnose': cmd_diagnose,
    'experiment': cmd_experiment,
    'summarize': cmd_summarize,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_OK

    base = BaseConfig()
    level = getattr(logging, args.log_level.upper(), base.LOG_LEVEL) if args.log_level else base.LOG_LEVEL
    setup_logging(log_level=level, log_dir=base.LOG_DIR)

    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        logger.error(f"配置或输入错误: {str(e)}")
        print(f"❌ 配置或输入错误: {str(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except GraphLabError as e:
        logger.error(f"执行失败: {str(e)}")
        print(f"❌ 执行失败: {str(e)}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"未预期的错误: {str(e)}")
        print(f"❌ 未预期的错误: {str(e)}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
