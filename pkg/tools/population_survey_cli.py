#!/usr/bin/env python3
"""
群体结构调查命令行工具

统计模拟群体的子群体规模平衡、最大邻域、min-3 频率与假设 B 报告
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.config.profiles import get_available_profiles, get_profile_module
from src.core.diagnostics.bounds import check_assumption_B
from src.core.diagnostics.subpop_graph import build_subpop_graph
from src.core.exceptions import GraphLabError
from src.data.storage import DataStorage
from src.experiments.population_generator import generate_simulated_population


def _population_row(pop, seed: int) -> dict:
    sizes = np.array(pop.subpop_sizes())
    sg = build_subpop_graph(pop)
    report = check_assumption_B(sg)
    return {
        "seed": seed,
        "k": pop.n_subpops,
        "d_max": pop.max_neighborhood,
        "min_size": int(sizes.min()),
        "max_size": int(sizes.max()),
        "size_ratio": float(sizes.max() / sizes.min()),
        "min3": pop.assumption_min3,
        "tree": report.is_tree,
        "diameter": sg.diameter,
        "fitted_omega1": report.fitted_omega1,
        "max_growth_ratio": report.max_growth_ratio,
    }


def survey(args):
    """对多个种子生成群体并汇总"""
    try:
        rows = [
            _population_row(generate_simulated_population(args.n, seed), seed)
            for seed in range(args.start_seed, args.start_seed + args.seeds)
        ]
        frame = pd.DataFrame(rows)
        print(f"📊 群体调查 | N: {args.n} | 种子数: {args.seeds}")
        print(f"min-3 成立比例: {frame['min3'].mean():.1%}")
        print(f"子群体图为树的比例: {frame['tree'].mean():.1%}")
        print(f"D 中位数: {frame['d_max'].median():.1f} | 最大: {frame['d_max'].max()}")
        print(f"规模比 max/min 中位数: {frame['size_ratio'].median():.2f}")
        if args.verbose:
            print(frame.to_string(index=False))
        if args.out:
            frame.to_csv(args.out, index=False)
            print(f"明细已写入 {args.out}")
    except GraphLabError as e:
        print(f"❌ 调查失败: {str(e)}")
        sys.exit(2)


def inspect(args):
    """查看单个群体文件"""
    try:
        pop = DataStorage(Path.cwd()).load_population(args.population)
        row = _population_row(pop, -1)
        report = check_assumption_B(build_subpop_graph(pop), args.omega1, args.omega2)
        print(f"📋 群体 {args.population}")
        for key, value in row.items():
            if key != "seed":
                print(f"  {key}: {value}")
        print(f"  层规模 g(l): {report.layer_maxima}")
        if args.omega1 is not None:
            print(f"  B.1 (原始形式): {report.b1_raw_holds} | (吸收形式): {report.b1_absorbed_holds}")
    except GraphLabError as e:
        print(f"❌ 读取失败: {str(e)}")
        sys.exit(2)


def list_profiles(args):
    """列出实验配置档"""
    profiles = get_available_profiles()
    print("📋 可用的实验配置档:")
    for i, profile in enumerate(profiles, 1):
        print(f"  {i}. {profile} (src/config/profiles/{get_profile_module(profile)}.py)")
    print(f"\n总计: {len(profiles)} 个配置档")


def main():
    parser = argparse.ArgumentParser(
        description="群体结构调查工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  # 调查 N=125 的 50 个种子
  python tools/population_survey_cli.py survey --n 125 --seeds 50

  # 查看群体文件并检查 B.1
  python tools/population_survey_cli.py inspect --population pop.json --omega1 2 --omega2 0

  # 列出配置档
  python tools/population_survey_cli.py list
        """
    )

    subparsers = parser.add_subparsers(dest='command', help='可用命令')

    survey_parser = subparsers.add_parser('survey', help='多种子群体调查')
    survey_parser.add_argument('--n', type=int, required=True, help='节点数, 25 的倍数')
    survey_parser.add_argument('--seeds', type=int, default=20)
    survey_parser.add_argument('--start-seed', type=int, default=0)
    survey_parser.add_argument('--out', help='明细 CSV')
    survey_parser.add_argument('--verbose', '-v', action='store_true')

    inspect_parser = subparsers.add_parser('inspect', help='查看群体文件')
    inspect_parser.add_argument('--population', required=True)
    inspect_parser.add_argument('--omega1', type=float)
    inspect_parser.add_argument('--omega2', type=float)

    subparsers.add_parser('list', help='列出实验配置档')

    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        return

    if args.command == 'survey':
        survey(args)
    elif args.command == 'inspect':
        inspect(args)
    elif args.command == 'list':
        list_profiles(args)


if __name__ == '__main__':
    main()
