"""
完整规模配置档

N ∈ {125, 250, 500, 1000}, 每个 N 重复 1000 次; 需要多进程与较长运行时间

此处的 gibbs 键覆盖 GIBBS_* 环境变量, 需要调整时用 --config 或命令行覆盖
"""

PROFILE_CONFIG = {
    'n_values': [125, 250, 500, 1000],
    'replications': 1000,
    'variant': 'brokerage',
    'theta_star': {
        'lo': -1.25,
        'hi': -0.75,
        'brokerage': 0.25,
    },
    'gibbs': {
        'burn_in_sweeps': 100,
        'sweeps_between_samples': 5,
    },
    'init': 'beta-warm',
    'description': '完整规模复现',
}
