"""
实验配置档模板

新配置档的模板文件, 未列出的键沿用环境变量与默认值;
列出的键 (包括 gibbs) 覆盖环境变量, 又被 JSON 配置文件与命令行覆盖
"""

PROFILE_CONFIG = {
    # N 网格, 每个 N 必须是 25 的倍数
    'n_values': [50, 100, 200],
    'replications': 100,

    # 模型变体: beta / brokerage / sparse_brokerage / size_dependent
    'variant': 'brokerage',
    # 仅 sparse_brokerage 使用, 0 ≤ α < 1/2
    'alpha': None,

    # θ* 的抽取: 度参数 ~ Uniform(lo, hi), 经纪参数固定
    'theta_star': {
        'lo': -1.25,
        'hi': -0.75,
        'brokerage': 0.25,
    },

    # Gibbs 抽样
    'gibbs': {
        'burn_in_sweeps': 50,
        'sweeps_between_samples': 5,
        'scan_order': 'systematic_lexicographic',
    },

    # 求解器
    'gamma': 1e-6,
    'max_iterations': 100,
    'init': 'zero',

    'description': '默认实验配置模板',
}
