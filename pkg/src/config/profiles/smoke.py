"""
冒烟测试配置档

预热与间隔取很小的值, 覆盖 GIBBS_* 环境变量
"""

PROFILE_CONFIG = {
    'n_values': [25, 50],
    'replications': 3,
    'variant': 'brokerage',
    'gibbs': {
        'burn_in_sweeps': 10,
        'sweeps_between_samples': 1,
    },
    'description': '快速冒烟测试',
}
