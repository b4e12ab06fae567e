"""
桌面规模配置档

N ∈ {50, 100, 200}, 每个 N 重复 100 次; Gibbs 预热与间隔沿用 GIBBS_* 环境变量
"""

PROFILE_CONFIG = {
    'n_values': [50, 100, 200],
    'replications': 100,
    'variant': 'brokerage',
    'theta_star': {
        'lo': -1.25,
        'hi': -0.75,
        'brokerage': 0.25,
    },
    'description': '桌面规模复现',
}
