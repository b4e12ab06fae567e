"""
实验配置档模块

为不同规模的实验提供预设参数
"""

# 可用的配置档
AVAILABLE_PROFILES = {
    'desk_scale': 'desk_scale',
    'full_scale': 'full_scale',
    'smoke': 'smoke',
}


def get_profile_module(profile: str) -> str:
    """获取配置档模块名"""
    return AVAILABLE_PROFILES.get(profile, 'template')


def get_available_profiles() -> list:
    """获取支持的配置档列表"""
    return list(AVAILABLE_PROFILES.keys())


def is_profile_supported(profile: str) -> bool:
    """检查配置档是否存在"""
    return profile in AVAILABLE_PROFILES
