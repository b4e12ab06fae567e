"""
随机数流

基于计数器的随机数生成器, 每个 (种子, 键) 对应一条独立的流
"""

from typing import Iterable

import numpy as np

# 用途标签, 作为 spawn_key 的第一位
PURPOSE_POPULATION = 0
PURPOSE_THETA = 1
PURPOSE_GIBBS = 2
PURPOSE_COUPLING = 3
PURPOSE_SURVEY = 4


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """
    创建独立的随机数流

    Args:
        seed: 根种子
        key: 流的标识, 如 (N, 重复编号, 用途)

    Returns:
        np.random.Generator: Philox 生成器
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def trial_seed(seed: int, key: Iterable[int]) -> int:
    """为单次试验导出一个可记录的种子, 取 63 位以便 CSV 按 int64 读回"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
