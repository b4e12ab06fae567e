"""
测试公共设施

常用群体: 四个子群体的链状示例 (N=7)、单子群体、互不相交的两个子群体与子群体链
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.core.graph.population import build_population
from src.core.models.spec import ModelSpec, Theta, Variant


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行桌面规模的慢测试")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def chain_population(n_subpops: int, size: int = 3):
    """相邻子群体恰好共享一个节点的链, 1 起始编号"""
    subpops = []
    start = 1
    for _ in range(n_subpops):
        subpops.append(list(range(start, start + size)))
        start += size - 1
    return build_population(subpops, start, one_based=True)


def star_population(n_leaves: int):
    """中心子群体 {1,2,...,n_leaves+1}, 第 k 个叶子群体与中心共享节点 k+1"""
    hub = list(range(1, n_leaves + 2))
    subpops = [hub]
    nxt = n_leaves + 2
    for k in range(n_leaves):
        subpops.append([k + 2, nxt, nxt + 1])
        nxt += 2
    return build_population(subpops, nxt - 1, one_based=True)


def random_theta(rng: np.random.Generator, model: ModelSpec, scale: float = 1.0) -> Theta:
    return Theta.from_vector(rng.uniform(-scale, scale, size=model.n_params), model)


@pytest.fixture
def chain_example_population():
    # 子群体 {1,2,3} {3,4} {4,5} {5,6,7}
    return build_population([[1, 2, 3], [3, 4], [4, 5], [5, 6, 7]], 7, one_based=True)


@pytest.fixture
def triangle_population():
    return build_population([[1, 2, 3]], 3, one_based=True)


@pytest.fixture
def single_subpop_five():
    return build_population([[1, 2, 3, 4, 5]], 5, one_based=True)


@pytest.fixture
def two_disjoint_population():
    return build_population([[1, 2, 3], [4, 5, 6]], 6, one_based=True)


@pytest.fixture
def overlapping_five():
    # 子群体 {1,2,3} {3,4,5}: 既有共享子群体的节点对, 也有仅邻域相交的节点对
    return build_population([[1, 2, 3], [3, 4, 5]], 5, one_based=True)


@pytest.fixture
def path_five():
    # 两两相邻的子群体 {i, i+1}, 含交集为空的节点对
    return build_population([[1, 2], [2, 3], [3, 4], [4, 5]], 5, one_based=True)


@pytest.fixture
def brokerage_model(single_subpop_five):
    return ModelSpec(Variant.BROKERAGE, single_subpop_five)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def two_block_ten():
    # 子群体 {1..6} {5..10}
    return build_population([list(range(1, 7)), list(range(5, 11))], 10, one_based=True)
