"""
β 模型精确抽样

各边独立服从 Bernoulli(logistic(θ_i + θ_j))
"""

from typing import Sequence

import numpy as np
from scipy.special import expit

from src.core.exceptions import WrongVariantError
from src.core.graph.graph import Graph
from src.core.models.spec import ModelSpec, Theta, Variant
from src.utils.random_streams import PURPOSE_GIBBS, make_rng


def edge_probabilities(theta: Theta, model: ModelSpec) -> np.ndarray:
    """β 模型每条边的连边概率"""
    if model.variant is not Variant.BETA:
        raise WrongVariantError(f"精确抽样只适用于 β 模型 | 当前变体: {model.variant.value}")
    theta.check_bound(model)
    index = model.population.edge_index
    degree = theta.degree_params
    return expit(degree[index.rows] + degree[index.cols])


def sample_beta_exact(theta: Theta, model: ModelSpec, seed: int, stream_key: Sequence[int] = ()) -> Graph:
    """抽取一个 β 模型图"""
    probs = edge_probabilities(theta, model)
    rng = make_rng(seed, PURPOSE_GIBBS, *stream_key)
    return Graph(model.n_nodes, rng.random(probs.shape[0]) < probs)
