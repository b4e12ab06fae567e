"""
伪似然、导数与求解器
"""

import math

import numpy as np
import pytest
from scipy.optimize import bisect
from scipy.special import expit, log_expit

from src.core.estimation import (
    FitStatus,
    PseudoLikelihoodDesign,
    SolverOptions,
    expected_pseudo_grad,
    fit_mple,
    mle_beta,
    pseudo_grad,
    pseudo_hessian,
    pseudo_loglik,
)
from src.core.estimation.solver import newton_ascent
from src.core.exceptions import DegenerateDataError, WrongVariantError
from src.core.graph.graph import Graph
from src.core.graph.population import build_population
from src.core.models.spec import ModelSpec, Theta, Variant
from src.core.sampling import GibbsConfig, gibbs_sample

from conftest import random_theta

ALL_VARIANTS = list(Variant)


def _model(variant, pop):
    return ModelSpec(variant, pop, 0.3 if variant is Variant.SPARSE_BROKERAGE else None)


def _random_case(rng, model):
    theta = random_theta(rng, model, scale=1.0)
    total = model.population.edge_index.total
    g = Graph(model.n_nodes, rng.random(total) < rng.uniform(0.2, 0.8))
    return theta, g


def _converged_fits(model, theta_star, n_graphs=20, seed=0, gamma=1e-10):
    """模拟若干图并保留收敛到有限内点的拟合"""
    cfg = GibbsConfig(burn_in_sweeps=20, sweeps_between_samples=3, seed=seed)
    graphs = gibbs_sample(theta_star, model, cfg, n_graphs)
    fits = [(g, fit_mple(g, model, gamma=gamma)) for g in graphs]
    # 梯度沿可分方向衰减时也会满足 γ, 用 ‖θ̃‖∞ 排除这类解
    return [(g, fit) for g, fit in fits if fit.converged and fit.theta_hat.sup_norm < 8.0]


class TestPseudoLikelihood:

    def test_beta_zero_theta(self, chain_example_population, rng):
        model = ModelSpec(Variant.BETA, chain_example_population)
        g = Graph(7, rng.random(21) < 0.5)
        assert pseudo_loglik(Theta.zeros(model), g, model) == pytest.approx(21 * math.log(0.5))

    def test_brokerage_zero_theta(self, triangle_population):
        model = ModelSpec(Variant.BROKERAGE, triangle_population)
        for state in range(8):
            g = Graph.from_state(3, state)
            assert pseudo_loglik(Theta.zeros(model), g, model) == pytest.approx(3 * math.log(0.5))

    def test_triangle_each_flip_toggles_three(self, triangle_population):
        model = ModelSpec(Variant.BROKERAGE, triangle_population)
        value = pseudo_loglik(Theta([0.0, 0.0, 0.0], 1.0), Graph.complete(3), model)
        assert value == pytest.approx(3 * float(log_expit(3.0)), rel=1e-12)

    def test_beta_gradient_empty_graph(self, triangle_population):
        model = ModelSpec(Variant.BETA, triangle_population)
        np.testing.assert_allclose(pseudo_grad(Theta.zeros(model), Graph.empty(3), model), [-1, -1, -1])

    def test_beta_hessian_diagonal(self, chain_example_population):
        model = ModelSpec(Variant.BETA, chain_example_population)
        hessian = pseudo_hessian(Theta.zeros(model), Graph.empty(7), model)
        np.testing.assert_allclose(np.diag(hessian), -6 / 4)

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_gradient_finite_differences(self, overlapping_five, variant, rng):
        model = _model(variant, overlapping_five)
        step = 1e-5
        for _ in range(50):
            theta, g = _random_case(rng, model)
            design = PseudoLikelihoodDesign(g, model)
            grad = design.gradient(theta)
            for k in range(model.n_params):
                shift = np.zeros(model.n_params)
                shift[k] = step
                numeric = (design.value(theta.values + shift) - design.value(theta.values - shift)) / (2 * step)
                assert abs(numeric - grad[k]) <= 1e-6 * max(1.0, abs(grad[k]))

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_hessian_finite_differences(self, overlapping_five, variant, rng):
        model = _model(variant, overlapping_five)
        step = 1e-5
        for _ in range(50):
            theta, g = _random_case(rng, model)
            design = PseudoLikelihoodDesign(g, model)
            hessian = design.hessian(theta)
            np.testing.assert_array_equal(hessian, hessian.T)
            for k in range(model.n_params):
                shift = np.zeros(model.n_params)
                shift[k] = step
                numeric = (design.gradient(theta.values + shift) - design.gradient(theta.values - shift)) / (2 * step)
                assert np.all(np.abs(numeric - hessian[:, k]) <= 1e-5 * np.maximum(1.0, np.abs(hessian[:, k])))

    def test_concavity(self, chain_example_population, overlapping_five, rng):
        pops = [chain_example_population, overlapping_five]
        for draw in range(200):
            model = _model(ALL_VARIANTS[draw % 4], pops[draw % 2])
            theta, g = _random_case(rng, model)
            hessian = pseudo_hessian(theta, g, model)
            assert np.linalg.eigvalsh(hessian).max() <= 1e-10

    def test_design_matches_functions(self, chain_example_population, rng):
        model = ModelSpec(Variant.SIZE_DEPENDENT, chain_example_population)
        theta, g = _random_case(rng, model)
        design = PseudoLikelihoodDesign(g, model)
        assert design.value(theta) == pseudo_loglik(theta, g, model)
        np.testing.assert_array_equal(design.gradient(theta), pseudo_grad(theta, g, model))

    def test_population_optimum(self, overlapping_five):
        model = ModelSpec(Variant.BROKERAGE, overlapping_five)
        theta_star = Theta([-0.8, -1.1, -0.9, -1.2, -0.75], 0.25)
        assert np.max(np.abs(expected_pseudo_grad(theta_star, model))) <= 1e-8


class TestSolver:

    def test_four_cycle_closed_form(self):
        g = Graph.from_edge_list(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        model = ModelSpec(Variant.BETA, build_population([[1, 2, 3, 4]], 4))
        fit = fit_mple(g, model, gamma=1e-12)
        root = bisect(lambda t: 3 * expit(2 * t) - 2, 0.0, 2.0, xtol=1e-14)
        assert fit.converged
        np.testing.assert_allclose(fit.theta_hat.values, math.log(2) / 2, atol=1e-8)
        assert root == pytest.approx(math.log(2) / 2, abs=1e-8)
        mle = mle_beta(g, gamma=1e-12)
        assert np.max(np.abs(mle.theta_hat.values - fit.theta_hat.values)) <= 1e-10

    def test_isolated_node_is_degenerate(self):
        g = Graph.from_edge_list(4, [(0, 1), (1, 2), (0, 2)])
        model = ModelSpec(Variant.BETA, build_population([[1, 2, 3, 4]], 4))
        with pytest.raises(DegenerateDataError):
            fit_mple(g, model)
        result = fit_mple(g, model, strict=False)
        assert result.status is FitStatus.DEGENERATE_DATA
        assert not result.in_theta_tilde_set

    def test_complete_graph_is_degenerate(self):
        with pytest.raises(DegenerateDataError):
            mle_beta(Graph.complete(5))

    def test_mle_beta_rejects_dependent_model(self, brokerage_model):
        with pytest.raises(WrongVariantError):
            mle_beta(Graph.complete(5), model=brokerage_model)

    def test_negative_gamma(self, brokerage_model):
        with pytest.raises(ValueError):
            fit_mple(Graph.empty(5), brokerage_model, gamma=-1.0)

    def test_mle_equals_mple_for_beta(self, rng):
        model = ModelSpec(Variant.BETA, build_population([list(range(1, 21))], 20))
        checked = 0
        while checked < 100:
            g = Graph(20, rng.random(190) < 0.5)
            degrees = g.degrees()
            if np.any(degrees == 0) or np.any(degrees == 19):
                continue
            mple = fit_mple(g, model, gamma=1e-11)
            mle = mle_beta(g, gamma=1e-11)
            assert mple.converged and mle.converged
            assert np.max(np.abs(mle.theta_hat.values - mple.theta_hat.values)) <= 1e-10
            theta = mle.theta_hat.values
            probs = expit(theta[:, None] + theta[None, :])
            np.fill_diagonal(probs, 0.0)
            np.testing.assert_allclose(probs.sum(axis=1), degrees, atol=1e-8)
            checked += 1

    def test_brokerage_fit_is_local_maximum(self, two_block_ten, rng):
        model = ModelSpec(Variant.BROKERAGE, two_block_ten)
        fits = _converged_fits(model, Theta([0.0] * 10, 0.25), gamma=1e-8)
        assert fits
        for g, fit in fits:
            assert fit.status is FitStatus.CONVERGED
            assert fit.in_theta_tilde_set
            design = PseudoLikelihoodDesign(g, model)
            best = design.value(fit.theta_hat)
            for _ in range(100):
                perturbed = fit.theta_hat.values + rng.normal(scale=0.1, size=model.n_params)
                assert design.value(perturbed) <= best + 1e-12

    def test_gradient_within_gamma(self, two_block_ten):
        model = ModelSpec(Variant.BROKERAGE, two_block_ten)
        fits = _converged_fits(model, Theta([0.0] * 10, 0.25), gamma=1e-8, seed=3)
        assert fits
        for g, fit in fits:
            assert np.max(np.abs(pseudo_grad(fit.theta_hat, g, model))) <= 1e-8
            assert fit.grad_inf_norm <= fit.gamma

    def test_beta_warm_start_same_optimum(self, two_block_ten):
        model = ModelSpec(Variant.BROKERAGE, two_block_ten)
        fits = _converged_fits(model, Theta([0.0] * 10, 0.25), seed=9)
        assert fits
        g, cold = fits[0]
        warm = fit_mple(g, model, gamma=1e-10, opts=SolverOptions(init="beta-warm"))
        assert warm.converged
        np.testing.assert_allclose(warm.theta_hat.values, cold.theta_hat.values, atol=1e-7)

    def test_relabeling_permutes_estimate(self, two_block_ten):
        model = ModelSpec(Variant.BROKERAGE, two_block_ten)
        fits = _converged_fits(model, Theta([0.0] * 10, 0.25), seed=4)
        assert fits
        g, fit = fits[0]
        perm = [3, 0, 4, 1, 2, 9, 8, 5, 7, 6]
        subpops = [[perm[v] + 1 for v in s] for s in two_block_ten.subpops]
        relabeled = ModelSpec(Variant.BROKERAGE, build_population(subpops, 10))
        h = Graph.from_edge_list(10, [(perm[i], perm[j]) for i, j in g.edge_list()])
        refit = fit_mple(h, relabeled, gamma=1e-10)
        assert refit.converged
        for v in range(10):
            assert refit.theta_hat.values[perm[v]] == pytest.approx(fit.theta_hat.values[v], abs=1e-7)
        assert refit.theta_hat.brokerage_param == pytest.approx(fit.theta_hat.brokerage_param, abs=1e-7)

    def test_dependent_model_reports_divergence(self, brokerage_model):
        # 节点 5 孤立, θ_5 → −∞
        g = Graph.from_edge_list(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
        fit = fit_mple(g, brokerage_model, gamma=0.0, opts=SolverOptions(divergence_guard=5.0))
        assert fit.status is FitStatus.DIVERGED
        assert not fit.converged

    def test_max_iterations(self, brokerage_model):
        g = Graph.from_edge_list(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
        fit = fit_mple(g, brokerage_model, gamma=0.0, opts=SolverOptions(max_iterations=1))
        assert fit.status in (FitStatus.MAX_ITERATIONS, FitStatus.DIVERGED)
        assert fit.iterations <= 1

    def test_line_search_failure_is_not_max_iterations(self):
        # 梯度与目标不一致: 任何步长都不能上升
        x, status, iterations, trace, grad_norm = newton_ascent(
            lambda x: 0.0,
            lambda x: np.ones_like(x),
            lambda x: -np.eye(x.shape[0]),
            np.zeros(2),
            gamma=1e-6,
            opts=SolverOptions(max_iterations=100, max_halvings=10),
        )
        assert status is FitStatus.LINE_SEARCH_FAILED
        assert iterations == 0
        assert len(trace) == 1
        assert grad_norm == 1.0
        np.testing.assert_array_equal(x, [0.0, 0.0])

    def test_result_serialization(self, brokerage_model):
        g = Graph.from_edge_list(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
        payload = fit_mple(g, brokerage_model).to_dict()
        assert set(payload) == {
            "theta_hat", "grad_inf_norm", "gamma", "in_theta_tilde_set", "iterations", "status", "trace",
        }
        assert len(payload["theta_hat"]) == 6
        assert payload["in_theta_tilde_set"] == (payload["grad_inf_norm"] <= payload["gamma"])
