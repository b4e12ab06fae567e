"""
依赖结构诊断: 条件独立图、子群体图、解析界与耦合矩阵
"""

import itertools
import json
import math

import numpy as np
import pytest

from src.core.diagnostics import (
    AssumptionB1,
    AssumptionB2,
    assumption_A_neighbors,
    build_cond_ind_graph,
    build_subpop_graph,
    check_assumption_B,
    coupled_draws,
    coupling_matrix_mc,
    coupling_norm_bound,
    diagnose,
    entry_bound_matrix,
    max_conditional_tv,
    mixed_difference_violations,
    pi_star_bound,
    prefix_conditional_marginals,
    psi_bound,
    rate_threshold,
    verify_cond_ind_empirically,
)
from src.core.exceptions import AssumptionViolatedError, ConfigError
from src.core.graph.population import build_population
from src.core.models.spec import ModelSpec, Theta, Variant

from conftest import chain_population, random_theta, star_population


def _path_population(n):
    return build_population([[i, i + 1] for i in range(1, n)], n)


def _cycle_population():
    # 子群体图为三角形
    return build_population([[1, 2, 3], [3, 4, 5], [5, 6, 1]], 6)


def _random_population(rng, n=30):
    """块划分保证覆盖, 再叠加若干随机子群体"""
    order = rng.permutation(n) + 1
    subpops = [order[k:k + 5].tolist() for k in range(0, n, 5)]
    for _ in range(4):
        subpops.append([v + 1 for v in rng.choice(n, size=3, replace=False).tolist()])
    return build_population(subpops, n)


class TestCondIndGraph:

    def test_beta_has_no_edges(self, chain_example_population):
        cig = build_cond_ind_graph(chain_example_population, Variant.BETA)
        assert cig.n_edges == 0
        assert cig.max_degree == 0

    def test_chain_example(self, chain_example_population):
        cig = build_cond_ind_graph(chain_example_population, Variant.BROKERAGE)
        index = chain_example_population.edge_index
        # X_{2,5} 不在任何因子中
        assert cig.is_isolated(index.edge_linear(1, 4))
        # X_{1,4} 与 X_{1,3}, X_{3,4} 同在 b_{14}
        x14 = index.edge_linear(0, 3)
        assert cig.has_edge(x14, index.edge_linear(0, 2))
        assert cig.has_edge(x14, index.edge_linear(2, 3))

    def test_disjoint_subpops_do_not_interact(self, two_disjoint_population):
        pop = two_disjoint_population
        cig = build_cond_ind_graph(pop, Variant.BROKERAGE)
        index = pop.edge_index
        left = [index.edge_linear(i, j) for i, j in itertools.combinations(range(3), 2)]
        right = [index.edge_linear(i, j) for i, j in itertools.combinations(range(3, 6), 2)]
        for a in left:
            for b in right:
                assert not cig.has_edge(a, b)
        for i in range(3):
            for j in range(3, 6):
                assert cig.is_isolated(index.edge_linear(i, j))

    def test_csr_matches_neighbors(self, chain_example_population):
        cig = build_cond_ind_graph(chain_example_population)
        ptr, idx = cig.csr
        for m in range(cig.n_vertices):
            assert set(idx[ptr[m]:ptr[m + 1]].tolist()) == cig.neighbors(m)
        np.testing.assert_array_equal(np.diff(ptr), cig.degrees())

    @pytest.mark.parametrize("variant", [Variant.BROKERAGE, Variant.SIZE_DEPENDENT, Variant.SPARSE_BROKERAGE])
    @pytest.mark.parametrize("fixture", ["overlapping_five", "path_five", "single_subpop_five"])
    def test_exhaustive_verification(self, request, fixture, variant, rng):
        pop = request.getfixturevalue(fixture)
        model = ModelSpec(variant, pop, 0.3 if variant is Variant.SPARSE_BROKERAGE else None)
        report = verify_cond_ind_empirically(model, random_theta(rng, model))
        assert report.mode == "exhaustive"
        assert report.n_checks > 0
        assert report.passed

    @pytest.mark.parametrize("variant", [Variant.BROKERAGE, Variant.SIZE_DEPENDENT])
    def test_randomized_verification(self, variant, rng):
        model = ModelSpec(variant, _random_population(rng))
        report = verify_cond_ind_empirically(model, random_theta(rng, model), n_random=1000, seed=5)
        assert report.mode == "randomized"
        assert report.n_checks == 1000
        assert report.passed

    @pytest.mark.parametrize("variant", list(Variant))
    def test_mixed_differences_vanish_off_graph(self, overlapping_five, variant, rng):
        model = ModelSpec(variant, overlapping_five, 0.3 if variant is Variant.SPARSE_BROKERAGE else None)
        assert mixed_difference_violations(model, random_theta(rng, model)) == []


class TestAssumptionA:

    def test_beta(self, chain_example_population):
        assert assumption_A_neighbors(chain_example_population, Variant.BETA).max_size == 0

    def test_chain_example(self, chain_example_population):
        report = assumption_A_neighbors(chain_example_population, cap=100)
        assert report.max_size == build_cond_ind_graph(chain_example_population).max_degree
        assert report.bounded
        assert not assumption_A_neighbors(chain_example_population, cap=0).bounded

    def test_bounded_along_chains(self):
        sizes = [assumption_A_neighbors(chain_population(k)).max_size for k in range(7, 11)]
        assert len(set(sizes)) == 1


class TestAnalyticBounds:

    def test_pi_star(self, single_subpop_five):
        beta = ModelSpec(Variant.BETA, single_subpop_five)
        assert pi_star_bound(beta, Theta([2.0] * 5)) == 0.0
        broker = ModelSpec(Variant.BROKERAGE, single_subpop_five)
        assert pi_star_bound(broker, Theta.zeros(broker)) == pytest.approx(0.5)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_pi_star_dominates_conditional_spread(self, overlapping_five, variant, rng):
        model = ModelSpec(variant, overlapping_five, 0.3 if variant is Variant.SPARSE_BROKERAGE else None)
        for _ in range(5):
            theta = random_theta(rng, model, scale=0.7)
            spread = max_conditional_tv(model, theta)
            if variant is Variant.BETA:
                assert spread == 0.0
            else:
                assert spread <= pi_star_bound(model, theta)

    def test_psi_beta(self):
        pop = _path_population(100)
        assert psi_bound(pop, ModelSpec(Variant.BETA, pop)).analytic == pytest.approx(10.0)

    def test_psi_dependent(self):
        pop = _path_population(100)
        assert pop.D == 2
        psi = psi_bound(pop, ModelSpec(Variant.BROKERAGE, pop), n_flips=200, seed=1)
        assert psi.analytic == pytest.approx(120.0)
        assert psi.lipschitz_cap == 5.0
        assert psi.empirical_max_change <= psi.lipschitz_cap

    def test_rate_threshold(self):
        assert rate_threshold(100) == pytest.approx(math.sqrt(100 / math.log(100)))
        assert rate_threshold(100, epsilon=2.0, vartheta=0.5) == pytest.approx(2.0 / math.sqrt(math.log(100)))


class TestSubpopGraph:

    def test_chain(self):
        sg = build_subpop_graph(chain_population(5))
        assert sg.is_tree and sg.is_connected
        assert sg.diameter == 4
        assert sg.layer_maxima == {1: 2, 2: 2, 3: 1, 4: 1}
        assert sg.layer(0, 2) == frozenset({2})

    def test_disconnected(self, two_disjoint_population):
        sg = build_subpop_graph(two_disjoint_population)
        assert not sg.is_connected
        assert math.isinf(sg.distance(0, 1))
        assert sg.diameter == 0

    def test_cycle_is_not_tree(self):
        assert not build_subpop_graph(_cycle_population()).is_tree


class TestAssumptionB:

    def test_chain_satisfies_b1(self):
        report = check_assumption_B(build_subpop_graph(chain_population(8)), omega1=2.0, omega2=0.0)
        assert report.is_tree
        assert max(report.layer_maxima.values()) <= 2
        assert report.b1_raw_holds
        assert report.holds_with == (2.0, 0.0)

    def test_star_is_flagged(self):
        report = check_assumption_B(build_subpop_graph(star_population(6)), omega1=2.0, omega2=0.0)
        assert report.layer_maxima[1] == 6
        assert not report.b1_raw_holds
        assert 1 in report.b1_violations
        assert report.holds_with is None
        assert report.fitted_omega1 == 6

    def test_omega2_admissibility(self):
        sg = build_subpop_graph(chain_population(4))
        assert check_assumption_B(sg, 2.0, 1.0, pi_star=0.5).omega2_admissible
        assert not check_assumption_B(sg, 2.0, 2.0, pi_star=0.5).omega2_admissible

    def test_negative_omega(self):
        with pytest.raises(ConfigError):
            AssumptionB1(-1.0, 0.0)


class TestCouplingNormBound:

    def test_beta_is_one(self, chain_example_population):
        model = ModelSpec(Variant.BETA, chain_example_population)
        assert coupling_norm_bound(chain_example_population, model, Theta([1.0] * 7), AssumptionB2()) == 1.0

    def test_grows_with_theta(self):
        pop = chain_population(4)
        model = ModelSpec(Variant.BROKERAGE, pop)
        small = coupling_norm_bound(pop, model, Theta.zeros(model), AssumptionB2())
        large = coupling_norm_bound(pop, model, Theta([1.0] * pop.n_nodes, 1.0), AssumptionB2())
        assert 1.0 <= small <= large

    def test_cycle_violates_b2(self):
        pop = _cycle_population()
        model = ModelSpec(Variant.BROKERAGE, pop)
        with pytest.raises(AssumptionViolatedError):
            coupling_norm_bound(pop, model, Theta.zeros(model), AssumptionB2())

    def test_b1_free_of_chain_length(self):
        values = []
        for k in range(3, 11):
            pop = chain_population(k)
            model = ModelSpec(Variant.BROKERAGE, pop)
            theta = Theta([0.01] * pop.n_nodes, 0.01)
            values.append(coupling_norm_bound(pop, model, theta, AssumptionB1(2.0, 0.0)))
        assert len(set(values)) == 1

    def test_b2_bounded_along_chains(self):
        values = []
        for k in range(3, 11):
            pop = chain_population(k)
            model = ModelSpec(Variant.BROKERAGE, pop)
            values.append(coupling_norm_bound(pop, model, Theta.zeros(model), AssumptionB2()))
        assert all(a <= b for a, b in zip(values, values[1:]))
        d = chain_population(3).D
        q = -math.expm1(2.0 * d * d * math.log(0.5))
        assert values[-1] <= 1.0 + 4.0 * d * d * q / (1.0 - q)

    def test_b1_envelope_failure(self):
        pop = star_population(6)
        model = ModelSpec(Variant.BROKERAGE, pop)
        with pytest.raises(AssumptionViolatedError):
            coupling_norm_bound(pop, model, Theta.zeros(model), AssumptionB1(2.0, 0.0))


class TestCouplingMatrix:

    def test_beta_is_identity(self, single_subpop_five):
        model = ModelSpec(Variant.BETA, single_subpop_five)
        estimate = coupling_matrix_mc(model, Theta([0.3, -0.2, 0.1, 0.0, 0.4]), n_mc=50)
        np.testing.assert_array_equal(estimate.matrix, np.eye(10))
        assert not estimate.low_confidence

    def test_entries_within_bounds(self, rng):
        pop = chain_population(2)
        model = ModelSpec(Variant.BROKERAGE, pop)
        theta = random_theta(rng, model, scale=0.3)
        estimate = coupling_matrix_mc(model, theta, n_mc=100, seed=3)
        bound = entry_bound_matrix(build_cond_ind_graph(pop), pi_star_bound(model, theta))
        assert np.all(estimate.matrix <= bound + 3 * estimate.standard_errors + 1e-12)
        np.testing.assert_array_equal(np.diag(estimate.matrix), 1.0)
        assert np.all(np.tril(estimate.matrix, -1) == 0)

    def test_coupled_marginals(self, brokerage_model, rng):
        theta = random_theta(rng, brokerage_model, scale=0.5)
        start, prefix = 3, 0b101
        first, second = coupled_draws(brokerage_model, theta, start, prefix, n_mc=4000, seed=8)
        assert np.all(first[:, start] == 0) and np.all(second[:, start] == 1)
        for draws, value in ((first, 0), (second, 1)):
            exact = prefix_conditional_marginals(brokerage_model, theta, start, prefix, value)
            se = np.sqrt(exact * (1 - exact) / draws.shape[0])
            assert np.all(np.abs(draws.mean(axis=0) - exact) <= 4 * se + 1e-12)

    def test_prefix_validation(self, brokerage_model):
        theta = Theta.zeros(brokerage_model)
        with pytest.raises(ConfigError):
            coupled_draws(brokerage_model, theta, 2, 0b100, n_mc=1)
        with pytest.raises(ConfigError):
            coupling_matrix_mc(brokerage_model, theta, mode="partial")

    def test_sampled_prefixes_are_low_confidence(self, brokerage_model):
        estimate = coupling_matrix_mc(brokerage_model, Theta.zeros(brokerage_model), n_mc=20, mode="sampled", n_prefixes=8)
        assert estimate.low_confidence
        assert estimate.mode == "sampled"


class TestReport:

    def test_violated_assumption_serializes_inf(self):
        pop = _cycle_population()
        model = ModelSpec(Variant.BROKERAGE, pop)
        report = diagnose(model, Theta.zeros(model), AssumptionB2())
        payload = report.to_dict()
        assert payload["coupling_norm_bound"] == "inf"
        assert payload["coupling_bound_reason"]
        assert payload["assumption"] == "b2"
        json.dumps(payload)

    def test_chain_report(self):
        pop = chain_population(2)
        model = ModelSpec(Variant.BROKERAGE, pop)
        report = diagnose(model, Theta.zeros(model), AssumptionB2(), mc_coupling="exhaustive", n_mc=20)
        payload = report.to_dict()
        assert payload["D"] == 4
        assert payload["pi_star_bound"] == pytest.approx(0.5)
        assert payload["assumption_B2"]["tree"]
        assert math.isfinite(payload["coupling_norm_bound"])
        assert len(payload["mc_coupling_matrix"]) == pop.edge_index.total
