"""
模拟群体生成、重复实验与速率汇总
"""

import dataclasses
import json
import math

import numpy as np
import pytest

from src.config.experiment_config import ExperimentConfig
from src.core.exceptions import BadNError, ConfigError, InsufficientDataError
from src.core.models.spec import Variant
from src.data.storage import DataStorage
from src.experiments.population_generator import (
    ThetaStarSpec,
    draw_theta_star,
    generate_simulated_population,
    membership_probabilities,
)
from src.experiments.runner import (
    TrialRecord,
    TrialSettings,
    error_identity_holds,
    run_experiment,
    run_seeded_trial,
    run_trial,
    write_experiment_outputs,
)
from src.experiments.summary import RATE_RATIO_LIMIT, rate_scale, summarize_rate, summarize_trials


def _records(errors_by_n, converged=True, reps=3):
    records = []
    for n, error in errors_by_n.items():
        for rep in range(reps):
            records.append(TrialRecord(n, rep, 0, converged, error, error, error / 2, 5))
    return records


def _smoke_config(tmp_path, **overrides):
    overrides = {"output_dir": str(tmp_path), "n_workers": 1, **overrides}
    return ExperimentConfig.build("smoke", overrides=overrides)


class TestPopulationGenerator:

    def test_membership_probabilities(self):
        np.testing.assert_allclose(membership_probabilities(np.zeros(4)), 0.25)
        np.testing.assert_allclose(membership_probabilities(np.array([3.0, 3.0, 3.0])), 1 / 3)
        probs = membership_probabilities(np.array([5.0, 1.0, 0.0]))
        assert probs.sum() == pytest.approx(1.0)
        assert probs[0] < probs[1] < probs[2]
        np.testing.assert_array_equal(membership_probabilities(np.array([7.0])), [1.0])

    def test_subpop_count(self):
        pop = generate_simulated_population(125, seed=1)
        assert pop.n_nodes == 125
        assert pop.n_subpops == 5
        assert all(len(pop.memberships[i]) >= 1 for i in range(125))

    @pytest.mark.parametrize("n", [0, 24, 30, -25])
    def test_bad_n(self, n):
        with pytest.raises(BadNError):
            generate_simulated_population(n, seed=0)

    def test_deterministic(self):
        assert generate_simulated_population(50, 3, (1,)) == generate_simulated_population(50, 3, (1,))
        assert generate_simulated_population(50, 3, (1,)) != generate_simulated_population(50, 3, (2,))

    def test_theta_star(self):
        spec = ThetaStarSpec()
        assert (spec.lo, spec.hi, spec.brokerage) == (-1.25, -0.75, 0.25)
        pop = generate_simulated_population(50, seed=2)
        theta = draw_theta_star(pop, spec, seed=2)
        assert np.all((theta.degree_params >= -1.25) & (theta.degree_params <= -0.75))
        assert theta.brokerage_param == 0.25
        assert theta.norm_bound_ok(1.25)
        assert not draw_theta_star(pop, spec, seed=2, variant=Variant.BETA).has_brokerage

    def test_theta_star_range(self):
        with pytest.raises(ConfigError):
            ThetaStarSpec(lo=0.5, hi=0.0)


class TestSummary:

    def test_constant_rate(self):
        grid = [50, 100, 200, 400]
        records = _records({n: 0.7 * rate_scale(n) for n in grid})
        table = summarize_rate(records)
        assert [row["n"] for row in table.rows] == grid
        for row in table.rows:
            assert row["r"] == pytest.approx(0.7)
        assert table.ratio == pytest.approx(1.0)
        assert table.rate_ok

    def test_slower_law_is_flagged(self):
        grid = [50, 500, 5000, 50000]
        table = summarize_rate(_records({n: 0.7 / math.log(n) for n in grid}))
        assert table.ratio > RATE_RATIO_LIMIT
        assert not table.rate_ok

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            summarize_rate([])
        with pytest.raises(InsufficientDataError):
            summarize_rate(_records({50: 0.3}))
        with pytest.raises(InsufficientDataError):
            summarize_rate(_records({50: 0.3}) + _records({100: 0.2}, converged=False))

    def test_unconverged_count_against_rate_only(self):
        records = _records({50: 0.3}) + [TrialRecord(50, 9, 0, False, 99.0, 99.0, 0.0, 100)]
        entry = summarize_trials(records)["50"]
        assert entry["n_trials"] == 4
        assert entry["n_converged"] == 3
        assert entry["convergence_rate"] == pytest.approx(0.75)
        assert entry["median_error_sup"] == pytest.approx(0.3)
        assert entry["rate_diagnostic"] == pytest.approx(0.3 / rate_scale(50))

    def test_reads_csv_rows(self):
        rows = [dict(r.to_row(), converged="True") for r in _records({50: 0.3, 100: 0.2})]
        assert set(summarize_trials(rows)) == {"50", "100"}


class TestRunner:

    def test_single_trial(self, tmp_path):
        settings = TrialSettings.from_config(_smoke_config(tmp_path))
        outcome = run_trial(settings, 25, 0)
        record = outcome.record
        assert outcome.status != "Error", outcome.message
        assert error_identity_holds(record)
        assert record.wall_ms == 0
        assert outcome.population.k == 1
        assert outcome.population.norm_bound_ok

    def test_trial_replays_from_recorded_seed(self, tmp_path):
        settings = TrialSettings.from_config(_smoke_config(tmp_path, replications=2))
        outcome = run_trial(settings, 25, 1)
        assert outcome.status != "Error", outcome.message
        assert 0 <= outcome.record.seed < 2 ** 63

        DataStorage(tmp_path).write_trials([outcome.record])
        row = DataStorage(tmp_path).read_trials()[0]
        # 根种子不同也不影响: 试验只依赖记录下来的种子
        replay = run_seeded_trial(dataclasses.replace(settings, seed=settings.seed + 1), 25, 1, int(row["seed"]))
        assert replay.record == outcome.record
        assert replay.population == outcome.population

    def test_error_identity(self):
        assert error_identity_holds(TrialRecord(25, 0, 0, True, 0.4, 0.4, 0.1, 3))
        assert not error_identity_holds(TrialRecord(25, 0, 0, True, 0.3, 0.4, 0.1, 3))
        nan = float("nan")
        assert error_identity_holds(TrialRecord(25, 0, 0, False, nan, nan, nan, 0))

    def test_failed_trial_is_recorded(self, tmp_path):
        settings = TrialSettings.from_config(_smoke_config(tmp_path))
        outcome = run_trial(settings, 30, 0)
        assert outcome.status == "Error"
        assert not outcome.record.converged
        assert math.isnan(outcome.record.error_sup)

    def test_reproducible_outputs(self, tmp_path):
        files = []
        for name in ("first", "second"):
            cfg = _smoke_config(tmp_path / name, replications=2)
            result = run_experiment(cfg)
            assert [(r.n, r.rep) for r in result.records] == [(25, 0), (25, 1), (50, 0), (50, 1)]
            assert all(error_identity_holds(r) for r in result.records)
            storage = write_experiment_outputs(result, cfg)
            files.append(storage.data_dir / "trials.csv")
        assert files[0].read_bytes() == files[1].read_bytes()

        out = tmp_path / "first"
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["config"]["n_values"] == [25, 50]
        assert "Gibbs" in manifest["simulation"]["mechanism"]
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert set(summary["per_n"]) == {"25", "50"}
        assert len(DataStorage(out).read_trials()) == 4
        assert (out / "populations.csv").exists() and (out / "timings.csv").exists()


@pytest.mark.slow
def test_desk_scale_error_trend(tmp_path):
    cfg = ExperimentConfig.build("desk_scale", overrides={"output_dir": str(tmp_path), "seed": 20240601})
    result = run_experiment(cfg)
    per_n = result.summary
    medians = [per_n[str(n)]["median_error_sup"] for n in (50, 100, 200)]
    assert medians[0] > medians[1] > medians[2]
    for n in (50, 100, 200):
        assert per_n[str(n)]["median_error_brokerage"] < per_n[str(n)]["median_error_degrees"]
    assert summarize_rate(result.records).ratio <= RATE_RATIO_LIMIT
