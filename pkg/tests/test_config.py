"""
配置档、JSON 配置文件与覆盖
"""

import json

import pytest

from src.config.experiment_config import ExperimentConfig
from src.config.profiles import get_available_profiles, get_profile_module, is_profile_supported
from src.core.exceptions import ConfigError


class TestProfiles:

    def test_available(self):
        assert set(get_available_profiles()) == {"desk_scale", "full_scale", "smoke"}
        assert is_profile_supported("smoke")
        assert get_profile_module("unknown") == "template"

    def test_desk_scale(self):
        cfg = ExperimentConfig.build("desk_scale")
        assert cfg.N_VALUES == [50, 100, 200]
        assert cfg.REPLICATIONS == 100
        assert (cfg.THETA_LOW, cfg.THETA_HIGH, cfg.THETA_BROKERAGE) == (-1.25, -0.75, 0.25)

    def test_gibbs_env_precedence(self, monkeypatch):
        monkeypatch.setenv("GIBBS_BURN_IN_SWEEPS", "7")
        monkeypatch.setenv("GIBBS_SPACING_SWEEPS", "3")
        desk = ExperimentConfig.build("desk_scale")
        assert (desk.BURN_IN_SWEEPS, desk.SWEEPS_BETWEEN_SAMPLES) == (7, 3)
        # smoke 显式给出 gibbs 键, 覆盖环境变量
        smoke = ExperimentConfig.build("smoke")
        assert (smoke.BURN_IN_SWEEPS, smoke.SWEEPS_BETWEEN_SAMPLES) == (10, 1)

    def test_full_scale(self):
        cfg = ExperimentConfig.build("full_scale")
        assert cfg.N_VALUES == [125, 250, 500, 1000]
        assert cfg.INIT == "beta-warm"

    def test_unknown_profile_keeps_defaults(self, monkeypatch):
        monkeypatch.setenv("REPLICATIONS", "9")
        cfg = ExperimentConfig("custom")
        assert cfg.REPLICATIONS == 9
        assert cfg.VARIANT == "brokerage"


class TestOverrides:

    def test_nested_keys(self):
        cfg = ExperimentConfig.build("smoke", overrides={
            "theta_star": {"lo": -2.0, "hi": -1.0},
            "gibbs": {"burn_in_sweeps": 4, "scan_order": "random_permutation_per_sweep"},
            "replications": 2,
            "seed": None,
        })
        assert (cfg.THETA_LOW, cfg.THETA_HIGH) == (-2.0, -1.0)
        assert cfg.BURN_IN_SWEEPS == 4
        assert cfg.SCAN_ORDER == "random_permutation_per_sweep"
        assert cfg.REPLICATIONS == 2
        assert cfg.SEED == cfg.DEFAULT_SEED

    @pytest.mark.parametrize("overrides", [
        {"variant": "sparse_brokerage"},
        {"variant": "sparse_brokerage", "alpha": 0.5},
        {"alpha": 0.1},
        {"n_values": [30]},
        {"n_values": []},
        {"variant": "ergm"},
        {"gamma": -1.0},
        {"init": "random"},
        {"theta_star": {"lo": 1.0, "hi": 0.0}},
        {"n_workers": 0},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ConfigError):
            ExperimentConfig.build("smoke", overrides=overrides)

    def test_sparse_with_alpha(self):
        cfg = ExperimentConfig.build("smoke", overrides={"variant": "sparse_brokerage", "alpha": 0.2})
        assert cfg.ALPHA == 0.2


class TestConfigFile:

    def test_load(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({
            "profile": "smoke",
            "replications": 7,
            "gibbs": {"sweeps_between_samples": 3},
            "output_dir": "out",
        }), encoding="utf-8")
        cfg = ExperimentConfig.build("desk_scale", config_path=path)
        assert cfg.profile == "smoke"
        assert cfg.N_VALUES == [25, 50]
        assert cfg.REPLICATIONS == 7
        assert cfg.SWEEPS_BETWEEN_SAMPLES == 3
        assert cfg.OUTPUT_DIR == "out"

    def test_overrides_win_over_file(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"replications": 7}), encoding="utf-8")
        cfg = ExperimentConfig.build("smoke", config_path=path, overrides={"replications": 1})
        assert cfg.REPLICATIONS == 1

    @pytest.mark.parametrize("content", ["{", '{"unknown_key": 1}', '{"replications": 0}', '{"n_values": []}'])
    def test_invalid_file(self, tmp_path, content):
        path = tmp_path / "exp.json"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(ConfigError):
            ExperimentConfig.build("smoke", config_path=path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.build("smoke", config_path=tmp_path / "absent.json")

    def test_to_dict_reloads(self, tmp_path):
        cfg = ExperimentConfig.build("smoke", overrides={"replications": 4})
        path = tmp_path / "dump.json"
        path.write_text(json.dumps(cfg.to_dict()), encoding="utf-8")
        reloaded = ExperimentConfig.build("desk_scale", config_path=path)
        assert reloaded.to_dict() == cfg.to_dict()
