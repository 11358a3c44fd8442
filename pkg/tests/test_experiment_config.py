from pathlib import Path

import numpy as np
import pytest

from experiment_config import ExperimentConfig, load_config, parse_config_text
from qec_errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

SAMPLE = """
# steane under depolarizing noise
code = steane7
kind = depolarizing_1q
grid_start = 0.001
grid_stop = 0.1
grid_points = 3
grid_scale = log
trials = 2000   # per point
seed = 99
"""


class TestParsing:

    def test_values_are_cast(self):
        config = parse_config_text(SAMPLE)
        assert config.code == "steane7"
        assert config.grid_points == 3
        assert config.grid_start == 0.001
        assert config.seed == 99
        assert config.workers == 1

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key 'trails'"):
            parse_config_text("trails = 10\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config_text("code = shor9\ntrials = many\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("code shor9\n")

    def test_config_error_exit_code(self):
        assert ConfigError("x").exit_code == 2


class TestValidation:

    def test_log_grid(self):
        grid = parse_config_text(SAMPLE).validate().grid()
        np.testing.assert_allclose(grid, [0.001, 0.01, 0.1])

    def test_single_epsilon(self):
        config = ExperimentConfig(code="shor9", kind="bit_flip", epsilon=0.05, seed=1).validate()
        np.testing.assert_array_equal(config.grid(), [0.05])

    @pytest.mark.parametrize("overrides, key", [
        ({"grid_points": 0}, "grid_points"),
        ({"seed": None}, "seed"),
        ({"seed": 2 ** 64}, "seed"),
        ({"grid_scale": "log", "grid_start": 0.0}, "grid_start"),
        ({"kind": "amplitude_damping"}, "kind"),
        ({"code": None}, "code"),
        ({"trials": 0}, "trials"),
        ({"format": "xml"}, "format"),
        ({"grid_stop": 1.5}, "grid_stop"),
    ])
    def test_rejected(self, overrides, key):
        values = dict(code="steane7", grid_start=0.01, grid_stop=0.1, grid_points=4, seed=5)
        values.update(overrides)
        with pytest.raises(ConfigError, match=key):
            ExperimentConfig(**values).validate()

    def test_no_grid(self):
        with pytest.raises(ConfigError, match="grid_start"):
            ExperimentConfig(code="steane7", seed=1).validate()


class TestTimedKinds:

    def test_grid_runs_over_duration(self):
        config = ExperimentConfig(
            code="steane7", kind="phase_damping", gamma=0.5, grid_start=0.5, grid_stop=4.0, grid_points=2, seed=1,
        ).validate()
        assert config.grid_key == "t"
        np.testing.assert_allclose(config.grid(), [0.5, 4.0])
        settings = config.channel_settings(4.0)
        assert settings["t"] == 4.0
        assert settings["gamma"] == 0.5
        assert settings["kind"] == "phase_damping"

    def test_single_duration(self):
        config = ExperimentConfig(code="bitflip3", kind="depolarizing_markov", gamma_tilde=1.0, t=2.0, seed=1).validate()
        np.testing.assert_array_equal(config.grid(), [2.0])

    def test_pauli_kinds_sweep_epsilon(self):
        config = ExperimentConfig(code="bitflip3", kind="bit_flip", epsilon=0.2, seed=1).validate()
        assert not config.is_timed
        assert config.channel_settings(0.3)["epsilon"] == 0.3

    @pytest.mark.parametrize("overrides, key", [
        ({"kind": "phase_damping"}, "gamma"),
        ({"kind": "depolarizing_markov", "gamma_tilde": -1.0}, "gamma_tilde"),
        ({"kind": "phase_damping", "gamma": 0.1, "grid_start": -0.5}, "grid_start"),
        ({"kind": "amplitude_damping", "big_gamma": 0.1}, "kind"),
    ])
    def test_rejected(self, overrides, key):
        values = dict(code="steane7", grid_start=0.1, grid_stop=5.0, grid_points=3, seed=5)
        values.update(overrides)
        with pytest.raises(ConfigError, match=key):
            ExperimentConfig(**values).validate()


class TestOverrides:

    def test_command_line_wins(self):
        config = parse_config_text(SAMPLE).with_overrides(seed=7, workers=None, out="run.csv")
        assert config.seed == 7
        assert config.workers == 1
        assert config.out == "run.csv"

    def test_seed_supplied_on_command_line(self):
        config = ExperimentConfig(code="steane7", epsilon=0.01).with_overrides(seed=3).validate()
        assert config.to_dict()["seed"] == 3


class TestLoading:

    def test_load(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(SAMPLE, encoding="utf-8")
        assert load_config(str(path)) == parse_config_text(SAMPLE)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "absent.cfg"))

    def test_shipped_configs_validate(self):
        for name in ("steane_depolarizing", "shor_bitflip", "five_qubit_noisy_syndrome", "steane_phase_damping"):
            load_config(str(CONFIG_DIR / f"{name}.cfg")).validate()
