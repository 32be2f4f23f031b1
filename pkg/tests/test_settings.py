import math

import pytest

from spion_mc_testbed.channel.config import ImpulseModel
from spion_mc_testbed.errors import InvalidConfigError
from spion_mc_testbed.errors import InvalidParamsError
from spion_mc_testbed.frontend.config import FrontendParams
from spion_mc_testbed.harness.settings import Settings
from spion_mc_testbed.harness.settings import dump_frontend
from spion_mc_testbed.harness.settings import load_settings
from spion_mc_testbed.harness.settings import settings_from_dict


class TestLoadSettings:
    """YAML configuration files."""

    def test_defaults(self):
        settings = load_settings()
        assert settings.testbed.stock_concentration == 7.5
        assert settings.channel.impulse_model is ImpulseModel.LAMINAR_RTD

    def test_file(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text(
            "stock_concentration: 5\n"
            "rng_seed: 3\n"
            "channel:\n"
            "  impulse_model: gamma\n"
            "  clearance_time_constant: .inf\n"
            "frontend:\n"
            "  quality_factor: 50\n"
        )
        settings = load_settings(path)
        assert settings.testbed.stock_concentration == 5
        assert settings.testbed.rng_seed == 3
        assert settings.testbed.background_flow == 10.0
        assert settings.channel.impulse_model is ImpulseModel.GAMMA
        assert math.isinf(settings.channel.clearance_time_constant)
        assert settings.frontend.quality_factor == 50

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_settings(path) == Settings()

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(InvalidConfigError):
            load_settings(path)

    def test_broken_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("stock_concentration: [1, 2\n")
        with pytest.raises(InvalidConfigError):
            load_settings(path)

    @pytest.mark.parametrize(
        "raw",
        [
            {"stock_concentraton": 1.0},
            {"channel": {"impulse": "gamma"}},
            {"frontend": {"gain": 2.0}},
            {"channel": {"impulse_model": "plug-flow"}},
        ],
    )
    def test_unknown_keys(self, raw):
        with pytest.raises(InvalidConfigError):
            settings_from_dict(raw)

    def test_invalid_values(self):
        with pytest.raises(InvalidConfigError):
            settings_from_dict({"background_flow": -1})
        with pytest.raises(InvalidParamsError):
            settings_from_dict({"channel": {"dilution_factor": 2.0}})


class TestOverrides:
    """Command-line flags take precedence over the file."""

    def test_seed(self):
        assert Settings().with_overrides(seed=9).testbed.rng_seed == 9

    def test_noise_off(self):
        settings = Settings().with_overrides(noise=False)
        assert not settings.frontend.noise_enabled

    def test_noise_on_keeps_configured_sigma(self):
        settings = settings_from_dict({"frontend": {"noise_sigma": 0.02}}).with_overrides(noise=True)
        assert settings.frontend.noise_sigma == 0.02

    def test_snapshot(self):
        snapshot = Settings().snapshot()
        assert snapshot["channel"]["impulse_model"] == "laminar-rtd"
        assert snapshot["testbed"]["sample_rate"] == 100.0


class TestDumpFrontend:
    def test_round_trip(self, tmp_path):
        params = FrontendParams(amp_gain=0.125, noise_sigma=0.0)
        loaded = load_settings(dump_frontend(params, tmp_path / "frontend.yaml"))
        assert loaded.frontend == params
