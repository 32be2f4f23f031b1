import math

import pytest

from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.core.kinematics import coil_length_cm
from spion_mc_testbed.core.kinematics import cross_section_cm2
from spion_mc_testbed.core.kinematics import flow_to_cm3_per_s
from spion_mc_testbed.core.kinematics import flow_to_ml_per_min
from spion_mc_testbed.core.kinematics import injection_duration
from spion_mc_testbed.core.kinematics import mean_velocity
from spion_mc_testbed.core.kinematics import transit_time
from spion_mc_testbed.errors import InvalidConfigError


class TestKinematics:
    """Derived quantities of the default testbed."""

    def test_mean_velocity(self, config):
        """10 mL/min through 0.84 mm gives about 30.1 cm/s."""
        assert mean_velocity(config) == pytest.approx(30.07, abs=0.05)

    def test_cross_section(self, config):
        """Area of a 0.042 cm radius circle."""
        assert cross_section_cm2(config) == pytest.approx(math.pi * 0.042**2)

    def test_injection_duration(self, config):
        """104 µL at 10 mL/min take 0.624 s."""
        assert injection_duration(config) == pytest.approx(0.624)

    def test_transit_time(self, config):
        """5 cm at mean velocity take about 0.166 s."""
        assert transit_time(config) == pytest.approx(0.166, abs=1e-3)

    def test_coil_length(self, config):
        assert coil_length_cm(config) == pytest.approx(2.0)

    def test_zero_injection_volume(self):
        """A zero volume is a valid config with zero injection time."""
        assert injection_duration(TestbedConfig(injection_volume=0)) == 0.0

    def test_velocity_scales_with_flow(self, config):
        assert mean_velocity(config.replace(background_flow=20)) == pytest.approx(2 * mean_velocity(config))


class TestFlowConversion:
    """Unit conversions at the boundary."""

    @pytest.mark.parametrize("flow", [0.5, 10.0, 123.4])
    def test_round_trip(self, flow):
        assert flow_to_ml_per_min(flow_to_cm3_per_s(flow)) == pytest.approx(flow)

    def test_known_value(self):
        assert flow_to_cm3_per_s(60.0) == pytest.approx(1.0)


class TestConfigValidation:
    """TestbedConfig rejects inconsistent parameters."""

    @pytest.mark.parametrize(
        "changes",
        [
            {"background_flow": 0},
            {"injection_flow": -1},
            {"tube_diameter": 0},
            {"channel_length": -5},
            {"symbol_duration": 0},
            {"stock_concentration": 0},
            {"injection_volume": -1},
            {"oversampling": 0},
            {"oversampling": 9},
            {"oversampling": 12.5},
            {"lead_time": -1},
        ],
    )
    def test_invalid(self, changes):
        with pytest.raises(InvalidConfigError):
            TestbedConfig(**changes)

    def test_too_few_samples_per_symbol(self):
        """sample_rate * symbol_duration must give at least 10 samples."""
        with pytest.raises(InvalidConfigError):
            TestbedConfig(sample_rate=100, symbol_duration=0.05)

    def test_invalid_config_is_value_error(self):
        with pytest.raises(ValueError):
            TestbedConfig(background_flow=-1)

    def test_as_dict(self, config):
        values = config.as_dict()
        assert values["stock_concentration"] == 7.5
        assert values["sample_rate"] == 100.0
        assert config.fine_sample_rate == pytest.approx(1000.0)
