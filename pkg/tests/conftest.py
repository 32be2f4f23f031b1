import pytest

from spion_mc_testbed.channel.config import ChannelParams
from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.frontend.calibration import calibrate
from spion_mc_testbed.frontend.config import FrontendParams
from spion_mc_testbed.harness.sequences import CALIBRATION_REFERENCE_CONCENTRATION
from spion_mc_testbed.harness.sequences import CALIBRATION_TARGET_PEAK


@pytest.fixture(scope="session")
def config() -> TestbedConfig:
    return TestbedConfig()


@pytest.fixture(scope="session")
def channel_params(config) -> ChannelParams:
    return ChannelParams.from_config(config)


@pytest.fixture(scope="session")
def calibrated_frontend(config, channel_params) -> FrontendParams:
    return calibrate(
        FrontendParams(),
        config,
        CALIBRATION_TARGET_PEAK,
        CALIBRATION_REFERENCE_CONCENTRATION,
        channel_params=channel_params,
    )


@pytest.fixture(scope="session")
def quiet_frontend(calibrated_frontend) -> FrontendParams:
    return calibrated_frontend.without_noise()
