import pytest

from spion_mc_testbed.errors import CalibrationError
from spion_mc_testbed.frontend.calibration import CALIBRATION_TOLERANCE
from spion_mc_testbed.frontend.calibration import CalibrationTarget
from spion_mc_testbed.frontend.calibration import calibrate
from spion_mc_testbed.frontend.calibration import single_release_peak
from spion_mc_testbed.frontend.config import FrontendParams


class TestCalibration:
    """Gain and fill factor fits against a single-release amplitude."""

    def test_gain(self, config, channel_params, calibrated_frontend):
        """0.3 V at 10 mg/mL within 1% after quantization."""
        peak = single_release_peak(calibrated_frontend, config, 10.0, channel_params)
        assert peak == pytest.approx(0.3, rel=CALIBRATION_TOLERANCE)
        assert 0.02 < calibrated_frontend.amp_gain < 1.0

    def test_keeps_other_parameters(self, calibrated_frontend):
        defaults = FrontendParams()
        assert calibrated_frontend.noise_sigma == defaults.noise_sigma
        assert calibrated_frontend.fill_factor == defaults.fill_factor

    def test_fill_factor(self, config, channel_params):
        params = FrontendParams()
        calibrated = calibrate(params, config, 0.3, 10.0, channel_params, target=CalibrationTarget.FILL_FACTOR)
        assert calibrated.amp_gain == params.amp_gain
        assert calibrated.fill_factor < params.fill_factor
        assert single_release_peak(calibrated, config, 10.0, channel_params) == pytest.approx(0.3, rel=0.01)

    def test_other_reference(self, config, channel_params):
        calibrated = calibrate(FrontendParams(), config, 0.1, 1.0, channel_params)
        assert single_release_peak(calibrated, config, 1.0, channel_params) == pytest.approx(0.1, rel=0.01)

    def test_doubling_target_doubles_gain(self, config, channel_params):
        """The bridge output is linear in G for small signals."""
        low = calibrate(FrontendParams(), config, 0.15, 10.0, channel_params)
        high = calibrate(FrontendParams(), config, 0.3, 10.0, channel_params)
        assert high.amp_gain / low.amp_gain == pytest.approx(2.0, rel=CALIBRATION_TOLERANCE)
        assert single_release_peak(low, config, 10.0, channel_params) == pytest.approx(0.15, rel=0.01)

    def test_coarse_adc_misses_tolerance(self, config, channel_params):
        """With a 3-bit converter every achievable peak is a multiple of 0.125 V."""
        with pytest.raises(CalibrationError, match="quantized peak"):
            calibrate(FrontendParams(adc_bits=3), config, 0.3, 10.0, channel_params)

    def test_unreachable_gain(self, config, channel_params):
        """The ADC range limits the largest calibrated peak."""
        with pytest.raises(CalibrationError):
            calibrate(FrontendParams(), config, 0.95, 10.0, channel_params)

    def test_unreachable_fill_factor(self, config, channel_params):
        with pytest.raises(CalibrationError):
            calibrate(FrontendParams(), config, 0.45, 10.0, channel_params, target=CalibrationTarget.FILL_FACTOR)

    @pytest.mark.parametrize("target_peak, reference", [(0.0, 10.0), (0.3, 0.0), (-0.1, 10.0)])
    def test_invalid_arguments(self, config, target_peak, reference):
        with pytest.raises(CalibrationError):
            calibrate(FrontendParams(), config, target_peak, reference)

    def test_logs_result(self, config, channel_params, caplog):
        with caplog.at_level("INFO"):
            calibrate(FrontendParams(), config, 0.3, 10.0, channel_params)
        assert "calibrated gain" in caplog.text
