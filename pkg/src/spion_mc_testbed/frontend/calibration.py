"""
Abstract version of the bench tuning step: the amplifier gain (or the coil fill factor) is set so that a single
release at a reference concentration produces a given peak above the no-particle level.
"""
import logging
from enum import Enum
from typing import Callable
from typing import Optional

from scipy import optimize

from spion_mc_testbed.channel.config import ChannelParams
from spion_mc_testbed.channel.simulator import schedule_injections
from spion_mc_testbed.channel.simulator import simulate_concentration
from spion_mc_testbed.channel.simulator import simulation_duration
from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.errors import CalibrationError
from spion_mc_testbed.frontend.bridge import bridge_output
from spion_mc_testbed.frontend.bridge import box_downsample
from spion_mc_testbed.frontend.bridge import difference_voltage
from spion_mc_testbed.frontend.bridge import zero_signal_level
from spion_mc_testbed.frontend.config import FrontendParams

_LOGGER = logging.getLogger(__name__)

CALIBRATION_TOLERANCE = 0.01
_MIN_FILL_FACTOR = 1e-9


class CalibrationTarget(Enum):
    """
    - GAIN - solve for the instrumentation amplifier gain G (the output is linear in G),
    - FILL_FACTOR - solve for the coil fill factor η with G fixed.
    """

    GAIN = "gain"
    FILL_FACTOR = "fill_factor"


def _single_release(config: TestbedConfig, channel_params: ChannelParams, reference_concentration: float):
    config = config.replace(stock_concentration=reference_concentration)
    events = schedule_injections((1,), config, dilution_factor=channel_params.dilution_factor)
    return simulate_concentration(events, channel_params, config, simulation_duration(1, config))


def single_release_peak(
    params: FrontendParams,
    config: TestbedConfig,
    reference_concentration: float,
    channel_params: Optional[ChannelParams] = None,
) -> float:
    """Noise-free, quantized peak of one release above the no-particle level, V."""
    channel_params = channel_params or ChannelParams.from_config(config)
    lanes = _single_release(config, channel_params, reference_concentration)
    trace = bridge_output(lanes[0], lanes[1], params.without_noise(), None, config.sample_rate)
    return float(trace.values.max() - trace.values[0])


def _solve(function: Callable[[float], float], low: float, high: float, what: str) -> float:
    f_low, f_high = function(low), function(high)
    if f_low > 0 or f_high < 0:
        raise CalibrationError(f"target peak is not reachable by varying {what} within [{low:g}, {high:g}]")
    return optimize.brentq(function, low, high, xtol=1e-14, rtol=1e-12)


def calibrate(
    params: FrontendParams,
    config: TestbedConfig,
    target_peak: float,
    reference_concentration: float,
    channel_params: Optional[ChannelParams] = None,
    target: CalibrationTarget = CalibrationTarget.GAIN,
) -> FrontendParams:
    """
    Calibrates the receiver model against a single-release amplitude.

    Parameters
    ----------
    params : FrontendParams
        Parameters to start from.
    config : TestbedConfig
        Testbed configuration; its stock concentration is replaced by ``reference_concentration``.
    target_peak : float
        Desired peak above the no-particle level, V.
    reference_concentration : float
        Stock concentration of the calibration release, mg/mL.
    channel_params : Optional[ChannelParams]
        Channel model; derived from ``config`` when omitted.
    target : CalibrationTarget
        Parameter to solve for. Default GAIN.

    Returns
    -------
    FrontendParams
        ``params`` with ``amp_gain`` (or ``fill_factor``) replaced; the quantized peak is within 1% of the target.

    Raises
    ------
    CalibrationError
        If the target is not reachable, or quantization leaves the peak more than 1% off.

    """
    if not (target_peak > 0):
        raise CalibrationError(f"target_peak must be strictly positive, got {target_peak}")
    if not (reference_concentration > 0):
        raise CalibrationError(f"reference_concentration must be strictly positive, got {reference_concentration}")

    channel_params = channel_params or ChannelParams.from_config(config)
    lanes = _single_release(config, channel_params, reference_concentration)
    c_measure, c_reference = lanes[0].values, lanes[1].values
    factor = config.oversampling
    # headroom keeps the peak one ADC step below full scale
    ceiling = params.adc_range - params.adc_step

    def top_level(candidate: FrontendParams) -> float:
        v_diff = box_downsample(difference_voltage(c_measure, c_reference, candidate), factor)
        return candidate.envelope_baseline + candidate.amp_gain * float(v_diff.max())

    def peak_above_zero(candidate: FrontendParams) -> float:
        return top_level(candidate) - zero_signal_level(candidate)

    if CalibrationTarget(target) is CalibrationTarget.GAIN:
        v_diff = box_downsample(difference_voltage(c_measure, c_reference, params), factor)
        max_gain = (ceiling - params.envelope_baseline) / v_diff.max()
        gain = _solve(
            lambda g: peak_above_zero(params.replace(amp_gain=g)) - target_peak, max_gain * 1e-12, max_gain, "gain"
        )
        calibrated = params.replace(amp_gain=gain)
    else:
        fill = _solve(
            lambda eta: peak_above_zero(params.replace(fill_factor=eta)) - target_peak,
            _MIN_FILL_FACTOR,
            1.0,
            "fill factor",
        )
        calibrated = params.replace(fill_factor=fill)
        if top_level(calibrated) > ceiling:
            raise CalibrationError(
                f"target peak needs an output of {top_level(calibrated):.3f} V, "
                f"above the ADC range of {params.adc_range} V"
            )

    achieved = single_release_peak(calibrated, config, reference_concentration, channel_params)
    _LOGGER.info(
        f"calibrated {CalibrationTarget(target).value}: G={calibrated.amp_gain:.6g}, eta={calibrated.fill_factor:.6g}, "
        f"peak {achieved:.4f} V for target {target_peak:.4f} V at {reference_concentration:g} mg/mL"
    )
    if abs(achieved - target_peak) > CALIBRATION_TOLERANCE * target_peak:
        raise CalibrationError(
            f"quantized peak {achieved:.4f} V misses the target {target_peak:.4f} V by more than "
            f"{CALIBRATION_TOLERANCE:.0%}, the ADC step of {params.adc_step:.4g} V is too coarse"
        )

    return calibrated
