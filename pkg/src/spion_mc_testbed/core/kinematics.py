"""
Derived kinematic quantities of the duct-flow channel.

Internal units: s, cm, mL (= cm³), mg, V.
"""
import math

from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.errors import InvalidConfigError

_SECONDS_PER_MINUTE = 60.0
_MM_PER_CM = 10.0
_UL_PER_ML = 1000.0


def flow_to_cm3_per_s(ml_per_min: float) -> float:
    return ml_per_min / _SECONDS_PER_MINUTE


def flow_to_ml_per_min(cm3_per_s: float) -> float:
    return cm3_per_s * _SECONDS_PER_MINUTE


def cross_section_cm2(config: TestbedConfig) -> float:
    if not (config.tube_diameter > 0):
        raise InvalidConfigError(f"tube_diameter must be strictly positive, got {config.tube_diameter}")
    radius_cm = config.tube_diameter / _MM_PER_CM / 2.0
    return math.pi * radius_cm**2


def mean_velocity(config: TestbedConfig) -> float:
    """
    Mean axial velocity of the background flow.

    Parameters
    ----------
    config : TestbedConfig
        Testbed configuration.

    Returns
    -------
    float
        Velocity Q / A in cm/s (≈ 30.1 cm/s for 10 mL/min through a 0.84 mm tube).

    """
    if not (config.background_flow > 0):
        raise InvalidConfigError(f"background_flow must be strictly positive, got {config.background_flow}")
    return flow_to_cm3_per_s(config.background_flow) / cross_section_cm2(config)


def injection_duration(config: TestbedConfig) -> float:
    """Seconds the injection pump needs to release one "1" volume (0.624 s by default)."""
    if not (config.injection_flow > 0):
        raise InvalidConfigError(f"injection_flow must be strictly positive, got {config.injection_flow}")
    return (config.injection_volume / _UL_PER_ML) / flow_to_cm3_per_s(config.injection_flow)


def transit_time(config: TestbedConfig) -> float:
    return config.channel_length / mean_velocity(config)


def coil_length_cm(config: TestbedConfig) -> float:
    return config.coil_length / _MM_PER_CM
