import dataclasses
import math
from dataclasses import dataclass
from typing import Any
from typing import Dict

from spion_mc_testbed.errors import InvalidConfigError

MIN_OVERSAMPLING = 10


class AsDictMixin:
    """Flattens a (frozen) dataclass into a plain dict, enums replaced by their values."""

    def as_dict(self) -> Dict[str, Any]:
        result = {}
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            result[field.name] = getattr(value, "value", value)
        return result


def require_positive(owner: str, **values: float) -> None:
    for name, value in values.items():
        if not (value > 0):
            raise InvalidConfigError(f"{owner}.{name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class TestbedConfig(AsDictMixin):
    """
    Physical and protocol parameters of the testbed.

    Quantities are kept in the units they are usually quoted in for the hardware (mL/min, µL, mm, cm);
    conversion to the internal cm/s/mL system happens in ``spion_mc_testbed.core.kinematics``.

    Parameters
    ----------
    background_flow : float
        Background (carrier) flow rate, mL/min. Default 10.
    injection_flow : float
        Flow rate of the particle injection pump, mL/min. Default 10.
    injection_volume : float
        Volume of suspension released per "1" bit, µL. Default 104. Zero is allowed (no particles).
    stock_concentration : float
        Iron concentration of the injected suspension, mg/mL. Default 7.5.
    tube_diameter : float
        Channel inner diameter, mm. Default 0.84.
    channel_length : float
        Distance from the Y-connector to the detector coil, cm. Default 5.
    coil_length : float
        Axial length of the detector coil, mm. Default 20.
    symbol_duration : float
        Symbol duration T_S, s. Default 1.
    sample_rate : float
        Receiver output sample rate, samples/s. Default 100.
    rng_seed : int
        Seed for every stochastic component. Default 0.
    additive_injection_flow : bool
        If True, the injection adds to the background flow at the Y-connector (slug diluted 1:1).
        Default False.
    lead_time : float
        Baseline recorded before the first symbol, s. Recorded traces start at ``-lead_time``. Default 1.
    tail_time : float
        Recording kept after the last symbol, s. Default 9 (three clearance time constants).
    oversampling : int
        Simulation grid points per output sample, at least 10. Default 10.

    """

    __test__ = False  # not a pytest class despite the name

    background_flow: float = 10.0
    injection_flow: float = 10.0
    injection_volume: float = 104.0
    stock_concentration: float = 7.5
    tube_diameter: float = 0.84
    channel_length: float = 5.0
    coil_length: float = 20.0
    symbol_duration: float = 1.0
    sample_rate: float = 100.0
    rng_seed: int = 0
    additive_injection_flow: bool = False
    lead_time: float = 1.0
    tail_time: float = 9.0
    oversampling: int = 10

    def __post_init__(self):
        require_positive(
            "TestbedConfig",
            background_flow=self.background_flow,
            injection_flow=self.injection_flow,
            stock_concentration=self.stock_concentration,
            tube_diameter=self.tube_diameter,
            channel_length=self.channel_length,
            coil_length=self.coil_length,
            symbol_duration=self.symbol_duration,
            sample_rate=self.sample_rate,
            tail_time=self.tail_time,
        )
        if not (self.injection_volume >= 0) or math.isinf(self.injection_volume):
            raise InvalidConfigError(f"injection_volume must be a finite value >= 0, got {self.injection_volume}")
        if not (self.lead_time >= 0):
            raise InvalidConfigError(f"lead_time must be >= 0, got {self.lead_time}")
        if int(self.oversampling) != self.oversampling or self.oversampling < MIN_OVERSAMPLING:
            raise InvalidConfigError(
                f"oversampling must be an integer >= {MIN_OVERSAMPLING} (simulation grid at least {MIN_OVERSAMPLING}x "
                f"the sample rate), got {self.oversampling}"
            )
        if self.sample_rate * self.symbol_duration < 10:
            raise InvalidConfigError(
                "sample_rate * symbol_duration must be >= 10 samples per symbol, "
                f"got {self.sample_rate * self.symbol_duration:g}"
            )

    @property
    def fine_sample_rate(self) -> float:
        return self.sample_rate * self.oversampling

    def replace(self, **changes: Any) -> "TestbedConfig":
        return dataclasses.replace(self, **changes)
