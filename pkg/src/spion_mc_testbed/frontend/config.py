import dataclasses
from dataclasses import dataclass
from typing import Any

from spion_mc_testbed.core.config import AsDictMixin
from spion_mc_testbed.errors import InvalidParamsError

# Balanced-bridge peak-to-peak residual reached by tuning the two resonators (40 mV).
DEFAULT_RESIDUAL_IMBALANCE = 0.040
# Envelope detector output range of the hardware, V.
ENVELOPE_RANGE = (0.1, 0.5)


@dataclass(frozen=True)
class FrontendParams(AsDictMixin):
    """
    Behavioral model of the bridge receiver.

    The bridge is described by what can be measured at its output instead of by component values: a
    resonance curve (``quality_factor``) and an overall gain (``amp_gain``) subsume R1, R2, C11..C22 and L0.
    (``quality_factor``, ``fill_factor``) cannot be identified separately from the output; ``calibrate`` fixes
    the gain against a measured amplitude instead.

    Parameters
    ----------
    chi_m : float
        Volume susceptibility per mg/mL of iron. Default 8.78e-3.
    fill_factor : float
        Fraction η of the coil flux volume filled by the sample, in (0, 1]. Default 0.05.
    f_drive : float
        Drive frequency, Hz. The resonators are tuned to it. Default 10 MHz.
    quality_factor : float
        Resonator quality factor Q. Default 100.
    drive_amplitude : float
        Peak-to-peak drive voltage, V. Default 15.
    amp_gain : float
        Differential gain G of the instrumentation amplifier. The default 1 / residual_imbalance is the
        hardware tuning step (balanced output of 1 V peak-to-peak); experiments recalibrate it.
    residual_imbalance : float
        Peak-to-peak difference voltage left after balancing the bridge, V. Default 0.040.
    envelope_baseline : float
        DC offset of the envelope detector, V, within [0.1, 0.5]. Default 0.1.
    noise_sigma : float
        Standard deviation of the additive output noise per simulation grid point, V. 0 disables noise.
        Default 0.015.
    adc_bits : int
        Converter resolution. Default 11.
    adc_range : float
        Converter input span [0, adc_range), V. Default 1.0.

    """

    chi_m: float = 8.78e-3
    fill_factor: float = 0.05
    f_drive: float = 10e6
    quality_factor: float = 100.0
    drive_amplitude: float = 15.0
    amp_gain: float = 1.0 / DEFAULT_RESIDUAL_IMBALANCE
    residual_imbalance: float = DEFAULT_RESIDUAL_IMBALANCE
    envelope_baseline: float = 0.1
    noise_sigma: float = 0.015
    adc_bits: int = 11
    adc_range: float = 1.0

    def __post_init__(self):
        for name in ("chi_m", "f_drive", "quality_factor", "drive_amplitude", "amp_gain", "adc_range"):
            value = getattr(self, name)
            if not (value > 0):
                raise InvalidParamsError(f"FrontendParams.{name} must be strictly positive, got {value}")
        if not (0 < self.fill_factor <= 1):
            raise InvalidParamsError(f"fill_factor must be in (0, 1], got {self.fill_factor}")
        if not (self.residual_imbalance >= 0):
            raise InvalidParamsError(f"residual_imbalance must be >= 0, got {self.residual_imbalance}")
        if not (self.noise_sigma >= 0):
            raise InvalidParamsError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        low, high = ENVELOPE_RANGE
        if not (low <= self.envelope_baseline <= high):
            raise InvalidParamsError(f"envelope_baseline must be in [{low}, {high}], got {self.envelope_baseline}")
        if int(self.adc_bits) != self.adc_bits or self.adc_bits < 1:
            raise InvalidParamsError(f"adc_bits must be an integer >= 1, got {self.adc_bits}")

    @property
    def adc_levels(self) -> int:
        return 2 ** int(self.adc_bits)

    @property
    def adc_step(self) -> float:
        return self.adc_range / self.adc_levels

    @property
    def noise_enabled(self) -> bool:
        return self.noise_sigma > 0

    def replace(self, **changes: Any) -> "FrontendParams":
        return dataclasses.replace(self, **changes)

    def without_noise(self) -> "FrontendParams":
        return self.replace(noise_sigma=0.0)
