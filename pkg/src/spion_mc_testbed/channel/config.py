import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from spion_mc_testbed.core.config import AsDictMixin
from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.core.kinematics import coil_length_cm
from spion_mc_testbed.core.kinematics import mean_velocity
from spion_mc_testbed.errors import InvalidParamsError


class ImpulseModel(Enum):
    """
    - LAMINAR_RTD - residence-time distribution of pure Poiseuille advection, ∝ 1/t² after the first arrival at
      L/(2·v̄), truncated by an exponential clearance factor,
    - GAMMA - two-parameter gamma density with mean equal to the transit time L/v̄.
    """

    LAMINAR_RTD = "laminar-rtd"
    GAMMA = "gamma"


def default_dilution_factor(config: TestbedConfig) -> float:
    # 1:1 mixing with the background flow at the Y-connector
    return 0.5 if config.additive_injection_flow else 1.0


@dataclass(frozen=True)
class ChannelParams(AsDictMixin):
    """
    Parameters of the propagation channel model.

    Parameters
    ----------
    mean_velocity : float
        Mean axial velocity, cm/s (derived from the testbed config).
    channel_length : float
        Y-connector to coil distance, cm.
    coil_length : float
        Coil axial length, cm.
    impulse_model : ImpulseModel
        Shape of the channel impulse response. Default LAMINAR_RTD.
    clearance_time_constant : float
        τ_c of the exponential washout truncating the 1/t² tail, s. ``math.inf`` disables it. Default 3.
    dilution_factor : float
        Fraction of the stock concentration the slug keeps after the Y-connector, in (0, 1].
    gamma_shape : float
        Shape parameter of the GAMMA model. Default 2.

    """

    mean_velocity: float
    channel_length: float
    coil_length: float
    impulse_model: ImpulseModel = ImpulseModel.LAMINAR_RTD
    clearance_time_constant: float = 3.0
    dilution_factor: float = 1.0
    gamma_shape: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "impulse_model", ImpulseModel(self.impulse_model))
        for name in ("mean_velocity", "channel_length", "coil_length", "clearance_time_constant", "gamma_shape"):
            value = getattr(self, name)
            if not (value > 0) or math.isnan(value):
                raise InvalidParamsError(f"ChannelParams.{name} must be strictly positive, got {value}")
        if not (0 < self.dilution_factor <= 1):
            raise InvalidParamsError(f"dilution_factor must be in (0, 1], got {self.dilution_factor}")
        if not (self.first_arrival_time > 0) or math.isinf(self.first_arrival_time):
            raise InvalidParamsError(f"first arrival time must be finite and positive, got {self.first_arrival_time}")

    @classmethod
    def from_config(
        cls,
        config: TestbedConfig,
        impulse_model: ImpulseModel = ImpulseModel.LAMINAR_RTD,
        clearance_time_constant: float = 3.0,
        dilution_factor: Optional[float] = None,
        gamma_shape: float = 2.0,
    ) -> "ChannelParams":
        return cls(
            mean_velocity=mean_velocity(config),
            channel_length=config.channel_length,
            coil_length=coil_length_cm(config),
            impulse_model=ImpulseModel(impulse_model),
            clearance_time_constant=clearance_time_constant,
            dilution_factor=default_dilution_factor(config) if dilution_factor is None else dilution_factor,
            gamma_shape=gamma_shape,
        )

    @property
    def first_arrival_time(self) -> float:
        """t_min: the channel-axis fluid moves at twice the mean velocity in laminar flow."""
        return self.channel_length / (2.0 * self.mean_velocity)

    @property
    def transit_time(self) -> float:
        return self.channel_length / self.mean_velocity

    @property
    def coil_window(self) -> float:
        """Seconds a particle front needs to traverse the coil at mean velocity."""
        return self.coil_length / self.mean_velocity
