import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np

from spion_mc_testbed.channel.config import ChannelParams
from spion_mc_testbed.channel.config import default_dilution_factor
from spion_mc_testbed.channel.impulse import step_response
from spion_mc_testbed.core.common import as_bits
from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.core.kinematics import injection_duration
from spion_mc_testbed.core.trace import Trace
from spion_mc_testbed.core.trace import TraceUnit
from spion_mc_testbed.core.trace import write_lanes_csv
from spion_mc_testbed.errors import InvalidConfigError
from spion_mc_testbed.errors import InvalidParamsError
from spion_mc_testbed.errors import ResolutionError

_LOGGER = logging.getLogger(__name__)

LANES = (0, 1)
MIN_POINTS_PER_INJECTION = 4


@dataclass(frozen=True)
class InjectionEvent:
    """One particle release: ``duration`` seconds of suspension at ``slug_concentration`` into ``lane``."""

    start_time: float
    duration: float
    slug_concentration: float
    lane: int = 0

    def __post_init__(self):
        if not (self.start_time >= 0):
            raise InvalidParamsError(f"start_time must be >= 0, got {self.start_time}")
        if not (self.duration > 0):
            raise InvalidParamsError(f"duration must be > 0, got {self.duration}")
        if not (self.slug_concentration >= 0):
            raise InvalidParamsError(f"slug_concentration must be >= 0, got {self.slug_concentration}")
        if self.lane not in LANES:
            raise InvalidParamsError(f"lane must be one of {LANES}, got {self.lane}")


def schedule_injections(
    bits: Sequence[int],
    config: TestbedConfig,
    dilution_factor: Optional[float] = None,
    lane: int = 0,
) -> List[InjectionEvent]:
    """
    On-off keying: one release per "1" bit at the start of its symbol, nothing for "0".

    Parameters
    ----------
    bits : Sequence[int]
        Non-empty bit sequence.
    config : TestbedConfig
        Testbed configuration (symbol duration, injection volume/flow, stock concentration).
    dilution_factor : Optional[float]
        Slug dilution at the Y-connector. Defaults to 0.5 with additive injection flow and 1.0 otherwise.
    lane : int
        Tube the releases go into (0 = measurement, 1 = reference).

    Returns
    -------
    List[InjectionEvent]
        Events ordered by start time.

    """
    bits = as_bits(bits)
    if not bits:
        raise ValueError("cannot schedule an empty bit sequence")

    duration = injection_duration(config)
    if not (duration > 0):
        raise InvalidConfigError("injection_volume is 0, a '1' bit would not release any particles")

    dilution = default_dilution_factor(config) if dilution_factor is None else dilution_factor
    slug = config.stock_concentration * dilution
    return [
        InjectionEvent(start_time=k * config.symbol_duration, duration=duration, slug_concentration=slug, lane=lane)
        for k, bit in enumerate(bits)
        if bit == 1
    ]


def common_mode_injections(
    bits: Sequence[int],
    config: TestbedConfig,
    dilution_factor: Optional[float] = None,
) -> List[InjectionEvent]:
    """Same releases into both tubes, i.e. a disturbance a balanced bridge should not see."""
    return [event for lane in LANES for event in schedule_injections(bits, config, dilution_factor, lane=lane)]


def simulation_duration(n_symbols: int, config: TestbedConfig) -> float:
    """Recording length for ``n_symbols`` symbols: lead-in, the symbols, and the washout tail."""
    return config.lead_time + n_symbols * config.symbol_duration + config.tail_time


def fine_grid(config: TestbedConfig, duration: float) -> np.ndarray:
    """
    Simulation grid at ``oversampling × sample_rate``.

    The grid is shifted by half a block so that block ``i`` of ``oversampling`` points is centred on the output
    sample time ``-lead_time + i / sample_rate``.
    """
    n_out = int(round(duration * config.sample_rate))
    if n_out < 1:
        raise ResolutionError(f"duration {duration} s is shorter than one output sample")
    dt = 1.0 / config.fine_sample_rate
    offset = (config.oversampling - 1) / 2.0 * dt
    return -config.lead_time - offset + np.arange(n_out * config.oversampling) * dt


def _trailing_window_mean(values: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return values
    # zero history before the grid start: no particles were in the coil
    return np.convolve(values, np.full(width, 1.0 / width))[: values.size]


def _release_response(params: ChannelParams, elapsed: np.ndarray, duration: float) -> np.ndarray:
    return step_response(params, elapsed) - step_response(params, elapsed - duration)


def _grid_shift(start_time: float, dt: float) -> Optional[int]:
    """Number of grid steps equal to ``start_time``, or None if it falls between grid points."""
    steps = start_time / dt
    shift = int(round(steps))
    return shift if abs(steps - shift) < 1e-6 else None


def simulate_concentration(
    events: Sequence[InjectionEvent],
    params: ChannelParams,
    config: TestbedConfig,
    duration: float,
) -> Dict[int, Trace]:
    """
    Concentration seen by each detector coil.

    Each release is a rectangular injection of length D, so its contribution is
    ``slug · (F(t - s) - F(t - s - D))`` with F the channel step response; contributions superpose.
    The result is then averaged over the trailing coil window (the particles currently inside the coil).

    Parameters
    ----------
    events : Sequence[InjectionEvent]
        Releases on lanes 0 and/or 1.
    params : ChannelParams
        Channel model.
    config : TestbedConfig
        Testbed configuration (grid rate, lead time).
    duration : float
        Recording length in seconds, starting at ``-config.lead_time``.

    Returns
    -------
    Dict[int, Trace]
        Fine-grid concentration traces (mg/mL) for lanes 0 and 1.

    """
    times = fine_grid(config, duration)
    dt = 1.0 / config.fine_sample_rate
    for event in events:
        if event.duration / dt < MIN_POINTS_PER_INJECTION:
            raise ResolutionError(
                f"grid step {dt:g} s resolves the {event.duration:g} s injection with fewer than "
                f"{MIN_POINTS_PER_INJECTION} points"
            )

    window = max(1, int(round(params.coil_window / dt)))
    _LOGGER.debug(
        f"simulating {len(events)} releases on {times.size} points, t_min={params.first_arrival_time:.4f} s, "
        f"coil window {window} points"
    )

    # releases starting on a grid point reuse one response evaluated on an extended grid
    shifts = [_grid_shift(event.start_time, dt) for event in events]
    max_shift = max([s for s in shifts if s is not None], default=0)
    kernels: Dict[float, np.ndarray] = {}

    traces = {}
    for lane in LANES:
        concentration = np.zeros_like(times)
        for event, shift in zip(events, shifts):
            if event.lane != lane:
                continue
            if shift is None:
                response = _release_response(params, times - event.start_time, event.duration)
            else:
                if event.duration not in kernels:
                    extended = times[0] + np.arange(-max_shift, times.size) * dt
                    kernels[event.duration] = _release_response(params, extended, event.duration)
                offset = max_shift - shift
                response = kernels[event.duration][offset : offset + times.size]
            concentration += event.slug_concentration * response

        concentration = np.maximum(_trailing_window_mean(concentration, window), 0.0)
        traces[lane] = Trace(
            start_time=float(times[0]),
            sample_rate=config.fine_sample_rate,
            values=concentration,
            unit=TraceUnit.CONCENTRATION,
        )

    return traces


def write_concentration_csv(traces: Dict[int, Trace], path: Union[str, Path]) -> Path:
    return write_lanes_csv(traces, path)
