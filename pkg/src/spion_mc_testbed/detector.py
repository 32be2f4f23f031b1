"""
Receiver DSP for the on-off keyed SPION signal.

The pipeline follows the offline procedure used on the testbed recordings:

1. moving average with a width of 21 samples,
2. threshold = mean of the highest and lowest filtered value,
3. rising edges = threshold crossings with positive slope; the first one (t0) synchronises the receiver,
4. symbol intervals I_k = [t0 + k·T_S, t0 + (k+1)·T_S), sliced on the sample grid,
5. bit k is "1" if at least 30 % of the filtered samples in I_k exceed the threshold.

Before synchronising, the filtered swing is compared with the noise floor estimated from the raw trace; a
recording whose swing does not clear it carries no detectable transmission.
"""
import logging
import math
from dataclasses import dataclass
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from spion_mc_testbed.core.common import BitSequence
from spion_mc_testbed.core.trace import Trace
from spion_mc_testbed.errors import DegenerateSignalError
from spion_mc_testbed.errors import DetectorParameterError
from spion_mc_testbed.errors import ShapeError
from spion_mc_testbed.errors import SyncFailureError
from spion_mc_testbed.errors import TraceTooShortError

_LOGGER = logging.getLogger(__name__)

DEFAULT_FILTER_WIDTH = 21
DEFAULT_OCCUPANCY = 0.30
DEFAULT_MIN_SWING_SNR = 11.0

# scale of the median absolute deviation to a Gaussian standard deviation
_MAD_TO_SIGMA = 1.482602218505602
_TIME_EPS = 1e-9

Interval = Tuple[float, float]


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """
    Outcome of ``detect_bits``.

    ``occupancy[k]`` is the fraction of samples of ``symbol_intervals[k]`` above ``threshold``;
    ``peak_amplitudes[k]`` is the filtered maximum in the interval minus the filtered minimum of the whole trace.
    """

    threshold: float
    t0: float
    symbol_intervals: List[Interval]
    occupancy: List[float]
    bits: BitSequence
    edges: List[float]
    peak_amplitudes: List[float]
    filtered: Trace
    noise_floor: float


def moving_average(trace: Trace, width: int) -> Trace:
    """
    Centred moving average.

    Near the ends the window is truncated to the available samples and the divisor shrinks with it, so constant
    segments (baselines in particular) pass through unchanged.

    Parameters
    ----------
    trace : Trace
        Input trace.
    width : int
        Odd window width in samples, 1 <= width <= len(trace).

    Returns
    -------
    Trace
        Filtered trace on the same time grid.

    """
    if int(width) != width or width < 1 or width % 2 == 0:
        raise DetectorParameterError(f"filter width must be an odd positive integer, got {width}")
    if width > len(trace):
        raise DetectorParameterError(f"filter width {width} exceeds the trace length {len(trace)}")

    values = trace.values
    half = int(width) // 2
    windows = sliding_window_view(np.pad(values, half, constant_values=np.nan), int(width))
    # averaging deviations from the centre sample keeps constants exact
    return trace.with_values(values + np.nanmean(windows - values[:, None], axis=1))


def compute_threshold(trace: Trace) -> float:
    """Decision threshold (max + min) / 2 over the whole trace."""
    if len(trace) == 0:
        raise ShapeError("cannot compute a threshold of an empty trace")
    return float((trace.values.max() + trace.values.min()) / 2.0)


def detect_rising_edges(filtered: Trace, threshold: float) -> List[float]:
    """Time stamps of samples i with value[i-1] < threshold <= value[i]."""
    values = filtered.values
    crossings = np.flatnonzero((values[:-1] < threshold) & (values[1:] >= threshold)) + 1
    return [float(t) for t in filtered.times[crossings]]


def estimate_noise_sigma(trace: Trace) -> float:
    """Robust per-sample noise standard deviation from the median absolute deviation of first differences."""
    if len(trace) < 3:
        return 0.0
    steps = np.diff(trace.values)
    mad = np.median(np.abs(steps - np.median(steps)))
    return float(_MAD_TO_SIGMA * mad / math.sqrt(2.0))


def symbol_slices(trace: Trace, intervals: Sequence[Interval]) -> List[slice]:
    """
    Sample index ranges of ``intervals`` on the grid of ``trace``.

    Boundaries are rounded to the nearest sample index, so intervals of equal duration always hold the same number
    of samples regardless of how their time stamps round. Ranges are clipped to the trace.
    """
    slices = []
    for start, end in intervals:
        first = int(np.clip(round((start - trace.start_time) * trace.sample_rate), 0, len(trace)))
        stop = int(np.clip(round((end - trace.start_time) * trace.sample_rate), first, len(trace)))
        slices.append(slice(first, stop))
    return slices


def peak_amplitudes(filtered: Trace, intervals: Sequence[Interval]) -> List[float]:
    """Per interval: filtered maximum inside the interval minus the filtered minimum of the trace."""
    if len(filtered) == 0:
        return [0.0 for _ in intervals]
    baseline = filtered.values.min()
    amplitudes = []
    for span in symbol_slices(filtered, intervals):
        inside = filtered.values[span]
        amplitudes.append(float(inside.max() - baseline) if inside.size else 0.0)
    return amplitudes


def _count_symbols(t0: float, end: float, symbol_duration: float, expected_symbols: Optional[int]) -> int:
    if expected_symbols is not None:
        if expected_symbols < 1:
            raise DetectorParameterError(f"expected_symbols must be >= 1, got {expected_symbols}")
        if t0 + expected_symbols * symbol_duration > end + _TIME_EPS:
            raise TraceTooShortError(
                f"{expected_symbols} symbols from t0={t0:.3f} s need the trace to last until "
                f"{t0 + expected_symbols * symbol_duration:.3f} s, it ends at {end:.3f} s"
            )
        return int(expected_symbols)

    n_symbols = int(math.floor((end - t0) / symbol_duration + _TIME_EPS))
    if n_symbols < 1:
        raise TraceTooShortError(f"trace ends {end - t0:.3f} s after t0, less than one symbol")
    return n_symbols


def detect_bits(
    trace: Trace,
    symbol_duration: float,
    filter_width: int = DEFAULT_FILTER_WIDTH,
    expected_symbols: Optional[int] = None,
    occupancy_threshold: float = DEFAULT_OCCUPANCY,
    min_swing_snr: float = DEFAULT_MIN_SWING_SNR,
) -> DetectionResult:
    """
    Decodes an on-off keyed voltage trace.

    Parameters
    ----------
    trace : Trace
        Raw receiver output (simulated or a testbed recording).
    symbol_duration : float
        T_S, s.
    filter_width : int
        Moving average width in samples. Default 21.
    expected_symbols : Optional[int]
        Number of symbols to slice. If omitted, every complete interval before the trace end is sliced.
    occupancy_threshold : float
        Minimum fraction of above-threshold samples for a "1" (inclusive). Default 0.30.
    min_swing_snr : float
        Required ratio of filtered swing to filtered noise standard deviation; 0 disables the check. Default 11.

    Returns
    -------
    DetectionResult
        Threshold, synchronisation time, intervals, occupancy, bits, edges and peak amplitudes.

    """
    if not (symbol_duration > 0):
        raise DetectorParameterError(f"symbol_duration must be > 0, got {symbol_duration}")
    if len(trace) == 0:
        raise ShapeError("cannot detect bits in an empty trace")

    filtered = moving_average(trace, filter_width)
    low, high = float(filtered.values.min()), float(filtered.values.max())
    if high == low:
        raise DegenerateSignalError(f"filtered trace is constant at {high:g}, no transmission to detect")

    noise_floor = min_swing_snr * estimate_noise_sigma(trace) / math.sqrt(filter_width)
    if high - low < noise_floor:
        raise SyncFailureError(
            f"signal swing {high - low:.4g} is below the noise floor {noise_floor:.4g}, no rising edge can be trusted"
        )

    threshold = compute_threshold(filtered)
    edges = detect_rising_edges(filtered, threshold)
    if not edges:
        raise SyncFailureError(f"no rising edge through the threshold {threshold:.4g}")

    t0 = edges[0]
    n_symbols = _count_symbols(t0, filtered.end_time, symbol_duration, expected_symbols)

    intervals = [(t0 + k * symbol_duration, t0 + (k + 1) * symbol_duration) for k in range(n_symbols)]
    above = filtered.values > threshold
    occupancy = []
    for span in symbol_slices(filtered, intervals):
        count = span.stop - span.start
        occupancy.append(int(np.count_nonzero(above[span])) / count if count else 0.0)

    bits = tuple(1 if fraction >= occupancy_threshold else 0 for fraction in occupancy)
    _LOGGER.debug(f"threshold {threshold:.4f}, t0 {t0:.3f} s, {len(edges)} edges, {n_symbols} symbols")

    return DetectionResult(
        threshold=threshold,
        t0=t0,
        symbol_intervals=intervals,
        occupancy=occupancy,
        bits=bits,
        edges=edges,
        peak_amplitudes=peak_amplitudes(filtered, intervals),
        filtered=filtered,
        noise_floor=noise_floor,
    )
