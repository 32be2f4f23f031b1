from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping
from typing import Optional
from typing import Union

import numpy as np
import pandas as pd

from spion_mc_testbed.errors import InvalidParamsError
from spion_mc_testbed.errors import TraceFormatError

TIME_COLUMN = "time_s"
LANE_COLUMN = "lane"


class TraceUnit(Enum):
    """
    - CONCENTRATION - iron concentration, mg/mL (column ``concentration_mg_per_ml``),
    - VOLTAGE - receiver output, V (column ``voltage_v``).
    """

    CONCENTRATION = "concentration_mg_per_ml"
    VOLTAGE = "voltage_v"

    @property
    def column(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class Trace:
    """
    Uniformly sampled time series.

    Sample ``i`` is stamped ``start_time + i / sample_rate``. ``values`` is stored as a read-only float64 array.
    ``clipped_samples`` is non-zero only for ADC output that hit the converter range edges.
    """

    start_time: float
    sample_rate: float
    values: np.ndarray
    unit: TraceUnit
    clipped_samples: int = 0

    def __post_init__(self):
        if not (self.sample_rate > 0):
            raise InvalidParamsError(f"sample_rate must be strictly positive, got {self.sample_rate}")
        values = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.values.size) / self.sample_rate

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def end_time(self) -> float:
        """Exclusive end: time stamp the sample after the last one would carry."""
        return self.start_time + self.values.size / self.sample_rate

    def with_values(self, values: np.ndarray, clipped_samples: int = 0) -> "Trace":
        return Trace(self.start_time, self.sample_rate, values, self.unit, clipped_samples)

    def same_grid(self, other: "Trace") -> bool:
        return (
            self.values.size == other.values.size
            and self.sample_rate == other.sample_rate
            and self.start_time == other.start_time
        )

    def to_frame(self, lane: Optional[int] = None) -> pd.DataFrame:
        frame = pd.DataFrame({TIME_COLUMN: self.times, self.unit.column: self.values})
        if lane is not None:
            frame[LANE_COLUMN] = lane
        return frame

    def to_csv(self, path: Union[str, Path], lane: Optional[int] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame(lane).to_csv(path, index=False, float_format="%.17g")
        return path


def write_lanes_csv(traces: Mapping[int, Trace], path: Union[str, Path]) -> Path:
    """Writes several lanes of the same quantity into one long-format CSV with a ``lane`` column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.concat([trace.to_frame(lane) for lane, trace in sorted(traces.items())], ignore_index=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def _recover_sample_rate(times: np.ndarray) -> float:
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise TraceFormatError("time column must be strictly increasing")
    rate = (times.size - 1) / (times[-1] - times[0])
    if not np.allclose(steps, 1.0 / rate, rtol=1e-3, atol=0.0):
        raise TraceFormatError("time column is not uniformly sampled")
    # round off the digits lost by printing the time stamps
    return float(f"{rate:.9g}")


def read_trace_csv(path: Union[str, Path], lane: Optional[int] = None) -> Trace:
    """
    Reads a trace written by ``Trace.to_csv`` or a testbed recording with the same header.

    Parameters
    ----------
    path : Union[str, Path]
        CSV file with ``time_s`` and one of ``voltage_v`` / ``concentration_mg_per_ml``.
    lane : Optional[int]
        Lane to select when the file has a ``lane`` column. Defaults to the lowest lane present.

    Returns
    -------
    Trace
        Trace with sample rate recovered from the time column.

    """
    frame = pd.read_csv(path, float_precision="round_trip")
    frame.columns = [str(c).strip() for c in frame.columns]
    units = [unit for unit in TraceUnit if unit.column in frame.columns]
    if TIME_COLUMN not in frame.columns or len(units) != 1:
        raise TraceFormatError(
            f"{path}: expected columns '{TIME_COLUMN}' and one of "
            f"{[u.column for u in TraceUnit]}, got {list(frame.columns)}"
        )
    unit = units[0]

    if LANE_COLUMN in frame.columns:
        selected = int(frame[LANE_COLUMN].min()) if lane is None else lane
        frame = frame[frame[LANE_COLUMN] == selected]
    if len(frame) < 2:
        raise TraceFormatError(f"{path}: at least two samples are required")

    times = frame[TIME_COLUMN].to_numpy(dtype=np.float64)
    values = frame[unit.column].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise TraceFormatError(f"{path}: non-finite sample values")

    return Trace(start_time=float(times[0]), sample_rate=_recover_sample_rate(times), values=values, unit=unit)
