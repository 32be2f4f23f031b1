import numpy as np
import pytest

from spion_mc_testbed.core.trace import Trace
from spion_mc_testbed.core.trace import TraceUnit
from spion_mc_testbed.core.trace import read_trace_csv
from spion_mc_testbed.core.trace import write_lanes_csv
from spion_mc_testbed.errors import InvalidParamsError
from spion_mc_testbed.errors import TraceFormatError


def _voltage_trace(n=300, start=-1.0, rate=100.0, seed=0):
    step = 1.0 / 2048
    codes = np.random.default_rng(seed).integers(100, 900, size=n)
    return Trace(start_time=start, sample_rate=rate, values=codes * step, unit=TraceUnit.VOLTAGE)


class TestTrace:
    """Uniform time grid and immutability."""

    def test_times(self):
        trace = Trace(start_time=-1.0, sample_rate=100.0, values=np.zeros(5), unit=TraceUnit.VOLTAGE)
        np.testing.assert_allclose(trace.times, [-1.0, -0.99, -0.98, -0.97, -0.96])
        assert trace.end_time == pytest.approx(-0.95)
        assert trace.dt == pytest.approx(0.01)
        assert len(trace) == 5

    def test_values_read_only(self):
        trace = Trace(start_time=0.0, sample_rate=10.0, values=[1.0, 2.0], unit=TraceUnit.VOLTAGE)
        with pytest.raises(ValueError):
            trace.values[0] = 5.0

    def test_input_is_copied(self):
        source = np.array([1.0, 2.0])
        trace = Trace(start_time=0.0, sample_rate=10.0, values=source, unit=TraceUnit.VOLTAGE)
        source[0] = 7.0
        assert trace.values[0] == 1.0

    def test_invalid_rate(self):
        with pytest.raises(InvalidParamsError):
            Trace(start_time=0.0, sample_rate=0.0, values=[1.0], unit=TraceUnit.VOLTAGE)

    def test_same_grid(self):
        trace = _voltage_trace()
        assert trace.same_grid(trace.with_values(trace.values * 2))
        assert not trace.same_grid(_voltage_trace(start=0.0))


class TestCsv:
    """CSV export and ingestion."""

    def test_round_trip_is_lossless(self, tmp_path):
        """Quantized values and the time grid survive a write/read cycle exactly."""
        trace = _voltage_trace()
        loaded = read_trace_csv(trace.to_csv(tmp_path / "voltage.csv"))
        np.testing.assert_array_equal(loaded.values, trace.values)
        assert loaded.sample_rate == 100.0
        assert loaded.start_time == trace.start_time
        assert loaded.unit is TraceUnit.VOLTAGE

    def test_arbitrary_floats_are_lossless(self, tmp_path):
        """Concentration values use every mantissa bit and still read back exactly."""
        values = np.random.default_rng(1).lognormal(-3.0, 2.0, size=2000)
        trace = Trace(start_time=-1.0045, sample_rate=1000.0, values=values, unit=TraceUnit.CONCENTRATION)
        loaded = read_trace_csv(trace.to_csv(tmp_path / "concentration.csv"))
        np.testing.assert_array_equal(loaded.values, values)
        assert loaded.start_time == trace.start_time

    def test_header(self, tmp_path):
        path = _voltage_trace(n=3).to_csv(tmp_path / "v.csv")
        assert path.read_text().splitlines()[0] == "time_s,voltage_v"

    def test_lanes(self, tmp_path):
        lanes = {
            0: Trace(start_time=0.0, sample_rate=1000.0, values=np.arange(10.0), unit=TraceUnit.CONCENTRATION),
            1: Trace(start_time=0.0, sample_rate=1000.0, values=np.zeros(10), unit=TraceUnit.CONCENTRATION),
        }
        path = write_lanes_csv(lanes, tmp_path / "c.csv")
        assert path.read_text().splitlines()[0] == "time_s,concentration_mg_per_ml,lane"
        np.testing.assert_array_equal(read_trace_csv(path).values, np.arange(10.0))
        np.testing.assert_array_equal(read_trace_csv(path, lane=1).values, np.zeros(10))
        assert read_trace_csv(path).sample_rate == 1000.0

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,v\n0,1\n0.01,2\n")
        with pytest.raises(TraceFormatError):
            read_trace_csv(path)

    def test_non_uniform(self, tmp_path):
        path = tmp_path / "gap.csv"
        path.write_text("time_s,voltage_v\n0,0.1\n0.01,0.1\n0.05,0.1\n0.06,0.1\n")
        with pytest.raises(TraceFormatError):
            read_trace_csv(path)

    def test_too_short(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("time_s,voltage_v\n0,0.1\n")
        with pytest.raises(TraceFormatError):
            read_trace_csv(path)
