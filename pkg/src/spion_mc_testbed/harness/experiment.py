"""End-to-end loopback experiments: bits → injections → channel → receiver → detector → bit errors."""
import logging
import multiprocessing
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from spion_mc_testbed.channel.config import ChannelParams
from spion_mc_testbed.channel.simulator import common_mode_injections
from spion_mc_testbed.channel.simulator import schedule_injections
from spion_mc_testbed.channel.simulator import simulate_concentration
from spion_mc_testbed.channel.simulator import simulation_duration
from spion_mc_testbed.core.common import BitSequence
from spion_mc_testbed.core.common import format_bits
from spion_mc_testbed.core.common import hamming_distance
from spion_mc_testbed.core.common import make_rng
from spion_mc_testbed.core.common import validate_transmission_bits
from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.core.trace import Trace
from spion_mc_testbed.detector import DEFAULT_FILTER_WIDTH
from spion_mc_testbed.detector import DetectionResult
from spion_mc_testbed.detector import detect_bits
from spion_mc_testbed.detector import moving_average
from spion_mc_testbed.detector import peak_amplitudes
from spion_mc_testbed.errors import SyncFailureError
from spion_mc_testbed.frontend.bridge import bridge_output
from spion_mc_testbed.frontend.calibration import calibrate
from spion_mc_testbed.frontend.config import FrontendParams
from spion_mc_testbed.harness.sequences import CALIBRATION_REFERENCE_CONCENTRATION
from spion_mc_testbed.harness.sequences import CALIBRATION_TARGET_PEAK
from spion_mc_testbed.harness.sequences import DILUTION_SERIES
from spion_mc_testbed.harness.sequences import SENSITIVITY_BITS
from spion_mc_testbed.harness.settings import Settings

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """
    Result of one loopback transmission.

    When the receiver cannot synchronise, every symbol counts as erased: ``decoded`` is all zeros and the BER is
    computed against it.
    """

    config: Dict[str, Any]
    transmitted: BitSequence
    decoded: BitSequence
    bit_errors: int
    synchronized: bool
    occupancy: List[float]
    peak_amplitudes: List[float]
    clipped_samples: int
    threshold: Optional[float] = None
    t0: Optional[float] = None
    traces: Dict[str, Trace] = field(default_factory=dict)

    @property
    def ber(self) -> float:
        return self.bit_errors / len(self.transmitted)

    @property
    def checks(self) -> Dict[str, bool]:
        return {"zero_ber": self.bit_errors == 0, "no_clipping": self.clipped_samples == 0}

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def mean_one_amplitude(self) -> float:
        """Mean peak amplitude over the intervals that carried a "1"."""
        ones = [a for a, bit in zip(self.peak_amplitudes, self.transmitted) if bit == 1]
        return float(np.mean(ones)) if ones else 0.0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "transmitted": format_bits(self.transmitted),
            "decoded": format_bits(self.decoded),
            "bit_errors": self.bit_errors,
            "ber": self.ber,
            "synchronized": self.synchronized,
            "threshold": self.threshold,
            "t0": self.t0,
            "occupancy": self.occupancy,
            "peak_amplitudes": self.peak_amplitudes,
            "clipped_samples": self.clipped_samples,
            "checks": self.checks,
        }

    def summary(self) -> str:
        lines = [
            f"transmitted : {format_bits(self.transmitted, 6)}",
            f"decoded     : {format_bits(self.decoded, 6)}",
            f"bit errors  : {self.bit_errors} / {len(self.transmitted)} (BER {self.ber:.2%})",
            f"synchronized: {self.synchronized}"
            + (f" (t0 = {self.t0:.3f} s, threshold = {self.threshold:.4f} V)" if self.synchronized else ""),
            f"mean '1' amplitude: {self.mean_one_amplitude:.4f} V",
        ]
        lines += [f"check {name:<12}: {'PASS' if ok else 'FAIL'}" for name, ok in self.checks.items()]
        return "\n".join(lines)


@dataclass(frozen=True)
class SweepRow:
    concentration: float
    detected: bool
    mean_peak_amplitude: float
    bit_errors: int
    clipped_samples: int


def random_bits(n: int, seed: int) -> BitSequence:
    """Seeded uniform bits with the first one forced to "1" for synchronisation."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of bits must be a positive integer, got {n}")
    bits = make_rng(seed).integers(0, 2, size=int(n))
    bits[0] = 1
    return tuple(int(b) for b in bits)


def _nominal_intervals(n_symbols: int, symbol_duration: float):
    return [(k * symbol_duration, (k + 1) * symbol_duration) for k in range(n_symbols)]


def run_end_to_end(
    bits: Sequence[int],
    config: TestbedConfig,
    channel_params: ChannelParams,
    frontend_params: FrontendParams,
    run_index: int = 0,
    include_traces: bool = False,
    common_mode_bits: Optional[Sequence[int]] = None,
) -> ExperimentReport:
    """
    Transmits ``bits`` through the simulated testbed and decodes them.

    Parameters
    ----------
    bits : Sequence[int]
        Bits to send, starting with "1".
    config : TestbedConfig
        Testbed configuration; ``rng_seed`` together with ``run_index`` selects the noise stream.
    channel_params : ChannelParams
        Channel model.
    frontend_params : FrontendParams
        Receiver model (usually calibrated).
    run_index : int
        Index of the run within a batch, giving each run its own noise stream.
    include_traces : bool
        Keep the concentration, voltage and filtered traces in the report.
    common_mode_bits : Optional[Sequence[int]]
        Extra releases injected into both tubes at once (a disturbance the bridge should reject).

    Returns
    -------
    ExperimentReport
        Decoded bits, bit errors, occupancy and amplitudes.

    """
    bits = validate_transmission_bits(bits)
    events = schedule_injections(bits, config, dilution_factor=channel_params.dilution_factor)
    if common_mode_bits is not None:
        events += common_mode_injections(common_mode_bits, config, dilution_factor=channel_params.dilution_factor)

    n_symbols = max(len(bits), len(common_mode_bits or ()))
    lanes = simulate_concentration(events, channel_params, config, simulation_duration(n_symbols, config))
    rng = make_rng(config.rng_seed, run_index)
    voltage = bridge_output(lanes[0], lanes[1], frontend_params, rng, config.sample_rate)

    detection: Optional[DetectionResult] = None
    try:
        detection = detect_bits(voltage, config.symbol_duration, expected_symbols=len(bits))
    except SyncFailureError as exc:
        _LOGGER.warning(f"run {run_index}: receiver did not synchronise ({exc}), all symbols erased")

    if detection is not None:
        decoded, filtered = detection.bits, detection.filtered
        amplitudes = detection.peak_amplitudes
    else:
        decoded = tuple(0 for _ in bits)
        filtered = moving_average(voltage, DEFAULT_FILTER_WIDTH)
        amplitudes = peak_amplitudes(filtered, _nominal_intervals(len(bits), config.symbol_duration))

    traces = {}
    if include_traces:
        traces = {"concentration_0": lanes[0], "concentration_1": lanes[1], "voltage": voltage, "filtered": filtered}

    return ExperimentReport(
        config=config.as_dict(),
        transmitted=bits,
        decoded=decoded,
        bit_errors=hamming_distance(bits, decoded),
        synchronized=detection is not None,
        occupancy=list(detection.occupancy) if detection else [],
        peak_amplitudes=amplitudes,
        clipped_samples=voltage.clipped_samples,
        threshold=detection.threshold if detection else None,
        t0=detection.t0 if detection else None,
        traces=traces,
    )


def _sweep_row(task) -> SweepRow:
    row_index, concentration, bits, config, channel_params, frontend_params = task
    report = run_end_to_end(
        bits,
        config.replace(stock_concentration=concentration),
        channel_params,
        frontend_params,
        run_index=row_index,
    )
    row = SweepRow(
        concentration=concentration,
        detected=report.synchronized and report.bit_errors == 0,
        mean_peak_amplitude=report.mean_one_amplitude,
        bit_errors=report.bit_errors,
        clipped_samples=report.clipped_samples,
    )
    _LOGGER.info(f"sweep row {row_index}: {row}")
    return row


def sensitivity_sweep(
    concentrations: Sequence[float] = DILUTION_SERIES,
    bits: Sequence[int] = SENSITIVITY_BITS,
    config: Optional[TestbedConfig] = None,
    channel_params: Optional[ChannelParams] = None,
    frontend_params: Optional[FrontendParams] = None,
    workers: int = 1,
) -> List[SweepRow]:
    """
    Dilution series: one loopback run of ``bits`` per stock concentration.

    Row ``i`` uses noise stream ``(rng_seed, i)``, so rows are independent and may run in parallel processes.
    """
    if any(not (c > 0) for c in concentrations):
        raise ValueError(f"concentrations must be positive, got {list(concentrations)}")

    config = config or TestbedConfig()
    channel_params = channel_params or ChannelParams.from_config(config)
    frontend_params = frontend_params or FrontendParams()
    tasks = [(i, float(c), tuple(bits), config, channel_params, frontend_params) for i, c in enumerate(concentrations)]

    if workers > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            return pool.map(_sweep_row, tasks)
    return [_sweep_row(task) for task in tasks]


def amplitudes_increasing(rows: Sequence[SweepRow]) -> bool:
    ordered = sorted(rows, key=lambda row: row.concentration)
    return all(a.mean_peak_amplitude < b.mean_peak_amplitude for a, b in zip(ordered, ordered[1:]))


def detection_limit(rows: Sequence[SweepRow]) -> Optional[float]:
    """Lowest concentration at which the pattern was decoded without errors."""
    detected = [row.concentration for row in rows if row.detected]
    return min(detected) if detected else None


class ExperimentRunner:
    """
    Binds one set of settings to the experiment functions.

    Parameters
    ----------
    settings : Settings
        Testbed, channel and receiver settings.
    calibrate_frontend : bool
        If True, the receiver gain is calibrated to 0.3 V at 10 mg/mL before any run. Default True.

    """

    def __init__(self, settings: Settings, calibrate_frontend: bool = True):
        self.settings = settings
        self.config = settings.testbed
        self.channel_params = settings.channel
        self.frontend_params = settings.frontend
        if calibrate_frontend:
            self.frontend_params = self.calibrate()

    def calibrate(
        self,
        target_peak: float = CALIBRATION_TARGET_PEAK,
        reference_concentration: float = CALIBRATION_REFERENCE_CONCENTRATION,
        **kwargs,
    ) -> FrontendParams:
        return calibrate(
            self.frontend_params,
            self.config,
            target_peak,
            reference_concentration,
            channel_params=self.channel_params,
            **kwargs,
        )

    def snapshot(self) -> Dict[str, Any]:
        snapshot = self.settings.snapshot()
        snapshot["frontend"] = self.frontend_params.as_dict()
        return snapshot

    def run_end_to_end(self, bits: Sequence[int], **kwargs) -> ExperimentReport:
        return run_end_to_end(bits, self.config, self.channel_params, self.frontend_params, **kwargs)

    def sensitivity_sweep(self, concentrations: Sequence[float] = DILUTION_SERIES, **kwargs) -> List[SweepRow]:
        return sensitivity_sweep(
            concentrations,
            config=self.config,
            channel_params=self.channel_params,
            frontend_params=self.frontend_params,
            **kwargs,
        )
