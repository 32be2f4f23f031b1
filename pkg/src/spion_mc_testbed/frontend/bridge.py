"""
Receive chain: concentration → susceptibility → coil inductance shift → resonator detuning → bridge difference
voltage → instrumentation amplifier → envelope (DC level) → noise → DAQ sampling and quantization.
"""
import logging
from typing import Optional
from typing import Tuple

import numpy as np

from spion_mc_testbed.core.trace import Trace
from spion_mc_testbed.core.trace import TraceUnit
from spion_mc_testbed.errors import DomainError
from spion_mc_testbed.errors import ShapeError
from spion_mc_testbed.frontend.config import FrontendParams

_LOGGER = logging.getLogger(__name__)

_DEFAULT_PARAMS = FrontendParams()


def susceptibility(c, params: FrontendParams = _DEFAULT_PARAMS):
    """Volume susceptibility of the suspension, linear in concentration (8.78e-3 at 1 mg/mL)."""
    c = np.asarray(c, dtype=np.float64)
    if np.any(c < 0):
        raise DomainError("concentration must be >= 0")
    chi = params.chi_m * c
    return float(chi) if chi.ndim == 0 else chi


def inductance_shift(c, params: FrontendParams = _DEFAULT_PARAMS):
    """Relative coil inductance shift ΔL/L₀ = η·χ(c)."""
    return params.fill_factor * susceptibility(c, params)


def _detuning(rel_shift, params: FrontendParams) -> np.ndarray:
    rel_shift = np.asarray(rel_shift, dtype=np.float64)
    if np.any(rel_shift <= -1):
        raise DomainError("relative inductance shift must be > -1")
    # f0' = f0 / sqrt(1 + s) with f0 = f_drive, so f/f0' - f0'/f = sqrt(1 + s) - 1/sqrt(1 + s)
    return rel_shift / np.sqrt(1.0 + rel_shift)


def branch_response(rel_shift, params: FrontendParams = _DEFAULT_PARAMS):
    """Complex branch voltage of a resonator driven at f_drive, normalized to 1 on resonance."""
    response = 1.0 / (1.0 + 1j * params.quality_factor * _detuning(rel_shift, params))
    return complex(response) if np.ndim(response) == 0 else response


def branch_amplitude(rel_shift, params: FrontendParams = _DEFAULT_PARAMS):
    """
    Normalized branch amplitude (universal resonance curve).

    Parameters
    ----------
    rel_shift : array_like
        ΔL/L₀ of the branch coil, > -1.
    params : FrontendParams
        Uses ``quality_factor``.

    Returns
    -------
    float or np.ndarray
        1 / sqrt(1 + Q²·(f/f0' - f0'/f)²); exactly 1 at ``rel_shift == 0``.

    """
    x = _detuning(rel_shift, params)
    amplitude = 1.0 / np.sqrt(1.0 + (params.quality_factor * x) ** 2)
    return float(amplitude) if amplitude.ndim == 0 else amplitude


def difference_voltage(c_measure: np.ndarray, c_reference: np.ndarray, params: FrontendParams) -> np.ndarray:
    """
    Amplitude of V_diff between the bridge branches.

    The branch voltages are subtracted as phasors, so a small detuning ΔL gives a difference that is first order
    in ΔL. The residual imbalance left after tuning adds as a static offset.
    """
    h_measure = branch_response(inductance_shift(c_measure, params), params)
    h_reference = branch_response(inductance_shift(c_reference, params), params)
    return params.drive_amplitude / 2.0 * np.abs(h_measure - h_reference) + params.residual_imbalance / 2.0


def envelope_level(c_measure: np.ndarray, c_reference: np.ndarray, params: FrontendParams) -> np.ndarray:
    """Noise-free envelope detector output (an ideal magnitude extraction, no ripple or time constant)."""
    return params.envelope_baseline + params.amp_gain * difference_voltage(c_measure, c_reference, params)


def zero_signal_level(params: FrontendParams) -> float:
    """Envelope output with both coils empty, V."""
    return params.envelope_baseline + params.amp_gain * params.residual_imbalance / 2.0


def box_downsample(values: np.ndarray, factor: int) -> np.ndarray:
    if values.size % factor != 0:
        raise ShapeError(f"{values.size} samples cannot be split into blocks of {factor}")
    return values.reshape(-1, factor).mean(axis=1)


def quantize(values: np.ndarray, params: FrontendParams) -> Tuple[np.ndarray, int]:
    """
    Rounds to the ADC grid ``k · adc_range / 2**adc_bits``, clipping at the range edges.

    Returns
    -------
    Tuple[np.ndarray, int]
        Quantized values and the number of clipped samples.

    """
    codes = np.round(np.asarray(values, dtype=np.float64) / params.adc_step)
    top = params.adc_levels - 1
    clipped = int(np.count_nonzero((codes < 0) | (codes > top)))
    return np.clip(codes, 0, top) * params.adc_step, clipped


def _decimation_factor(fine_rate: float, sample_rate: float) -> int:
    factor = int(round(fine_rate / sample_rate))
    if factor < 1 or not np.isclose(factor * sample_rate, fine_rate, rtol=1e-9, atol=0.0):
        raise ShapeError(f"fine rate {fine_rate} is not an integer multiple of the sample rate {sample_rate}")
    return factor


def bridge_output(
    c_measure: Trace,
    c_reference: Trace,
    params: FrontendParams,
    rng: Optional[np.random.Generator],
    sample_rate: float,
) -> Trace:
    """
    Simulates the recorded receiver voltage.

    Parameters
    ----------
    c_measure : Trace
        Fine-grid concentration in the measurement coil.
    c_reference : Trace
        Fine-grid concentration in the reference coil (all-zero for single-ended signaling).
    params : FrontendParams
        Receiver model.
    rng : Optional[np.random.Generator]
        Noise source; may be None only when ``params.noise_sigma == 0``.
    sample_rate : float
        DAQ sample rate, samples/s. The fine grid rate must be an integer multiple of it.

    Returns
    -------
    Trace
        Quantized voltage trace at ``sample_rate``; ``clipped_samples`` counts ADC range violations.

    """
    if not c_measure.same_grid(c_reference):
        raise ShapeError("measurement and reference concentration traces must share the same grid")
    if len(c_measure) == 0:
        raise ShapeError("concentration traces must not be empty")

    level = envelope_level(c_measure.values, c_reference.values, params)
    if params.noise_enabled:
        if rng is None:
            raise ValueError("an rng is required when noise_sigma > 0")
        level = level + rng.normal(0.0, params.noise_sigma, size=level.size)

    factor = _decimation_factor(c_measure.sample_rate, sample_rate)
    voltage, clipped = quantize(box_downsample(level, factor), params)
    if clipped:
        _LOGGER.warning(f"{clipped} of {voltage.size} samples clipped at the ADC range [0, {params.adc_range}) V")

    # block i of the fine grid is centred on the output sample
    start = c_measure.start_time + (factor - 1) / 2.0 / c_measure.sample_rate
    return Trace(
        start_time=round(start, 12),
        sample_rate=sample_rate,
        values=voltage,
        unit=TraceUnit.VOLTAGE,
        clipped_samples=clipped,
    )
