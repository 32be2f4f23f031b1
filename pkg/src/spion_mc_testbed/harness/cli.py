import argparse
import logging
import sys
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional

from spion_mc_testbed.channel.simulator import schedule_injections
from spion_mc_testbed.channel.simulator import simulate_concentration
from spion_mc_testbed.channel.simulator import simulation_duration
from spion_mc_testbed.channel.simulator import write_concentration_csv
from spion_mc_testbed.codec import decode_bits
from spion_mc_testbed.codec import encode_text
from spion_mc_testbed.core.common import BitSequence
from spion_mc_testbed.core.common import format_bits
from spion_mc_testbed.core.common import make_rng
from spion_mc_testbed.core.common import parse_bits
from spion_mc_testbed.core.trace import read_trace_csv
from spion_mc_testbed.detector import DEFAULT_FILTER_WIDTH
from spion_mc_testbed.detector import DEFAULT_MIN_SWING_SNR
from spion_mc_testbed.detector import DEFAULT_OCCUPANCY
from spion_mc_testbed.detector import detect_bits
from spion_mc_testbed.errors import SpionMcError
from spion_mc_testbed.errors import SyncFailureError
from spion_mc_testbed.frontend.bridge import bridge_output
from spion_mc_testbed.frontend.calibration import CALIBRATION_TOLERANCE
from spion_mc_testbed.frontend.calibration import CalibrationTarget
from spion_mc_testbed.frontend.calibration import single_release_peak
from spion_mc_testbed.harness.experiment import ExperimentRunner
from spion_mc_testbed.harness.experiment import amplitudes_increasing
from spion_mc_testbed.harness.experiment import detection_limit
from spion_mc_testbed.harness.experiment import random_bits
from spion_mc_testbed.harness.report import run_directory
from spion_mc_testbed.harness.report import write_experiment
from spion_mc_testbed.harness.report import write_report
from spion_mc_testbed.harness.report import write_sweep
from spion_mc_testbed.harness.sequences import CALIBRATION_REFERENCE_CONCENTRATION
from spion_mc_testbed.harness.sequences import CALIBRATION_TARGET_PEAK
from spion_mc_testbed.harness.sequences import DILUTION_SERIES
from spion_mc_testbed.harness.sequences import FAU_TEXT
from spion_mc_testbed.harness.sequences import REFERENCE_80_BITS
from spion_mc_testbed.harness.sequences import SENSITIVITY_BITS
from spion_mc_testbed.harness.settings import dump_frontend
from spion_mc_testbed.harness.settings import load_settings

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=str, default=None, help="YAML configuration file. Defaults if omitted.")
    parser.add_argument("--seed", type=int, default=None, help="Noise seed; overrides rng_seed from the configuration.")
    parser.add_argument(
        "--noise",
        choices=["on", "off"],
        default=None,
        help="Receiver noise. 'off' gives noise-free traces. Default 'on'; not used by decode-trace.",
    )
    parser.add_argument("--out", type=str, default="runs", help="Directory for run artifacts. Default 'runs'.")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level. Default 'WARNING'.",
    )
    return parser


def _add_message_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--text", type=str, help=f"Text to encode and transmit. Default '{FAU_TEXT}'.")
    group.add_argument("--bits", type=str, help="Bit string to transmit (whitespace ignored), must start with '1'.")
    group.add_argument("--reference-80", action="store_true", help="Transmit the 80-bit reference sequence.")
    group.add_argument("--random", type=int, metavar="N", help="Transmit N seeded random bits.")


def _add_calibration_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--no-calibrate",
        action="store_true",
        help=f"Use the configured receiver gain instead of calibrating to {CALIBRATION_TARGET_PEAK} V "
        f"at {CALIBRATION_REFERENCE_CONCENTRATION:g} mg/mL.",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="spion-mc", description="SPION molecular communication testbed simulator.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    encode = subparsers.add_parser("encode", parents=[common], help="Encode text into the 6-bit line code.")
    encode.add_argument("text", type=str)

    decode = subparsers.add_parser("decode", parents=[common], help="Decode a bit string into text.")
    decode.add_argument("bits", type=str)
    decode.add_argument("--lenient", action="store_true", help="Emit '?' for invalid codewords instead of failing.")

    simulate = subparsers.add_parser("simulate", parents=[common], help="Write concentration and voltage traces.")
    _add_message_arguments(simulate)
    _add_calibration_arguments(simulate)

    decode_trace = subparsers.add_parser("decode-trace", parents=[common], help="Detect bits in a recorded trace.")
    decode_trace.add_argument("trace", type=str, help="CSV with time_s and voltage_v (or concentration) columns.")
    decode_trace.add_argument("--lane", type=int, default=None, help="Lane to read from a multi-lane CSV.")
    decode_trace.add_argument("--symbol-duration", type=float, default=None, help="T_S in s. Default from config.")
    decode_trace.add_argument("--expected-symbols", type=int, default=None)
    decode_trace.add_argument("--filter-width", type=int, default=DEFAULT_FILTER_WIDTH)
    decode_trace.add_argument("--occupancy", type=float, default=DEFAULT_OCCUPANCY)
    decode_trace.add_argument("--min-swing-snr", type=float, default=DEFAULT_MIN_SWING_SNR)
    decode_trace.add_argument("--as-text", action="store_true", help="Also decode the bits as text (lenient).")

    e2e = subparsers.add_parser("e2e", parents=[common], help="Loopback transmission with BER report.")
    _add_message_arguments(e2e)
    _add_calibration_arguments(e2e)
    e2e.add_argument("--runs", type=int, default=1, help="Number of noise realisations. Default 1.")
    e2e.add_argument("--common-mode", type=str, default=None, help="Bits injected into both tubes at once.")
    e2e.add_argument("--traces", action="store_true", help="Write the traces of the first run as CSV.")

    sweep = subparsers.add_parser("sweep", parents=[common], help="Dilution series sensitivity sweep.")
    _add_calibration_arguments(sweep)
    sweep.add_argument(
        "--concentrations",
        type=float,
        nargs="+",
        default=list(DILUTION_SERIES),
        help="Stock concentrations in mg/mL. Default: the 10, 5, 1, 0.5, 0.1 dilution series.",
    )
    sweep.add_argument("--bits", type=str, default=format_bits(SENSITIVITY_BITS))
    sweep.add_argument("--workers", type=int, default=1, help="Worker processes. Default 1.")

    calibrate = subparsers.add_parser("calibrate", parents=[common], help="Calibrate the receiver gain.")
    calibrate.add_argument("--target-peak", type=float, default=CALIBRATION_TARGET_PEAK)
    calibrate.add_argument("--reference-concentration", type=float, default=CALIBRATION_REFERENCE_CONCENTRATION)
    calibrate.add_argument(
        "--fit",
        default=CalibrationTarget.GAIN.value,
        choices=[e.value for e in CalibrationTarget],
        help="Parameter to solve for. Default 'gain'.",
    )

    return parser


def _message_bits(args: argparse.Namespace, seed: int) -> BitSequence:
    if args.bits is not None:
        return parse_bits(args.bits)
    if args.reference_80:
        return REFERENCE_80_BITS
    if args.random is not None:
        return random_bits(args.random, seed)
    return encode_text(args.text if args.text is not None else FAU_TEXT)


def _runner(args: argparse.Namespace, calibrate_frontend: bool) -> ExperimentRunner:
    settings = load_settings(args.config).with_overrides(seed=args.seed, noise=args.noise != "off")
    return ExperimentRunner(settings, calibrate_frontend=calibrate_frontend)


def _finish(checks: Dict[str, bool]) -> int:
    return EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED


def _encode(args: argparse.Namespace) -> int:
    print(format_bits(encode_text(args.text), 6))
    return EXIT_OK


def _decode(args: argparse.Namespace) -> int:
    print(decode_bits(parse_bits(args.bits), strict=not args.lenient))
    return EXIT_OK


def _simulate(args: argparse.Namespace) -> int:
    runner = _runner(args, calibrate_frontend=not args.no_calibrate)
    config = runner.config
    bits = _message_bits(args, config.rng_seed)

    events = schedule_injections(bits, config, dilution_factor=runner.channel_params.dilution_factor)
    lanes = simulate_concentration(events, runner.channel_params, config, simulation_duration(len(bits), config))
    rng = make_rng(config.rng_seed, 0)
    voltage = bridge_output(lanes[0], lanes[1], runner.frontend_params, rng, config.sample_rate)

    directory = run_directory(args.out, runner.snapshot(), config.rng_seed)
    write_concentration_csv(lanes, directory / "concentration.csv")
    voltage.to_csv(directory / "voltage.csv")
    payload = {"config": runner.snapshot(), "bits": format_bits(bits), "clipped_samples": voltage.clipped_samples}
    write_report(directory, payload, f"bits: {format_bits(bits, 6)}\nclipped samples: {voltage.clipped_samples}")
    print(directory)
    return EXIT_OK


def _decode_trace(args: argparse.Namespace) -> int:
    settings = load_settings(args.config).with_overrides(seed=args.seed)
    if args.noise is not None:
        _LOGGER.warning("--noise has no effect on decode-trace, the recorded trace is decoded as it is")
    symbol_duration = args.symbol_duration or settings.testbed.symbol_duration
    detector = {
        "symbol_duration": symbol_duration,
        "filter_width": args.filter_width,
        "expected_symbols": args.expected_symbols,
        "occupancy_threshold": args.occupancy,
        "min_swing_snr": args.min_swing_snr,
    }
    trace = read_trace_csv(args.trace, lane=args.lane)
    snapshot = {"trace": str(Path(args.trace).resolve()), "lane": args.lane, "detector": detector}
    directory = run_directory(args.out, snapshot, settings.testbed.rng_seed)

    try:
        result = detect_bits(trace, **detector)
    except SyncFailureError as exc:
        checks = {"synchronized": False}
        write_report(directory, {**snapshot, "error": str(exc), "checks": checks}, f"not synchronized: {exc}")
        print(f"not synchronized: {exc}")
        print(directory)
        return _finish(checks)

    checks = {"synchronized": True}
    payload = {
        **snapshot,
        "bits": format_bits(result.bits),
        "threshold": result.threshold,
        "t0": result.t0,
        "edges": result.edges,
        "symbol_intervals": result.symbol_intervals,
        "occupancy": result.occupancy,
        "peak_amplitudes": result.peak_amplitudes,
        "noise_floor": result.noise_floor,
        "checks": checks,
    }
    lines = [format_bits(result.bits, 6), f"t0 = {result.t0:.3f} s, threshold = {result.threshold:.4f}"]
    lines.append("occupancy: " + " ".join(f"{fraction:.2f}" for fraction in result.occupancy))
    if args.as_text:
        payload["text"] = decode_bits(result.bits, strict=False)
        lines.append(payload["text"])
    write_report(directory, payload, "\n".join(lines))

    print("\n".join(lines))
    print(directory)
    return _finish(checks)


def _e2e(args: argparse.Namespace) -> int:
    if args.runs < 1:
        raise ValueError(f"--runs must be >= 1, got {args.runs}")
    runner = _runner(args, calibrate_frontend=not args.no_calibrate)
    bits = _message_bits(args, runner.config.rng_seed)
    common_mode = parse_bits(args.common_mode) if args.common_mode else None

    reports = [
        runner.run_end_to_end(bits, run_index=i, include_traces=args.traces and i == 0, common_mode_bits=common_mode)
        for i in range(args.runs)
    ]
    directory = run_directory(args.out, runner.snapshot(), runner.config.rng_seed)
    write_experiment(directory, reports[0])

    checks = {name: all(report.checks[name] for report in reports) for name in reports[0].checks}
    bit_errors = sum(report.bit_errors for report in reports)
    if args.runs > 1:
        payload = {
            "config": runner.snapshot(),
            "runs": [report.as_dict() for report in reports],
            "bit_errors": bit_errors,
            "ber": bit_errors / (len(bits) * args.runs),
            "checks": checks,
        }
        text = f"{args.runs} runs, {bit_errors} bit errors in {len(bits) * args.runs} bits"
        write_report(directory, payload, text + "\n\n" + reports[0].summary())

    print(reports[0].summary())
    if args.runs > 1:
        print(f"total over {args.runs} runs: {bit_errors} bit errors")
    if len(bits) % 6 == 0:
        print(f"decoded text: {decode_bits(reports[0].decoded, strict=False)}")
    print(directory)
    return _finish(checks)


def _sweep(args: argparse.Namespace) -> int:
    runner = _runner(args, calibrate_frontend=not args.no_calibrate)
    rows = runner.sensitivity_sweep(args.concentrations, bits=parse_bits(args.bits), workers=args.workers)
    checks = {
        "amplitudes_increasing": amplitudes_increasing(rows),
        "no_clipping": all(row.clipped_samples == 0 for row in rows),
    }
    directory = run_directory(args.out, runner.snapshot(), runner.config.rng_seed)
    write_sweep(directory, rows, {"config": runner.snapshot(), "detection_limit": detection_limit(rows)}, checks)

    for row in rows:
        print(f"{row.concentration:>8g} mg/mL  detected={row.detected!s:<5}  amplitude={row.mean_peak_amplitude:.4f} V")
    print(f"lowest concentration detected: {detection_limit(rows)}")
    print(directory)
    return _finish(checks)


def _calibrate(args: argparse.Namespace) -> int:
    runner = _runner(args, calibrate_frontend=False)
    calibrated = runner.calibrate(args.target_peak, args.reference_concentration, target=CalibrationTarget(args.fit))
    achieved = single_release_peak(calibrated, runner.config, args.reference_concentration, runner.channel_params)
    checks = {"within_tolerance": abs(achieved - args.target_peak) <= CALIBRATION_TOLERANCE * args.target_peak}

    runner.frontend_params = calibrated
    directory = run_directory(args.out, runner.snapshot(), runner.config.rng_seed)
    dump_frontend(calibrated, directory / "frontend.yaml")
    payload = {"frontend": calibrated.as_dict(), "achieved_peak": achieved, "checks": checks}
    text = f"amp_gain = {calibrated.amp_gain:.6g}\nfill_factor = {calibrated.fill_factor:.6g}\npeak = {achieved:.4f} V"
    write_report(directory, payload, text)

    print(text)
    print(directory)
    return _finish(checks)


_COMMANDS = {
    "encode": _encode,
    "decode": _decode,
    "simulate": _simulate,
    "decode-trace": _decode_trace,
    "e2e": _e2e,
    "sweep": _sweep,
    "calibrate": _calibrate,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    _LOGGER.debug(f"running {args.command} with {vars(args)}")

    try:
        return _COMMANDS[args.command](args)
    except (SpionMcError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
