"""Run directories and report files (JSON for machines, plain text for people, CSV for traces and tables)."""
import hashlib
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Mapping
from typing import Sequence
from typing import Union

import numpy as np
import pandas as pd

from spion_mc_testbed.core.trace import Trace
from spion_mc_testbed.harness.experiment import ExperimentReport
from spion_mc_testbed.harness.experiment import SweepRow

_LOGGER = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_TEXT = "report.txt"
SWEEP_CSV = "sweep.csv"


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def config_hash(snapshot: Mapping[str, Any]) -> str:
    """Short sha256 of the canonical JSON form of a configuration snapshot."""
    canonical = json.dumps(_json_safe(dict(snapshot)), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def run_directory(out: Union[str, Path], snapshot: Mapping[str, Any], seed: int) -> Path:
    directory = Path(out) / f"{config_hash(snapshot)}-seed{seed}"
    directory.mkdir(parents=True, exist_ok=True)
    _LOGGER.info(f"writing run artifacts to {directory}")
    return directory


def write_report(directory: Path, payload: Mapping[str, Any], text: str) -> Path:
    """Writes ``report.json`` and ``report.txt`` into ``directory`` and returns the JSON path."""
    json_path = directory / REPORT_JSON
    with json_path.open("w", encoding="utf-8") as json_file:
        json.dump(_json_safe(dict(payload)), json_file, indent=2)
    (directory / REPORT_TEXT).write_text(text.rstrip("\n") + "\n", encoding="utf-8")
    return json_path


def write_experiment(directory: Path, report: ExperimentReport) -> Path:
    for name, trace in report.traces.items():
        _write_trace(directory / f"{name}.csv", trace)
    return write_report(directory, report.as_dict(), report.summary())


def _write_trace(path: Path, trace: Trace) -> None:
    trace.to_csv(path)
    _LOGGER.debug(f"wrote {len(trace)} samples to {path}")


def sweep_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows])


def sweep_summary(rows: Sequence[SweepRow], checks: Mapping[str, bool]) -> str:
    lines = [f"{'c [mg/mL]':>10}  {'detected':>8}  {'amplitude [V]':>13}  {'errors':>6}  {'clipped':>7}"]
    lines += [
        f"{row.concentration:>10g}  {str(row.detected):>8}  {row.mean_peak_amplitude:>13.4f}  "
        f"{row.bit_errors:>6d}  {row.clipped_samples:>7d}"
        for row in rows
    ]
    lines += [f"check {name:<20}: {'PASS' if ok else 'FAIL'}" for name, ok in checks.items()]
    return "\n".join(lines)


def write_sweep(directory: Path, rows: Sequence[SweepRow], payload: Dict[str, Any], checks: Mapping[str, bool]) -> Path:
    sweep_frame(rows).to_csv(directory / SWEEP_CSV, index=False, float_format="%.17g")
    payload = dict(payload, rows=[asdict(row) for row in rows], checks=dict(checks))
    return write_report(directory, payload, sweep_summary(rows, checks))
