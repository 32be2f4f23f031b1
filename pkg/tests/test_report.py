import json

import pandas as pd

from spion_mc_testbed.harness.experiment import SweepRow
from spion_mc_testbed.harness.experiment import run_end_to_end
from spion_mc_testbed.harness.report import config_hash
from spion_mc_testbed.harness.report import run_directory
from spion_mc_testbed.harness.report import sweep_frame
from spion_mc_testbed.harness.report import write_experiment
from spion_mc_testbed.harness.report import write_sweep
from spion_mc_testbed.harness.sequences import FAU_BITS
from spion_mc_testbed.harness.settings import Settings


class TestRunDirectory:
    """Run directories are named by configuration hash and seed."""

    def test_name(self, tmp_path):
        directory = run_directory(tmp_path, Settings().snapshot(), 0)
        name, seed = directory.name.split("-")
        assert len(name) == 12
        assert seed == "seed0"
        assert directory.is_dir()

    def test_hash_is_stable(self):
        assert config_hash(Settings().snapshot()) == config_hash(Settings().snapshot())

    def test_hash_depends_on_config(self):
        other = Settings().with_overrides(noise=False).snapshot()
        assert config_hash(Settings().snapshot()) != config_hash(other)


class TestWriters:
    def test_experiment(self, tmp_path, config, channel_params, calibrated_frontend):
        report = run_end_to_end(FAU_BITS, config, channel_params, calibrated_frontend, include_traces=True)
        path = write_experiment(tmp_path, report)
        payload = json.loads(path.read_text())
        assert payload["transmitted"] == "100101100000110100"
        assert payload["checks"] == {"zero_ber": True, "no_clipping": True}
        assert (tmp_path / "report.txt").read_text().startswith("transmitted")
        voltage = pd.read_csv(tmp_path / "voltage.csv")
        assert list(voltage.columns) == ["time_s", "voltage_v"]

    def test_sweep(self, tmp_path):
        rows = [SweepRow(10.0, True, 0.3, 0, 0), SweepRow(0.1, False, 0.005, 3, 0)]
        write_sweep(tmp_path, rows, {"detection_limit": 10.0}, {"amplitudes_increasing": True})
        table = pd.read_csv(tmp_path / "sweep.csv")
        assert list(table.columns) == [
            "concentration",
            "detected",
            "mean_peak_amplitude",
            "bit_errors",
            "clipped_samples",
        ]
        assert table["detected"].tolist() == [True, False]
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["rows"][1]["bit_errors"] == 3
        assert len(sweep_frame(rows)) == 2
