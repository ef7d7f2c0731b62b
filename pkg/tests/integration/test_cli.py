"""End-to-end tests of the ``hetgt`` command line, driven in-process."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

from hetgt.core.errors import EXIT_CONFIG, EXIT_DATA, EXIT_GRADCHECK
from hetgt.experiments.commands import read_runs
from hetgt.main import main
from tests.helpers.builders import synthetic_spec, write_experiment_config


def _dataset_files(root: Path) -> list[Path]:
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


@pytest.fixture(autouse=True)
def _restore_root_logger():
    """main() reconfigures the root logger for the process."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
    logging.captureWarnings(False)


class TestTrain:
    def test_train_writes_results(self, tmp_path):
        config = write_experiment_config(tmp_path)
        assert main(["train", "--config", str(config)]) == 0
        out = tmp_path / "out"
        assert len((out / "runs.jsonl").read_text().splitlines()) == 5
        for name in ("summary.json", "timing.json", "best.ckpt", "config.json"):
            assert (out / name).is_file()

    def test_summary_is_byte_identical_across_invocations(self, tmp_path):
        config = write_experiment_config(tmp_path)
        assert main(["train", "--config", str(config), "--out", str(tmp_path / "a")]) == 0
        assert main(["train", "--config", str(config), "--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()

    def test_flags_override_config(self, tmp_path):
        config = write_experiment_config(tmp_path)
        args = ["train", "--config", str(config), "--runs", "6", "--seed", "3", "--depth", "1"]
        assert main(args) == 0
        runs = read_runs(tmp_path / "out" / "runs.jsonl")
        assert [r.seed for r in runs] == [3, 4, 5, 6, 7, 8]
        assert runs[0].model == "HetGTAN/semantic/L1"

    def test_missing_dataset_exits_3_without_output(self, tmp_path):
        config = write_experiment_config(tmp_path, synthetic=None, dataset={"path": "missing"})
        assert main(["train", "--config", str(config)]) == EXIT_DATA
        assert not (tmp_path / "out").exists()

    def test_invalid_config_reports_line(self, tmp_path, capsys):
        config = write_experiment_config(tmp_path, model={"kind": "HetFoo"})
        kind_line = next(i for i, line in enumerate(config.read_text().splitlines(), 1) if '"HetFoo"' in line)
        assert main(["train", "--config", str(config)]) == EXIT_CONFIG
        assert f"{config}:{kind_line}:" in capsys.readouterr().err

    def test_too_few_runs(self, tmp_path):
        config = write_experiment_config(tmp_path)
        assert main(["train", "--config", str(config), "--runs", "4"]) == EXIT_CONFIG


class TestSweeps:
    def test_depth_sweep_rows(self, tmp_path):
        config = write_experiment_config(tmp_path, model={"kind": "HetGTCN"})
        assert main(["depth-sweep", "--config", str(config), "--depths", "1", "2", "4"]) == 0
        table = json.loads((tmp_path / "out" / "depth_sweep.json").read_text())
        assert [row["depth"] for row in table["rows"]] == [1, 2, 4]
        assert len((tmp_path / "out" / "depth_sweep.csv").read_text().splitlines()) == 4

    @pytest.mark.parametrize(("kind", "rows"), [("HetGTAN", 4), ("HetGTCN", 3)])
    def test_ablation_rows(self, tmp_path, kind, rows):
        config = write_experiment_config(tmp_path, model={"kind": kind}, ablation_depth=2)
        assert main(["ablation", "--config", str(config)]) == 0
        table = json.loads((tmp_path / "out" / "ablation.json").read_text())
        assert len(table["rows"]) == rows

    def test_ablation_rejects_baseline(self, tmp_path):
        config = write_experiment_config(tmp_path, model={"kind": "HetGCN"})
        assert main(["ablation", "--config", str(config)]) == EXIT_CONFIG


class TestGenSynthetic:
    def test_output_is_byte_identical(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(synthetic_spec()))
        assert main(["gen-synthetic", "--spec", str(spec), "--out", str(tmp_path / "a")]) == 0
        assert main(["gen-synthetic", "--spec", str(spec), "--out", str(tmp_path / "b")]) == 0
        first, second = _dataset_files(tmp_path / "a"), _dataset_files(tmp_path / "b")
        assert first == second
        assert {"manifest.json", "labels.csv", "splits.json"} <= {str(p) for p in first}
        assert any(p.parts[0] == "edges" for p in first)
        for rel in first:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_generated_dataset_trains(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(synthetic_spec()))
        assert main(["gen-synthetic", "--spec", str(spec), "--out", str(tmp_path / "ds")]) == 0
        config = write_experiment_config(tmp_path, synthetic=None, dataset={"path": "ds"})
        assert main(["train", "--config", str(config)]) == 0


@pytest.mark.slow
class TestGradcheck:
    def test_passes(self, capsys):
        assert main(["gradcheck"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "model:HetGTAN_ns/L2" in out

    def test_corrupted_backward_exits_5(self):
        assert main(["gradcheck", "--corrupt", "matmul"]) == EXIT_GRADCHECK
