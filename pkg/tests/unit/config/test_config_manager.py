"""Tests for the config manager (load_config, validation and atomic writes)."""

import json

import pytest

from hetgt.config.config_manager import (
    atomic_write_bytes,
    atomic_write_json,
    load_config,
    read_json,
    save_config,
    validate_model,
)
from hetgt.core.errors import ConfigError
from hetgt.core.models.config import ExperimentConfig, TrainConfig
from tests.helpers.builders import write_experiment_config


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ("HETGT_LOG_LEVEL", "HETGT_LOG_DIR", "HETGT_THREADS", "HETGT_PRECISION", "HETGT_CONFIG_FILE"):
        monkeypatch.delenv(key, raising=False)


class TestLoadConfig:
    def test_load_default_config(self):
        """The shipped hetgt_config.json should load without errors."""
        cfg = load_config()
        assert isinstance(cfg, ExperimentConfig)
        assert cfg.model.kind == "HetGTAN"
        assert cfg.synthetic is not None

    def test_load_custom_config(self, tmp_path):
        cfg = load_config(write_experiment_config(tmp_path))
        assert cfg.model.hidden == 8
        assert cfg.runs == 5
        assert cfg.system.log_dir is None

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nonexistent.json")

    def test_config_file_from_env(self, tmp_path, monkeypatch):
        path = write_experiment_config(tmp_path, runs=7)
        monkeypatch.setenv("HETGT_CONFIG_FILE", str(path))
        assert load_config().runs == 7

    def test_env_override_log_level(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HETGT_LOG_LEVEL", "DEBUG")
        cfg = load_config(write_experiment_config(tmp_path))
        assert cfg.system.log_level == "DEBUG"

    def test_env_override_threads(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HETGT_THREADS", "4")
        assert load_config(write_experiment_config(tmp_path)).system.threads == 4

    def test_bad_env_value(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HETGT_THREADS", "many")
        with pytest.raises(ConfigError, match="HETGT_THREADS"):
            load_config(write_experiment_config(tmp_path))

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HETGT_PRECISION", "f64")
        cfg = load_config(write_experiment_config(tmp_path), {"train": {"precision": "f32"}})
        assert cfg.train.precision == "f32"

    def test_top_level_and_none_overrides(self, tmp_path):
        cfg = load_config(write_experiment_config(tmp_path), {"": {"runs": 9}, "model": {"depth": None}})
        assert cfg.runs == 9
        assert cfg.model.depth == 2

    def test_relative_dataset_path_resolves_next_to_config(self, tmp_path):
        path = write_experiment_config(tmp_path, synthetic=None, dataset={"path": "data/acm"})
        cfg = load_config(path)
        assert cfg.dataset.path == str((tmp_path / "data" / "acm").resolve())


class TestPresets:
    def test_preset_fills_unset_fields(self, tmp_path):
        path = tmp_path / "cfg.json"
        raw = {
            "preset": "acm",
            "synthetic": {"node_types": [{"name": "P", "count": 3}], "target_type": "P"},
            "model": {"kind": "HetGTCN"},
        }
        path.write_text(json.dumps(raw))
        cfg = load_config(path)
        assert cfg.model.depth == 5
        assert cfg.model.dropout.projection == 0.8
        assert cfg.train.weight_decay == 1e-5

    def test_explicit_values_win(self, tmp_path):
        path = write_experiment_config(tmp_path, preset="acm")
        cfg = load_config(path)
        assert cfg.model.depth == 2
        assert cfg.model.hidden == 8
        # unset in the file, so the preset supplies it
        assert cfg.train.weight_decay == 5e-5


class TestErrors:
    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{\n  "runs": 5,\n  "model": {\n}}}\n')
        with pytest.raises(ConfigError) as exc_info:
            load_config(path)
        assert exc_info.value.line == 4

    def test_validation_error_names_line(self, tmp_path):
        path = write_experiment_config(tmp_path, model={"kind": "HetFoo"})
        with pytest.raises(ConfigError) as exc_info:
            load_config(path)
        err = exc_info.value
        lines = path.read_text().splitlines()
        assert "HetFoo" in lines[err.line - 1]
        assert str(err).startswith(f"{path}:{err.line}:")

    def test_too_few_runs(self, tmp_path):
        with pytest.raises(ConfigError, match="runs"):
            load_config(write_experiment_config(tmp_path, runs=3))

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)

    def test_validate_model_reports_field(self):
        with pytest.raises(ConfigError, match="lr"):
            validate_model(TrainConfig, {"lr": -1})


class TestWriters:
    def test_save_config_round_trips(self, tmp_path):
        cfg = load_config(write_experiment_config(tmp_path))
        out = save_config(cfg, tmp_path / "results" / "config.json")
        raw, _ = read_json(out)
        assert ExperimentConfig.model_validate(raw) == cfg

    def test_atomic_write_leaves_no_temp_files(self, tmp_path):
        atomic_write_json(tmp_path / "a.json", {"x": 1})
        assert [p.name for p in tmp_path.iterdir()] == ["a.json"]
        assert json.loads((tmp_path / "a.json").read_text()) == {"x": 1}

    def test_atomic_bytes_write(self, tmp_path):
        atomic_write_bytes(tmp_path / "x.bin", b"\x00\x01")
        atomic_write_bytes(tmp_path / "x.bin", b"\x02")
        assert [p.name for p in tmp_path.iterdir()] == ["x.bin"]
        assert (tmp_path / "x.bin").read_bytes() == b"\x02"
