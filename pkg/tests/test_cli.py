from __future__ import annotations

import json
import subprocess
import sys

import pytest

from rgs_repeater.analytics import rows_from_csv
from rgs_repeater.cli import ConfigError, main, parse_specs, read_config_file
from rgs_repeater.rgs import RgsSpec


def write_config(tmp_path, text: str) -> str:
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


class TestConfig:
    def test_flat_file(self, tmp_path):
        cfg = write_config(tmp_path, "distance = 8, 12  # km\nm = 2\nb = 2\n")
        assert read_config_file(cfg) == {"distance": "8, 12", "m": "2", "b": "2"}

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(write_config(tmp_path, "colour = blue\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(str(tmp_path / "nope.cfg"))

    def test_spec_grid(self):
        assert parse_specs("1,2", "1;2-2") == [RgsSpec(1, (1,)), RgsSpec(1, (2, 2)), RgsSpec(2, (1,)), RgsSpec(2, (2, 2))]

    def test_bad_spec(self):
        with pytest.raises(ConfigError):
            parse_specs("0", "1")


class TestSweepCommand:
    def test_cli_overrides_file(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "distance = 8\nm = 1\nb = 1\ntrials = 3\nseed = 1\n")
        assert main(["sweep", "--config", cfg, "--distance", "12", "--m", "2"]) == 0
        rows = rows_from_csv(capsys.readouterr().out)
        assert [(r.distance_km, r.m) for r in rows] == [(12.0, 2)]

    def test_writes_files_and_reports_progress(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        assert main(["sweep", "--distance", "8,16", "--m", "1", "--b", "1", "--trials", "2", "--out", str(out)]) == 0
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "trials" in captured.err
        assert len(rows_from_csv((tmp_path / "sweep.csv").read_text())) == 2
        assert len(json.loads((tmp_path / "sweep.json").read_text())) == 2

    @pytest.mark.parametrize(
        "args",
        [["--trials", "0"], ["--distance", "-5"], ["--m", "x"], ["--distance", "2", "--spacing", "4"], ["--seed", "abc"]],
    )
    def test_config_errors_exit_nonzero(self, args, capsys):
        assert main(["sweep", *args]) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_config_file_exit_nonzero(self, tmp_path):
        assert main(["sweep", "--config", write_config(tmp_path, "what\n")]) == 2


class TestSimulateCommand:
    def test_json_summary(self, capsys):
        assert main(["simulate", "--distance", "1000", "--trials", "1", "--seed", "3"]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["n_rgss"] == 249 and result["n_absa"] == 250
        assert result["one_stage_end_bits"] / result["two_stage_end_bits"] >= 1e3
        assert result["reconciliation"]["reference_total"] == 545462

    def test_bad_period(self):
        assert main(["simulate", "--distance", "8", "--trials", "1", "--period", "0"]) == 2


class TestVerifyCommand:
    def test_passes(self, capsys):
        assert main(["verify", "--graphs", "20", "--chain-successes", "20"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 4

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "rgs_repeater", "verify", "--graphs", "5", "--chain-successes", "5"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
