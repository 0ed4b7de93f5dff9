"""Configuration parsing, CSV round-trips, CLI behavior, exit codes."""

import math
import os

import numpy as np
import pytest

from opasim import ConfigError, calibrate_efficiency
from opasim.cli import main
from opasim.config import CALIBRATE, parse_config
from opasim.csvio import embedded_config_text, read_scan_csv
from opasim.selfcheck import run_selfcheck


class TestParseConfig:
    def test_empty_text_yields_valid_defaults(self):
        cfg = parse_config("")
        assert cfg["opa.t_out"] == 0.03
        assert cfg["opo.t_out"] == 0.07
        assert cfg["detection.efficiency"] == CALIBRATE
        assert cfg["scan.points"] == 801
        # every key was defaulted, and that provenance is kept
        assert set(cfg.defaulted) == {k for k, _ in cfg.resolved_items()}

    def test_comments_and_blank_lines(self):
        cfg = parse_config("# a comment\n\nopa.t_out = 0.05  # trailing\n")
        assert cfg["opa.t_out"] == 0.05
        assert "opa.t_out" not in cfg.defaulted

    def test_threshold_violation_message(self):
        with pytest.raises(ConfigError, match="at/above threshold"):
            parse_config("opa.pump_fraction = 1.5")

    def test_unknown_key_carries_line_number(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config("\n\nopa.mystery = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("opa.t_in = 0.01\nopa.t_in = 0.02")

    def test_malformed_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("this is not a config line")

    def test_efficiency_accepts_calibrate_or_number(self):
        assert parse_config("detection.efficiency = calibrate")[
            "detection.efficiency"] == CALIBRATE
        assert parse_config("detection.efficiency = 0.4")[
            "detection.efficiency"] == 0.4
        with pytest.raises(ConfigError):
            parse_config("detection.efficiency = 1.4")

    def test_bench_decay_rates(self):
        cfg = parse_config("")
        d = cfg.decays("opa")
        assert d.gamma_out == pytest.approx(3.214e7, rel=1e-3)
        assert d.gamma_in == pytest.approx(5.357e6, rel=1e-3)
        assert d.over_coupled
        o = cfg.decays("opo")
        assert o.gamma_out == pytest.approx(7.499e7, rel=1e-3)

    def test_round_trip_through_to_text(self):
        cfg = parse_config("opa.t_out = 0.042\nscan.points = 501")
        again = parse_config(cfg.to_text())
        assert again.values == cfg.values
        assert again.defaulted == ()  # canonical text pins every key


class TestCliScan:
    def test_scan_writes_csv_with_summary(self, tmp_path, capsys):
        out = tmp_path / "fig3c.csv"
        assert main(["scan", "fig3c", "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "center=" in captured and "baseline=" in captured
        meta, raw_rows, rows = read_scan_csv(str(out))
        assert meta["scenario"] == "fig3c"
        assert len(rows) == 1201
        # noise rows carry a dB column consistent with the linear value
        assert rows[600][3] == pytest.approx(10 * math.log10(rows[600][2]), abs=1e-6)

    def test_scan_fig2a_summary_has_no_shoulders(self, tmp_path, capsys):
        out = tmp_path / "fig2a.csv"
        assert main(["scan", "fig2a", "--out", str(out)]) == 0
        assert "shoulders=0" in capsys.readouterr().out
        meta, raw_rows, rows = read_scan_csv(str(out))
        assert len(rows) == 801
        assert all(r[3] != r[3] for r in rows)  # dB column empty -> NaN

    def test_unknown_scenario_exits_one(self, tmp_path, capsys):
        assert main(["scan", "nosuch", "--out", str(tmp_path / "x.csv")]) == 1
        assert "unknown scenario" in capsys.readouterr().err

    def test_invalid_config_exits_one(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("opa.pump_fraction = 1.5\n")
        assert main(["scan", "fig2a", "--config", str(cfg),
                     "--out", str(tmp_path / "x.csv")]) == 1

    def test_unreachable_calibration_exits_two(self, tmp_path):
        cfg = tmp_path / "deep.cfg"
        cfg.write_text("detection.target_squeezing_db = -20\n")
        assert main(["scan", "fig3a", "--config", str(cfg),
                     "--out", str(tmp_path / "x.csv")]) == 2

    def test_io_error_exits_three(self, tmp_path):
        assert main(["scan", "fig2a", "--out",
                     str(tmp_path / "missing" / "x.csv")]) == 3

    def test_grid_flags_override(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["scan", "fig2a", "--out", str(out), "--points", "101",
                     "--span-gammas", "4"]) == 0
        _, _, rows = read_scan_csv(str(out))
        assert len(rows) == 101
        assert rows[0][0] == pytest.approx(-4.0, rel=1e-9)

    def test_csv_round_trip_precision(self, tmp_path):
        out = tmp_path / "p.csv"
        main(["scan", "fig3e", "--out", str(out), "--points", "51"])
        meta, raw_rows, rows = read_scan_csv(str(out))
        for raw, parsed in zip(raw_rows, rows):
            fields = raw.split(",")
            # parsing and re-formatting at 9 significant digits is stable
            assert f"{parsed[2]:.9g}" == fields[2]

    def test_metadata_reruns_bit_identically(self, tmp_path):
        first = tmp_path / "a.csv"
        main(["scan", "fig3c", "--out", str(first), "--points", "101"])
        meta, raw_rows, _ = read_scan_csv(str(first))
        cfg = tmp_path / "embedded.cfg"
        cfg.write_text(embedded_config_text(meta))
        second = tmp_path / "b.csv"
        main(["scan", meta["scenario"], "--config", str(cfg),
              "--out", str(second)])
        _, raw_again, _ = read_scan_csv(str(second))
        assert raw_again == raw_rows

    def test_two_processes_identical_outputs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["scan", "fig3f", "--out", str(a), "--points", "101"])
        main(["scan", "fig3f", "--out", str(b), "--points", "101"])
        assert a.read_text() == b.read_text()

    def test_custom_scenario_vacuum_input(self, tmp_path):
        cfg = tmp_path / "custom.cfg"
        cfg.write_text("scan.input = vacuum\nopa.pump_fraction = 0\n")
        out = tmp_path / "c.csv"
        assert main(["scan", "custom", "--config", str(cfg),
                     "--out", str(out), "--points", "51"]) == 0
        _, _, rows = read_scan_csv(str(out))
        assert np.allclose([r[2] for r in rows], 1.0, atol=1e-12)


class TestCliBatch:
    def test_fig2_and_fig3_batches(self, tmp_path):
        d2, d3 = tmp_path / "f2", tmp_path / "f3"
        assert main(["fig2", "--all", "--outdir", str(d2), "--points", "201"]) == 0
        assert main(["fig3", "--all", "--outdir", str(d3), "--points", "201"]) == 0
        assert sorted(os.listdir(d2)) == [f"fig2{c}.csv" for c in "abcde"]
        assert sorted(os.listdir(d3)) == [f"fig3{c}.csv" for c in "abcdef"]


class TestCliCalibrate:
    def test_calibrate_writes_derived_config(self, tmp_path, capsys):
        out = tmp_path / "derived.cfg"
        assert main(["calibrate", "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "eta" in printed
        derived = parse_config(out.read_text())
        eta = derived["detection.efficiency"]
        assert isinstance(eta, float)
        cfg = parse_config("")
        expected = calibrate_efficiency(-2.0, cfg.sideband, cfg.opo_source())
        assert eta == pytest.approx(expected, abs=1e-9)

    def test_calibrate_requires_calibrate_mode(self, tmp_path):
        cfg = tmp_path / "fixed.cfg"
        cfg.write_text("detection.efficiency = 0.5\n")
        assert main(["calibrate", "--config", str(cfg),
                     "--out", str(tmp_path / "d.cfg")]) == 1

    def test_unreachable_target_exits_two(self, tmp_path):
        cfg = tmp_path / "deep.cfg"
        cfg.write_text("detection.target_squeezing_db = -20\n")
        assert main(["calibrate", "--config", str(cfg),
                     "--out", str(tmp_path / "d.cfg")]) == 2


class TestSelfcheck:
    def test_default_build_passes(self, capsys):
        assert run_selfcheck() == 0
        out = capsys.readouterr().out
        assert out.count("PASS") >= 8 and "FAIL" not in out

    def test_strict_oracle_tolerance_fails_as_documented(self, capsys):
        # the quadrature-based oracle cannot reach 1e-12; the strict flag
        # demonstrates why the contract tolerance is 1e-4
        assert run_selfcheck(strict=True) == 1
        assert "oracle_equivalence" in capsys.readouterr().out

    def test_injected_bad_decay_rates_fail(self, capsys):
        assert run_selfcheck(raw_rates=(1.0, 1.0, -1.0)) == 1
        assert "decay_invariants" in capsys.readouterr().out
