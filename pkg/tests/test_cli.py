"""CLI behavior: file outputs, exit codes, determinism, schemas."""
import json
import os

import numpy as np
import pytest

from bcdyn import default_scenario, integrate
from bcdyn.cli import main
from bcdyn.integrator import trajectory_to_csv


def run(args):
    return main(list(args))


class TestSimulate:
    def test_csv_shape(self, tmp_path):
        assert run(["simulate", "--out", str(tmp_path), "--format", "csv"]) == 0
        text = (tmp_path / "default_trajectory.csv").read_text(encoding="utf-8")
        lines = text.strip("\n").split("\n")
        assert lines[0] == "t,N,T,I,E,M"
        assert len(lines) == 1 + default_scenario().sample_count

    def test_matches_library_bytes(self, tmp_path):
        assert run(["simulate", "--out", str(tmp_path), "--format", "csv"]) == 0
        sc = default_scenario()
        traj = integrate(sc.initial_state, sc.params, sc.integration, sc.sample_count)
        assert (
            (tmp_path / "default_trajectory.csv").read_text(encoding="utf-8")
            == trajectory_to_csv(traj)
        )

    def test_sourceless_zero_scenario(self, tmp_path, base_scenario_doc, write_scenario):
        doc = base_scenario_doc
        doc["params"]["s"] = 0.0
        doc["params"]["p"] = 0.0
        doc["params"]["v_M"] = 0.0
        doc["initial_state"] = {k: 0.0 for k in "NTIEM"}
        doc["label"] = "zero"
        path = write_scenario(doc)
        assert run(["simulate", "--scenario", path, "--out", str(tmp_path),
                    "--format", "csv"]) == 0
        text = (tmp_path / "zero_trajectory.csv").read_text(encoding="utf-8")
        for line in text.strip("\n").split("\n")[1:]:
            assert line.split(",")[1:] == ["0"] * 5

    def test_svg_written(self, tmp_path):
        assert run(["simulate", "--out", str(tmp_path), "--svg"]) == 0
        svg = (tmp_path / "default_trajectory.svg").read_text(encoding="utf-8")
        assert svg.startswith("<svg")
        assert svg.count("<polyline") == 5


class TestEquilibria:
    def test_blockade_scenario_estrogen_zero(
        self, tmp_path, base_scenario_doc, write_scenario
    ):
        doc = base_scenario_doc
        doc["params"]["k"] = 1.0
        doc["params"]["p_M"] = 0.05
        doc["label"] = "blockade"
        path = write_scenario(doc)
        assert run(["equilibria", "--scenario", path, "--out", str(tmp_path)]) == 0
        catalog = json.loads(
            (tmp_path / "blockade_equilibria.json").read_text(encoding="utf-8")
        )
        assert catalog
        for entry in catalog:
            assert entry["point"]["E"] == 0.0
            if entry["confirmed"]:
                assert entry["residual"] < 1e-10

    def test_csv_schema(self, tmp_path):
        assert run(["equilibria", "--out", str(tmp_path), "--format", "csv"]) == 0
        text = (tmp_path / "default_equilibria.csv").read_text(encoding="utf-8")
        assert text.split("\n", 1)[0] == "family,N,T,I,E,M,residual,confirmed,provenance"

    def test_malformed_scenario_no_files(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken", encoding="utf-8")
        out = tmp_path / "out"
        assert run(["equilibria", "--scenario", str(bad), "--out", str(out)]) == 2
        assert not out.exists()

    def test_invalid_params_exit_2(self, tmp_path, base_scenario_doc, write_scenario):
        base_scenario_doc["params"]["theta"] = 0.0
        path = write_scenario(base_scenario_doc)
        out = tmp_path / "out"
        assert run(["equilibria", "--scenario", str(path), "--out", str(out)]) == 2
        assert not out.exists()


class TestStability:
    def test_summary_rows(self, tmp_path):
        assert run(["stability", "--out", str(tmp_path)]) == 0
        text = (tmp_path / "default_stability.csv").read_text(encoding="utf-8")
        lines = text.strip("\n").split("\n")
        assert lines[0] == (
            "family,verdict,maxReLambda,R0,R1,R_IM,"
            "eigen_hurwitz_agree,theorem_eigen_agree,theta_in_spectrum"
        )
        assert len(lines) > 1
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[-1] == "true"           # -theta in the spectrum
            assert cells[6] in ("true", "na")    # eigen vs Hurwitz

    def test_chi_zero_r_im_column(self, tmp_path, base_scenario_doc, write_scenario):
        doc = base_scenario_doc
        doc["params"]["chi"] = 0.0
        doc["params"]["p_M"] = 0.05
        doc["label"] = "nochi"
        path = write_scenario(doc)
        assert run(["stability", "--scenario", path, "--out", str(tmp_path)]) == 0
        text = (tmp_path / "nochi_stability.csv").read_text(encoding="utf-8")
        for line in text.strip("\n").split("\n")[1:]:
            cells = line.split(",")
            if cells[0] in ("tumor_free", "dead1") and cells[5] != "nan":
                assert float(cells[5]) == 0.0


class TestSweepCommand:
    def test_sweep_csv_and_svg(self, tmp_path):
        assert run([
            "sweep", "--out", str(tmp_path), "--parameter", "k",
            "--min", "0", "--max", "1", "--count", "5", "--svg",
        ]) == 0
        text = (tmp_path / "default_sweep.csv").read_text(encoding="utf-8")
        sc = default_scenario()
        for line in text.strip("\n").split("\n")[1:]:
            cells = line.split(",")
            k = float(cells[1])
            assert float(cells[6]) == sc.params.p * (1.0 - k) / sc.params.theta
        assert (tmp_path / "default_sweep.svg").exists()

    def test_grid_outside_validity_exit_2(self, tmp_path):
        out = tmp_path / "out"
        assert run([
            "sweep", "--out", str(out), "--parameter", "k",
            "--min", "0", "--max", "2", "--count", "3",
        ]) == 2
        assert not out.exists()


class TestBifurcateCommand:
    def test_empty_result_json(self, tmp_path):
        assert run([
            "bifurcate", "--out", str(tmp_path), "--parameter", "v_M",
            "--min", "0.29", "--max", "0.31", "--scan-points", "4",
        ]) == 0
        doc = json.loads(
            (tmp_path / "default_bifurcation.json").read_text(encoding="utf-8")
        )
        assert isinstance(doc, list)


class TestValidateCommand:
    def test_exit_zero_and_deterministic(self, capsys):
        assert run(["validate", "--seed", "5"]) == 0
        first = capsys.readouterr().out
        assert run(["validate", "--seed", "5"]) == 0
        second = capsys.readouterr().out
        assert first == second
        assert "result: all suites passed" in first


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(["simulate", "--out", str(out)]) == 0
            assert run(["equilibria", "--out", str(out)]) == 0
            assert run(["stability", "--out", str(out)]) == 0
        for name in os.listdir(a):
            assert (a / name).read_bytes() == (b / name).read_bytes()
