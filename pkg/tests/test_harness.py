"""Tests for experiment dispatch and the acceptance suite."""

import json
import logging
import math

import numpy as np
import pytest

from bernstein_lab.discrete_hardy import FiniteSequence
from bernstein_lab.errors import InputError
from bernstein_lab.fileio import write_sequence
from bernstein_lab.harness import COMMANDS, ExperimentConfig, emit, run
from bernstein_lab.suite import CRITERIA, run_suite


class TestExperimentConfig:
    """Validation of command configurations."""

    def test_unknown_command(self):
        with pytest.raises(InputError):
            ExperimentConfig("plot")

    def test_missing_input(self, tmp_path):
        """Test a missing input file is reported before any work."""
        with pytest.raises(FileNotFoundError, match="Input file not found"):
            ExperimentConfig("bmoz", inputs={"seq": tmp_path / "none.csv"})

    @pytest.mark.parametrize("alpha", [-0.1, 1.0, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(InputError):
            ExperimentConfig("talpha", alpha=alpha)

    def test_tolerance_positive(self):
        with pytest.raises(InputError):
            ExperimentConfig("hankel", tol=0.0)

    def test_unknown_profile(self):
        with pytest.raises(InputError):
            ExperimentConfig("suite", profile="huge")

    def test_required_input(self):
        """Test a command without its input names the missing flag."""
        with pytest.raises(InputError, match="--seq"):
            run(ExperimentConfig("bmoz"))

    def test_commands_cover_handlers(self):
        assert len(COMMANDS) == 13


class TestRun:
    """Commands end to end through the library."""

    def test_talpha_cosine(self, ones_file):
        """Test T_alpha of the constant sequence near the cosine identity."""
        config = ExperimentConfig("talpha", inputs={"seq": ones_file}, alpha=0.5, points=[0.3 + 0j])
        report = run(config)
        expected = np.exp(-0.5j * np.pi) * np.cos(np.pi * (0.3 - 0.5))
        assert abs(report.values["value"] - expected) < 5e-3
        assert report.values["lattice_residual"] < 1e-8

    def test_flags_are_logged(self, tmp_path, caplog):
        """Test a divergent quantity is flagged and logged."""
        path = tmp_path / "squares.csv"
        write_sequence(path, FiniteSequence.from_function(lambda n: n.astype(float) ** 2, 64))
        with caplog.at_level(logging.WARNING, logger="bernstein_lab.harness"):
            report = run(ExperimentConfig("bmoz", inputs={"seq": path}))
        assert not report.ok
        assert report.flags == {"summability": "divergent"}
        assert "summability (divergent)" in caplog.text

    def test_talpha_needs_points(self, ones_file):
        with pytest.raises(InputError):
            run(ExperimentConfig("talpha", inputs={"seq": ones_file}))

    def test_hankel_constant_symbol(self, one_symbol_file, tmp_path):
        """Test the symbol 1 has norm one and its matrix can be saved."""
        matrix = tmp_path / "m.csv"
        config = ExperimentConfig(
            "hankel",
            inputs={"symbol": one_symbol_file},
            N=8,
            options={"profile": True, "profile_N": [4, 8], "matrix_out": matrix},
        )
        report = run(config)
        assert report.values["op_norm"] == pytest.approx(1.0, abs=1e-10)
        assert len(report.tables["singular_values"]) == 17
        assert [row["k"] for row in report.tables["profile"]] == [1, 2]
        assert matrix.exists()

    def test_pairing_sinc(self, sinc_file):
        report = run(ExperimentConfig("pairing", inputs={"h": sinc_file, "f": sinc_file}))
        assert report.values["pairing"] == pytest.approx(1.0, abs=1e-12)
        assert "pairing" not in report.flags

    def test_bmoz_constant(self, ones_file):
        report = run(ExperimentConfig("bmoz", inputs={"seq": ones_file}))
        assert report.values["bmo_z"] == 0.0

    def test_clark_agrees(self, sinc_file):
        """Test the Clark and X_alpha norms are reported equal."""
        report = run(ExperimentConfig("clark", inputs={"f": sinc_file}, alpha=0.5))
        assert report.values["discrepancy"] < 1e-12
        assert report.values["total_mass"] == pytest.approx(9 / math.pi)

    def test_atoms(self, tmp_path):
        path = tmp_path / "atom.csv"
        path.write_text("n,re,im\n-1,0.25,0\n0,-0.5,0\n1,0.25,0\n")
        report = run(ExperimentConfig("atoms", inputs={"atom": path}))
        assert report.values["support_size"] == 3
        assert abs(report.values["edge_transform_plus"]) < 1e-6
        assert len(report.tables["b1_samples"]) == 3

    def test_unknown_projection_mode(self, tmp_path):
        grid = tmp_path / "g.csv"
        grid.write_text("x,re,im\n-1,0,0\n0,1,0\n1,0,0\n")
        (tmp_path / "g.json").write_text(json.dumps({"h": 1.0, "T": 1.0}))
        with pytest.raises(InputError):
            run(ExperimentConfig("project", inputs={"grid": grid}, options={"mode": "sideways"}))


class TestEmit:
    def test_requires_output_path(self, ones_file):
        config = ExperimentConfig("bmoz", inputs={"seq": ones_file})
        with pytest.raises(InputError):
            emit(run(config), config)

    def test_writes_json(self, ones_file, tmp_path):
        config = ExperimentConfig("bmoz", inputs={"seq": ones_file}, out=tmp_path / "r.json")
        [path] = emit(run(config), config)
        data = json.loads(path.read_text())
        assert data["command"] == "bmoz"
        assert "timing" not in data

    def test_timing_on_request(self, ones_file, tmp_path):
        """Test --timing writes the wall-clock seconds into the CSV scalars."""
        config = ExperimentConfig(
            "bmoz", inputs={"seq": ones_file}, out=tmp_path / "r.csv", format="csv", timing=True
        )
        [path] = emit(run(config), config)
        row = [line for line in path.read_text().splitlines() if line.startswith("timing,")]
        assert len(row) == 1
        assert float(row[0].split(",")[1]) >= 0.0


class TestSuite:
    """Acceptance criteria."""

    def test_registry(self):
        """Test criteria ids are unique and ordered."""
        ids = [cid for cid, _, _ in CRITERIA]
        assert ids == sorted(set(ids))
        assert ids[0] == "C01"

    def test_selected_criteria_pass(self):
        """Test the quick criteria pass on their own."""
        results = run_suite("fast", ["C01", "C05", "C08", "C12"])
        assert [r.id for r in results] == ["C01", "C05", "C08", "C12"]
        failed = [f"{r.id}: {r.detail}" for r in results if not r.passed]
        assert not failed

    def test_unknown_criterion(self):
        with pytest.raises(InputError):
            run_suite("fast", ["C99"])

    def test_unknown_level(self):
        with pytest.raises(InputError):
            run_suite("exhaustive")

    def test_suite_command_reports(self):
        report = run(ExperimentConfig("suite", options={"only": ["C01"]}))
        assert report.values["C01"] == "PASS"
        assert report.values["passed"] == 1
        assert report.ok

    @pytest.mark.parametrize("criterion", ["C05", "C06", "C09"])
    def test_norm_and_projection_criteria(self, criterion):
        """Test the criteria built on power iteration and oscillatory tails."""
        (result,) = run_suite("fast", [criterion])
        assert result.passed, result.detail

    def test_fast_suite(self):
        """Test every criterion passes at the fast level."""
        failed = [f"{r.id}: {r.detail}" for r in run_suite("fast") if not r.passed]
        assert not failed
