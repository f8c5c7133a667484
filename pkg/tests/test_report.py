"""Tests for experiment reports."""

import json
import math

import numpy as np
import pytest

from bernstein_lab import __version__
from bernstein_lab.errors import InputError
from bernstein_lab.report import SCHEMA_VERSION, Report, ReportRenderer, encode, write_report


def sample_report():
    report = Report("hankel", parameters={"N": 8, "kappa": math.pi / 2})
    report.add("op_norm", 1.0)
    report.add("pairing", 0.5 + 0.25j, increment=1e-9, converged=True)
    report.tables["singular_values"] = [{"index": 1, "sigma": 1.0}, {"index": 2, "sigma": 0.5}]
    report.timing = 0.125
    return report


class TestEncode:
    """JSON-ready values."""

    def test_complex(self):
        assert encode(1 + 2j) == {"re": 1.0, "im": 2.0}

    def test_non_finite(self):
        assert encode(float("inf")) == "inf"
        assert encode(np.float64("nan")) == "nan"

    def test_arrays_and_numpy_scalars(self):
        assert encode(np.array([1.0, 2.0])) == [1.0, 2.0]
        assert encode(np.int64(3)) == 3

    def test_unknown_type(self):
        with pytest.raises(InputError):
            encode(object())


class TestReport:
    """Value bookkeeping and JSON output."""

    def test_divergent_flag(self):
        """Test failed convergence flags the value."""
        report = Report("bmoz")
        report.add("bmo", 1.0, increment=0.5, converged=False)
        assert report.flags == {"bmo": "divergent"}
        assert not report.ok

    def test_non_finite_flag(self):
        report = Report("interp")
        report.add("value", float("inf"))
        assert report.flags == {"value": "non-finite"}

    def test_json_schema(self):
        """Test the JSON layout and that timing is left out."""
        data = json.loads(sample_report().to_json())
        assert data["schema"] == SCHEMA_VERSION
        assert data["version"] == __version__
        assert data["values"]["pairing"] == {"re": 0.5, "im": 0.25}
        assert data["increments"] == {"pairing": 1e-9}
        assert "timing" not in data

    def test_json_is_deterministic(self):
        assert sample_report().to_json() == sample_report().to_json()

    def test_timing_on_request(self):
        assert sample_report().to_dict(include_timing=True)["timing"] == 0.125


class TestWriters:
    """Files on disk."""

    def test_json_file(self, tmp_path):
        [path] = write_report(sample_report(), tmp_path / "out" / "r.json")
        assert json.loads(path.read_text())["command"] == "hankel"

    def test_csv_with_tables(self, tmp_path):
        """Test scalars and each table get their own CSV."""
        paths = write_report(sample_report(), tmp_path / "r.csv", "csv")
        assert [p.name for p in paths] == ["r.csv", "r_singular_values.csv"]
        lines = paths[0].read_text().splitlines()
        assert lines[0] == "name,re,im,flag"
        assert "pairing,0.5,0.25," in lines
        assert paths[1].read_text().splitlines()[0] == "index,sigma"

    def test_csv_timing_row(self, tmp_path):
        [path, _] = write_report(sample_report(), tmp_path / "r.csv", "csv", include_timing=True)
        assert "timing,0.125,," in path.read_text().splitlines()

    def test_pdf_with_timing(self, tmp_path):
        """Test the PDF title block carries the wall-clock time on request."""
        story = ReportRenderer().build_story(sample_report(), include_timing=True)
        assert "wall-clock 0.125 s" in story[1].text
        [path] = write_report(sample_report(), tmp_path / "t.pdf", "pdf", include_timing=True)
        assert path.read_bytes().startswith(b"%PDF")

    def test_pdf(self, tmp_path):
        """Test a PDF is produced."""
        [path] = write_report(sample_report(), tmp_path / "r.pdf", "pdf")
        assert path.read_bytes().startswith(b"%PDF")

    def test_unknown_format(self, tmp_path):
        with pytest.raises(InputError):
            write_report(sample_report(), tmp_path / "r.xml", "xml")
