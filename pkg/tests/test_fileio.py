"""Tests for CSV data files and their JSON sidecars."""

import json
import math

import numpy as np
import pytest

from bernstein_lab.bandlimited import Band, LatticeOffset, SampledBandlimited
from bernstein_lab.discrete_hardy import FiniteSequence
from bernstein_lab.errors import InputError, NotMeanZero
from bernstein_lab.fileio import (
    parse_points,
    read_atom,
    read_grid,
    read_samples,
    read_sequence,
    read_symbol,
    sidecar_path,
    write_grid,
    write_matrix,
    write_samples,
    write_sequence,
    write_symbol,
)
from bernstein_lab.hankel import SymbolSpec, assemble
from bernstein_lab.projection import GridFunction, TailModel


class TestSequences:
    """``n,re,im`` files."""

    def test_write_then_read(self, tmp_path, random_sequence):
        a = random_sequence(5)
        path = write_sequence(tmp_path / "a.csv", a)
        np.testing.assert_array_equal(read_sequence(path).values, a.values)

    def test_missing_indices_are_zero(self, tmp_path):
        """Test a sparse file fills the window with zeros."""
        path = tmp_path / "sparse.csv"
        path.write_text("n,re,im\n-2,1,0\n1,0,3\n")
        a = read_sequence(path)
        assert a.N == 2
        np.testing.assert_array_equal(a.values, [1, 0, 0, 3j, 0])

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("k,value\n0,1\n")
        with pytest.raises(InputError):
            read_sequence(path)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("n,re,im\n0,one,0\n")
        with pytest.raises(InputError):
            read_sequence(path)

    def test_duplicate_index(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("n,re,im\n0,1,0\n0,2,0\n")
        with pytest.raises(InputError):
            read_sequence(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_sequence(tmp_path / "nowhere.csv")


class TestSamples:
    """Sample files with sidecars."""

    def test_sidecar_carries_parameters(self, tmp_path, random_samples):
        """Test band, offset and window survive a write and read."""
        s = random_samples(3, alpha=0.25, kappa=math.pi / 2)
        csv_path, json_path = write_samples(tmp_path / "s.csv", s)
        assert json_path == sidecar_path(csv_path)
        back = read_samples(csv_path)
        assert back.band.kappa == pytest.approx(math.pi / 2)
        assert back.offset.alpha == 0.25
        np.testing.assert_array_equal(back.samples, s.samples)

    def test_sidecar_wins_over_arguments(self, tmp_path, random_samples):
        csv_path, _ = write_samples(tmp_path / "s.csv", random_samples(2, alpha=0.5))
        assert read_samples(csv_path, kappa=2.0, alpha=0.1).offset.alpha == 0.5

    def test_without_sidecar(self, tmp_path):
        """Test flag values are used when no sidecar exists."""
        path = tmp_path / "bare.csv"
        path.write_text("n,re,im\n0,1,0\n")
        s = read_samples(path, kappa=2.0, alpha=0.3)
        assert s.band.kappa == 2.0
        assert s.offset.alpha == 0.3

    def test_malformed_sidecar(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("n,re,im\n0,1,0\n")
        (tmp_path / "s.json").write_text(json.dumps({"alpha": 0.0}))
        with pytest.raises(InputError):
            read_samples(path)


class TestAtoms:
    def test_read_atom(self, tmp_path):
        path = tmp_path / "atom.csv"
        path.write_text("n,re,im\n3,-0.5,0\n2,0.5,0\n")
        atom = read_atom(path)
        assert list(atom.support) == [2, 3]

    def test_atom_validation_applies(self, tmp_path):
        path = tmp_path / "atom.csv"
        path.write_text("n,re,im\n0,0.5,0\n1,0.25,0\n")
        with pytest.raises(NotMeanZero):
            read_atom(path)

    def test_empty_atom(self, tmp_path):
        path = tmp_path / "atom.csv"
        path.write_text("n,re,im\n")
        with pytest.raises(InputError):
            read_atom(path)


class TestGrids:
    """Tabulated symbols."""

    def test_write_then_read(self, tmp_path):
        g = GridFunction.from_callable(np.cos, 0.25, 2.0, TailModel.bounded(1.0))
        csv_path, _ = write_grid(tmp_path / "g.csv", g)
        back = read_grid(csv_path)
        assert back.h == 0.25
        assert back.tail.kind == "bounded"
        np.testing.assert_allclose(back.values, g.values)

    def test_irregular_abscissae(self, tmp_path):
        """Test abscissae off the k*h lattice are rejected."""
        path = tmp_path / "g.csv"
        path.write_text("x,re,im\n-1,0,0\n0.1,0,0\n1,0,0\n")
        (tmp_path / "g.json").write_text(json.dumps({"h": 1.0, "T": 1.0}))
        with pytest.raises(InputError):
            read_grid(path)

    def test_sidecar_required(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("x,re,im\n0,1,0\n")
        with pytest.raises(FileNotFoundError):
            read_grid(path)


class TestSymbols:
    """Symbol files."""

    def test_trig(self, one_symbol_file):
        phi = read_symbol(one_symbol_file)
        assert phi.kind == "trig"
        assert phi.terms == ((0.0, 1.0 + 0j),)

    def test_grid_reference(self, tmp_path):
        """Test grid symbols resolve their CSV beside the symbol file."""
        g = GridFunction.from_callable(np.cos, 0.25, 2.0, TailModel.bounded(1.0))
        path = write_symbol(tmp_path / "phi.json", SymbolSpec.from_grid(g))
        assert (tmp_path / "phi_grid.csv").exists()
        phi = read_symbol(path)
        assert phi.kind == "grid"
        np.testing.assert_allclose(phi.grid.values, g.values)

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "phi.json"
        path.write_text(json.dumps({"kind": "wavelet"}))
        with pytest.raises(InputError):
            read_symbol(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "phi.json"
        path.write_text("{not json")
        with pytest.raises(InputError):
            read_symbol(path)


class TestMatrixAndPoints:
    def test_matrix_rows(self, tmp_path):
        """Test one row per entry in row-major order."""
        M = assemble(SymbolSpec.constant(), Band(math.pi / 2), 1)
        lines = write_matrix(tmp_path / "m.csv", M).read_text().splitlines()
        assert lines[0] == "j,k,re,im"
        assert len(lines) == 1 + 9
        assert lines[1].startswith("-1,-1,")

    @pytest.mark.parametrize(
        "raw,expected",
        [
            (["0.3"], [0.3]),
            (["1.7+0.5j"], [1.7 + 0.5j]),
            (["-2i"], [-2j]),
            (["0.1, 0.2"], [0.1, 0.2]),
        ],
    )
    def test_parse_points(self, raw, expected):
        assert parse_points(raw) == expected

    def test_unparseable_point(self):
        with pytest.raises(InputError):
            parse_points(["north"])

    def test_non_finite_point(self):
        with pytest.raises(InputError):
            parse_points(["inf"])
