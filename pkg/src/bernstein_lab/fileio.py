"""CSV data files with JSON sidecars.

Sequences and samples: ``n,re,im``. Grid functions: ``x,re,im``. Matrices:
``j,k,re,im``. Parameters travel in ``<file>.json`` next to the CSV.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bandlimited import Band, LatticeOffset, SampledBandlimited
from .discrete_hardy import DiscreteAtom, FiniteSequence, make_atom
from .errors import InputError
from .hankel import HankelMatrix, SymbolSpec
from .numerics import Interval
from .projection import GridFunction, TailModel

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

INDEX_HEADER = ["n", "re", "im"]
GRID_HEADER = ["x", "re", "im"]
MATRIX_HEADER = ["j", "k", "re", "im"]


def sidecar_path(path: PathLike) -> Path:
    """``data.csv`` -> ``data.json``."""
    return Path(path).with_suffix(".json")


def _require(path: PathLike) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"Input file not found: {p}")
    return p


def _read_rows(path: PathLike, header: Sequence[str]) -> List[List[float]]:
    p = _require(path)
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise InputError(f"{p} is empty") from None
        if [h.strip() for h in first] != list(header):
            raise InputError(f"{p}: expected header {','.join(header)}, got {','.join(first)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{p}:{lineno}: expected {len(header)} columns, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise InputError(f"{p}:{lineno}: non-numeric value in {row}") from None
    return rows


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return p


def _read_json(path: PathLike) -> Dict[str, Any]:
    p = _require(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InputError(f"{p}: expected a JSON object")
    return data


def _write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return p


def _indexed_values(rows: List[List[float]], path: PathLike) -> Dict[int, complex]:
    entries: Dict[int, complex] = {}
    for n, re, im in rows:
        if n != int(n):
            raise InputError(f"{path}: index {n} is not an integer")
        if int(n) in entries:
            raise InputError(f"{path}: index {int(n)} appears twice")
        entries[int(n)] = complex(re, im)
    return entries


def read_sequence(path: PathLike, N: Optional[int] = None) -> FiniteSequence:
    """Sequence from ``n,re,im`` rows; missing indices are zero."""
    entries = _indexed_values(_read_rows(path, INDEX_HEADER), path)
    return FiniteSequence.from_mapping(entries, N)


def write_sequence(path: PathLike, a: FiniteSequence) -> Path:
    return _write_rows(
        path, INDEX_HEADER, ((int(n), float(v.real), float(v.imag)) for n, v in zip(a.indices, a.values))
    )


def read_atom(path: PathLike) -> DiscreteAtom:
    """Atom from ``n,re,im`` rows listing every support point, zeros included."""
    entries = _indexed_values(_read_rows(path, INDEX_HEADER), path)
    if not entries:
        raise InputError(f"{path}: an atom needs at least one row")
    support = sorted(entries)
    return make_atom(support, [entries[n] for n in support])


def read_samples(path: PathLike, kappa: Optional[float] = None, alpha: Optional[float] = None) -> SampledBandlimited:
    """Samples from ``n,re,im`` rows with ``kappa``, ``alpha``, ``N`` from the sidecar.

    Without a sidecar the given ``kappa`` and ``alpha`` are used (defaults
    pi and 0) and the window is the smallest one covering the rows.
    """
    entries = _indexed_values(_read_rows(path, INDEX_HEADER), path)
    side = sidecar_path(path)
    N = None
    if side.exists():
        meta = _read_json(side)
        try:
            kappa = float(meta["kappa"])
            alpha = float(meta.get("alpha", 0.0))
            N = int(meta["N"]) if "N" in meta else None
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{side}: malformed sidecar ({exc})") from None
    seq = FiniteSequence.from_mapping(entries, N)
    band = Band(math.pi if kappa is None else kappa)
    return SampledBandlimited(band, LatticeOffset(0.0 if alpha is None else alpha), seq.values)


def write_samples(path: PathLike, s: SampledBandlimited) -> Tuple[Path, Path]:
    csv_path = _write_rows(
        path, INDEX_HEADER, ((int(n), float(v.real), float(v.imag)) for n, v in zip(s.indices, s.samples))
    )
    meta = {"kappa": s.band.kappa, "alpha": s.offset.alpha, "N": s.N}
    return csv_path, _write_json(sidecar_path(path), meta)


def _tail_from_json(data: Any, where: Path) -> TailModel:
    if data is None:
        return TailModel()
    if not isinstance(data, dict):
        raise InputError(f"{where}: tail must be an object with kind and constant")
    try:
        return TailModel(str(data.get("kind", "none")), float(data.get("constant", 0.0)))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: malformed tail ({exc})") from None


def read_grid(path: PathLike) -> GridFunction:
    """Grid function from ``x,re,im`` rows and an ``h``/``T``/``tail`` sidecar."""
    rows = _read_rows(path, GRID_HEADER)
    side = sidecar_path(path)
    meta = _read_json(side)
    try:
        h, T = float(meta["h"]), float(meta["T"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{side}: sidecar needs numeric h and T ({exc})") from None
    data = np.array(rows, dtype=float).reshape(-1, 3)
    order = np.argsort(data[:, 0], kind="stable")
    data = data[order]
    K = int(math.floor(T / h + 1e-9))
    expected = np.arange(-K, K + 1) * h
    if data.shape[0] != expected.size or not np.allclose(data[:, 0], expected, rtol=0, atol=1e-9 * max(1.0, T)):
        raise InputError(f"{path}: abscissae must be k*h for |k*h| <= T (h={h}, T={T})")
    return GridFunction(h, T, data[:, 1] + 1j * data[:, 2], _tail_from_json(meta.get("tail"), side))


def write_grid(path: PathLike, g: GridFunction) -> Tuple[Path, Path]:
    csv_path = _write_rows(
        path, GRID_HEADER, ((float(x), float(v.real), float(v.imag)) for x, v in zip(g.x, g.values))
    )
    meta = {"h": g.h, "T": g.T, "tail": {"kind": g.tail.kind, "constant": g.tail.constant}}
    return csv_path, _write_json(sidecar_path(path), meta)


def read_symbol(path: PathLike) -> SymbolSpec:
    """``{"kind": "trig", "terms": [[freq, re, im], ...]}`` or ``{"kind": "grid", "grid": "file.csv"}``.

    Grid paths are resolved relative to the symbol file. An optional
    ``"support": [lo, hi]`` declares the spectral support.
    """
    p = Path(path)
    data = _read_json(p)
    kind = data.get("kind")
    support = None
    if "support" in data:
        try:
            lo, hi = (float(v) for v in data["support"])
        except (TypeError, ValueError) as exc:
            raise InputError(f"{p}: support must be [lo, hi] ({exc})") from None
        support = Interval(lo, hi)
    if kind == "trig":
        terms = data.get("terms")
        if not isinstance(terms, list):
            raise InputError(f"{p}: trig symbols need a list of [freq, re, im] terms")
        try:
            parsed = [(float(f), complex(float(re), float(im))) for f, re, im in terms]
        except (TypeError, ValueError) as exc:
            raise InputError(f"{p}: malformed term ({exc})") from None
        return SymbolSpec.trig(parsed)
    if kind == "grid":
        ref = data.get("grid")
        if not isinstance(ref, str):
            raise InputError(f"{p}: grid symbols need a \"grid\" CSV path")
        return SymbolSpec.from_grid(read_grid(p.parent / ref), support)
    raise InputError(f"{p}: unknown symbol kind {kind!r}")


def write_symbol(path: PathLike, phi: SymbolSpec) -> Path:
    """Write a symbol file; grid data goes to ``<stem>_grid.csv`` beside it."""
    p = Path(path)
    data: Dict[str, Any] = {"kind": phi.kind}
    if phi.kind == "trig":
        data["terms"] = [[f, c.real, c.imag] for f, c in phi.terms]
    else:
        assert phi.grid is not None
        grid_path = p.with_name(f"{p.stem}_grid.csv")
        write_grid(grid_path, phi.grid)
        data["grid"] = grid_path.name
    if phi.support is not None:
        data["support"] = [phi.support.lo, phi.support.hi]
    return _write_json(p, data)


def write_matrix(path: PathLike, M: HankelMatrix) -> Path:
    return _write_rows(path, MATRIX_HEADER, M.rows())


def parse_points(values: Sequence[str]) -> List[complex]:
    """Points given as ``0.3``, ``1.7+0.5j`` or ``-2j``."""
    points = []
    for raw in values:
        for token in str(raw).split(","):
            token = token.strip().replace(" ", "").replace("i", "j")
            if not token:
                continue
            try:
                z = complex(token)
            except ValueError:
                raise InputError(f"cannot parse point {token!r}") from None
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise InputError(f"point {token!r} is not finite")
            points.append(z)
    return points
