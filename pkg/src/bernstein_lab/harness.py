"""Experiment configuration and dispatch.

Every command reads its inputs, runs one computation and fills a
:class:`~bernstein_lab.report.Report`. The command line and the test suite
both go through :func:`run`.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from .bandlimited import (
    Band,
    LatticeOffset,
    growth_ratio_Y,
    interpolate,
    pw_norm,
    satisfies_growth_condition,
)
from .discrete_hardy import (
    atom_edge_transform,
    atom_to_b1,
    bmo_z_norm,
    discrete_hilbert,
    h1_norm,
    shift_defect,
    summability_check,
)
from .dual_map import (
    XAlphaElement,
    bmo_clark_norm,
    clark_measure,
    duality_ratio,
    pairing_discrete,
    t_alpha,
    x_alpha_norm,
)
from .errors import InputError
from .fileio import read_atom, read_grid, read_samples, read_sequence, read_symbol, write_matrix
from .hankel import (
    DEFAULT_KAPPA,
    assemble,
    band_reduce,
    compactness_profile,
    frobenius_norm,
    op_norm,
    rochberg_quantities,
    rochberg_split,
)
from .numerics import singular_values
from .profiles import Profile, get_profile
from .projection import (
    analytic_project,
    bmo_r_norm,
    bmoe_norm,
    mod_out_exponentials,
    project_l2,
    project_linf,
    vmo_profile,
)
from .report import FORMATS, Report, write_report
from .suite import LEVELS, run_suite

log = logging.getLogger(__name__)

COMMANDS = (
    "interp", "project", "bmo", "bmoz", "dhilbert", "talpha", "pairing",
    "clark", "hankel", "rochberg", "vmo", "atoms", "suite",
)
PROJECT_MODES = ("l2", "linf", "plus", "minus")
DEFAULT_LINF_POINTS = tuple(0.5 * k for k in range(-8, 9))


@dataclass
class ExperimentConfig:
    """One command with its inputs and parameters.

    ``inputs`` maps input names (``seq``, ``samples``, ``grid``, ``symbol``,
    ``h``, ``f``, ``atom``) to files. ``options`` carries command-specific
    settings such as the projection mode or the scales of a VMO profile.
    """

    command: str
    inputs: Dict[str, Path] = field(default_factory=dict)
    alpha: float = 0.0
    kappa: Optional[float] = None
    N: Optional[int] = None
    tol: Optional[float] = None
    points: List[complex] = field(default_factory=list)
    options: Dict[str, Any] = field(default_factory=dict)
    out: Optional[Path] = None
    format: str = "json"
    profile: str = "fast"
    timing: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise InputError(f"unknown output format {self.format!r}; expected one of {FORMATS}")
        if self.profile not in LEVELS:
            raise InputError(f"unknown profile {self.profile!r}; expected one of {LEVELS}")
        self.inputs = {name: Path(p) for name, p in self.inputs.items()}
        for p in self.inputs.values():
            if not p.exists():
                raise FileNotFoundError(f"Input file not found: {p}")
        LatticeOffset(self.alpha)
        if self.kappa is not None:
            Band(self.kappa)
        if self.N is not None and self.N < 0:
            raise InputError(f"--N must be nonnegative, got {self.N}")
        if self.tol is not None and not (math.isfinite(self.tol) and self.tol > 0):
            raise InputError(f"--tol must be positive, got {self.tol}")
        if self.out is not None:
            self.out = Path(self.out)

    @property
    def offset(self) -> LatticeOffset:
        return LatticeOffset(self.alpha)

    @property
    def settings(self) -> Profile:
        return get_profile(self.profile)

    @property
    def spec(self):
        return self.settings.quadrature_spec(self.tol)

    def require(self, name: str) -> Path:
        if name not in self.inputs:
            raise InputError(f"{self.command} needs --{name}")
        return self.inputs[name]

    def parameters(self) -> Dict[str, Any]:
        """Echo of the configuration for the report; paths as given."""
        return {
            "alpha": self.alpha,
            "kappa": self.kappa,
            "N": self.N,
            "tol": self.tol,
            "profile": self.profile,
            "inputs": {name: str(p) for name, p in sorted(self.inputs.items())},
            "points": list(self.points),
            "options": {k: _echo(v) for k, v in sorted(self.options.items())},
        }


def _echo(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return list(value)
    return value


def _point_rows(points: Sequence[complex], values: np.ndarray) -> List[Dict[str, float]]:
    return [
        {"z_re": float(z.real), "z_im": float(z.imag), "re": float(v.real), "im": float(v.imag)}
        for z, v in zip(points, np.asarray(values, dtype=complex).reshape(-1))
    ]


def _index_rows(indices: np.ndarray, values: np.ndarray) -> List[Dict[str, float]]:
    return [{"n": int(n), "re": float(v.real), "im": float(v.imag)} for n, v in zip(indices, values)]


def _require_points(config: ExperimentConfig) -> np.ndarray:
    if not config.points:
        raise InputError(f"{config.command} needs at least one --z point")
    return np.asarray(config.points, dtype=complex)


def _add_point_values(report: Report, points: Sequence[complex], values: np.ndarray) -> None:
    values = np.asarray(values, dtype=complex).reshape(-1)
    report.tables["values"] = _point_rows(points, values)
    if values.size == 1:
        report.add("value", complex(values[0]))


def _interp(config: ExperimentConfig, report: Report) -> None:
    s = read_samples(config.require("samples"), config.kappa, config.alpha)
    z = _require_points(config)
    _add_point_values(report, config.points, interpolate(s, z))
    report.add("pw_norm", pw_norm(s))
    report.add("window", s.N)
    ys = config.options.get("growth")
    if ys:
        ratios = growth_ratio_Y(s, ys)
        report.tables["growth"] = [{"y": float(y), "log_ratio": float(r)} for y, r in zip(ys, ratios)]
        report.add("growth_condition", satisfies_growth_condition(ratios))


def _project(config: ExperimentConfig, report: Report) -> None:
    g = read_grid(config.require("grid"))
    mode = config.options.get("mode", "l2")
    if mode not in PROJECT_MODES:
        raise InputError(f"unknown projection mode {mode!r}; expected one of {PROJECT_MODES}")
    if mode == "l2":
        band = Band(math.pi if config.kappa is None else config.kappa)
        s = project_l2(g, band, config.offset, config.N, config.spec)
        report.tables["samples"] = _index_rows(s.indices, s.samples)
        report.add("pw_norm", pw_norm(s))
        report.add("window", s.N)
    elif mode == "linf":
        points = config.points or [complex(x) for x in DEFAULT_LINF_POINTS]
        values = project_linf(g, np.asarray(points, dtype=complex), config.options.get("R"), config.spec)
        _add_point_values(report, points, values)
        real = np.asarray([z.real for z in points])
        if len(points) >= 3 and all(z.imag == 0 for z in points):
            _, (c_plus, c_minus) = mod_out_exponentials(values, real)
            report.add("c_plus", c_plus)
            report.add("c_minus", c_minus)
    else:
        p = analytic_project(g, "+" if mode == "plus" else "-", config.spec)
        report.tables["values"] = [
            {"x": float(x), "re": float(v.real), "im": float(v.imag)} for x, v in zip(p.x, p.values)
        ]
        report.add("sup", p.sup_norm())
        report.add("bmo", bmo_r_norm(p).value)


def _bmo(config: ExperimentConfig, report: Report) -> None:
    if "grid" in config.inputs:
        estimate = bmo_r_norm(read_grid(config.inputs["grid"]))
        report.add("bmo", estimate.value)
        report.add("finest_scale", estimate.finest_scale)
        report.add("coarsest_scale", estimate.coarsest_scale)
    elif "samples" in config.inputs:
        s = read_samples(config.inputs["samples"], config.kappa, config.alpha)
        h = config.options.get("h") or config.settings.window('grid_step')
        report.add("bmoe", bmoe_norm(s, h=h, rounds=config.settings.limits['minimizer_rounds']))
    else:
        raise InputError("bmo needs --grid or --samples")


def _bmoz(config: ExperimentConfig, report: Report) -> None:
    a = read_sequence(config.require("seq"), config.N)
    report.add("bmo_z", bmo_z_norm(a))
    check = summability_check(a)
    report.add("summability", check.value, check.increment, check.converged)


def _dhilbert(config: ExperimentConfig, report: Report) -> None:
    a = read_sequence(config.require("seq"))
    transformed = discrete_hilbert(a, config.offset, config.N)
    report.tables["transform"] = _index_rows(transformed.indices, transformed.values)
    h1 = h1_norm(a, config.offset)
    report.add("h1_norm", h1.value, h1.increment, h1.converged)
    if 0.0 < config.alpha < 1.0:
        window = max(256, 4 * (a.N + 16))
        report.add("shift_defect", shift_defect(a, config.offset, window, central=16))


def _talpha(config: ExperimentConfig, report: Report) -> None:
    a = read_sequence(config.require("seq"), config.N)
    z = _require_points(config)
    _add_point_values(report, config.points, t_alpha(a, config.offset, z))
    p = a.indices + config.alpha
    lattice = np.exp(1j * np.pi * p) * t_alpha(a, config.offset, p)
    report.add("lattice_residual", float(np.max(np.abs(lattice - a.values))))


def _pairing(config: ExperimentConfig, report: Report) -> None:
    h = read_samples(config.require("h"), config.kappa)
    f = XAlphaElement.from_sampled(read_samples(config.require("f"), config.kappa))
    N = config.N if config.N is not None else max(h.N, f.N, 16)
    pairing = pairing_discrete(h, f, config.offset, N)
    report.add("pairing", pairing.value, pairing.increment, pairing.converged)
    report.add("duality_ratio", duality_ratio(h, f, config.offset, N))


def _clark(config: ExperimentConfig, report: Report) -> None:
    s = read_samples(config.require("f"), config.kappa)
    sampled = XAlphaElement.from_sampled(s)
    N = config.N if config.N is not None else s.N
    f = XAlphaElement.from_callable(sampled.evaluator, config.offset, N, "sampled")
    measure = clark_measure(config.offset, N)
    clark = bmo_clark_norm(f)
    direct = x_alpha_norm(f)
    report.add("bmo_clark", clark)
    report.add("x_alpha", direct)
    report.add("discrepancy", abs(clark - direct))
    report.add("total_mass", measure.total_mass)


def _band(config: ExperimentConfig) -> Band:
    return Band(DEFAULT_KAPPA if config.kappa is None else config.kappa)


def _hankel(config: ExperimentConfig, report: Report) -> None:
    phi = read_symbol(config.require("symbol"))
    band = _band(config)
    M = assemble(phi, band, 16 if config.N is None else config.N)
    report.add("op_norm", op_norm(M, config.settings.limits['power_iterations']))
    report.add("frobenius_norm", frobenius_norm(M))
    report.add("asymmetry", M.asymmetry)
    report.add("tail_bound", M.tail_bound)
    report.add("sup_bound", phi.sup_bound())
    report.tables["singular_values"] = [
        {"index": i + 1, "sigma": float(s)} for i, s in enumerate(singular_values(M.entries))
    ]
    if config.options.get("profile"):
        N_list = config.options.get("profile_N") or config.settings.window('hankel_N')
        report.tables["profile"] = [
            {"N": row.N, "k": row.k, "sigma_k": row.sigma_k} for row in compactness_profile(phi, band, N_list)
        ]
    matrix_out = config.options.get("matrix_out")
    if matrix_out:
        write_matrix(matrix_out, M)


def _rochberg(config: ExperimentConfig, report: Report) -> None:
    band = _band(config)
    reduced = band_reduce(read_symbol(config.require("symbol")), band)
    h = config.options.get("h") or config.settings.window('grid_step')
    quantities = rochberg_quantities(rochberg_split(reduced, band), h=h, spec=config.spec)
    norm = op_norm(assemble(reduced, band, 16 if config.N is None else config.N))
    report.add("q_L", quantities.q_L)
    report.add("q_C", quantities.q_C)
    report.add("q_R", quantities.q_R)
    report.add("q_total", quantities.total)
    report.add("op_norm", norm)
    if quantities.total > 0:
        report.add("norm_ratio", norm / quantities.total)


def _vmo(config: ExperimentConfig, report: Report) -> None:
    g = read_grid(config.require("grid"))
    deltas = config.options.get("deltas")
    if not deltas:
        deltas = [2 * g.h * 2 ** k for k in range(int(math.log2(g.extent / g.h)))]
    profile = vmo_profile(g, deltas)
    report.tables["profile"] = [{"delta": float(d), "oscillation": float(o)} for d, o in zip(deltas, profile)]
    report.add("bmo", bmo_r_norm(g).value)
    report.add("finest_oscillation", profile[0])


def _atoms(config: ExperimentConfig, report: Report) -> None:
    atom = read_atom(config.require("atom"))
    s = atom_to_b1(atom)
    report.tables["b1_samples"] = _index_rows(s.indices, s.samples)
    report.add("support_size", len(atom.support))
    report.add("pw_norm", pw_norm(s))
    report.add("edge_transform_plus", atom_edge_transform(atom, 1, config.spec))
    report.add("edge_transform_minus", atom_edge_transform(atom, -1, config.spec))
    h1 = h1_norm(atom.as_sequence(), config.offset)
    report.add("h1_norm", h1.value, h1.increment, h1.converged)


def _suite(config: ExperimentConfig, report: Report) -> None:
    level = config.options.get("level", config.profile)
    results = run_suite(level, config.options.get("only"))
    for result in results:
        report.add(result.id, "PASS" if result.passed else "FAIL")
        if not result.passed:
            report.flags[result.id] = "failed"
    report.tables["criteria"] = [
        {"id": r.id, "name": r.name, "status": "PASS" if r.passed else "FAIL", "detail": r.detail} for r in results
    ]
    report.add("passed", sum(r.passed for r in results))
    report.add("failed", sum(not r.passed for r in results))


HANDLERS: Dict[str, Callable[[ExperimentConfig, Report], None]] = {
    "interp": _interp,
    "project": _project,
    "bmo": _bmo,
    "bmoz": _bmoz,
    "dhilbert": _dhilbert,
    "talpha": _talpha,
    "pairing": _pairing,
    "clark": _clark,
    "hankel": _hankel,
    "rochberg": _rochberg,
    "vmo": _vmo,
    "atoms": _atoms,
    "suite": _suite,
}


def run(config: ExperimentConfig) -> Report:
    """Run one command and return its report; errors propagate to the caller."""
    report = Report(config.command, config.parameters())
    start = time.perf_counter()
    HANDLERS[config.command](config, report)
    report.timing = time.perf_counter() - start
    log.info("%s finished in %.3f s", config.command, report.timing)
    if not report.ok:
        log.warning("%s flagged %s", config.command, ", ".join(f"{k} ({v})" for k, v in sorted(report.flags.items())))
    return report


def emit(report: Report, config: ExperimentConfig) -> List[Path]:
    """Write the report to ``config.out`` in ``config.format``."""
    if config.out is None:
        raise InputError("no output path configured")
    return write_report(report, config.out, config.format, include_timing=config.timing)
