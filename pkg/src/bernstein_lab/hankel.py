"""Truncated Hankel operators on Paley-Wiener spaces.

The operator ``H_phi f = P_kappa(phi * conj(f))`` is represented in the real
orthonormal basis ``e_n(x) = sqrt(kappa/pi) sinc((kappa/pi) x - n)`` by the
complex-symmetric matrix ``M_jk = int phi e_j e_k``; applying it means
``M @ conj(coefficients)``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson

from .bandlimited import Band, SampledBandlimited, interpolate, pw_norm, sinc
from .errors import InputError, PrecondViolated, UnknownSpectrum, WindowMismatch
from .numerics import Interval, QuadratureSpec, integrate, integrate_tail, singular_values, top_singular_value
from .projection import GridFunction, TailModel, analytic_project, bmo_r_norm

log = logging.getLogger(__name__)

DEFAULT_KAPPA = math.pi / 2
SYMBOL_KINDS = ("trig", "grid")
FREQ_TOL = 1e-12
# Grid symbols must resolve the band to this many frequency bins.
MIN_BINS_PER_KAPPA = 8


@dataclass(frozen=True, eq=False)
class SymbolSpec:
    """A trigonometric polynomial ``sum c e^{i w x}`` or a tabulated symbol."""

    kind: str
    terms: Tuple[Tuple[float, complex], ...] = ()
    grid: Optional[GridFunction] = field(default=None, repr=False)
    support: Optional[Interval] = None

    def __post_init__(self) -> None:
        if self.kind not in SYMBOL_KINDS:
            raise InputError(f"unknown symbol kind {self.kind!r}; expected one of {SYMBOL_KINDS}")
        if self.kind == "grid":
            if self.grid is None:
                raise InputError("grid symbols need a GridFunction")
            if self.grid.tail.kind == "none":
                raise InputError("grid symbols must declare a tail model")
        for freq, _ in self.terms:
            if not math.isfinite(freq):
                raise InputError(f"frequencies must be finite, got {freq}")

    @classmethod
    def trig(cls, terms: Sequence[Tuple[float, complex]]) -> "SymbolSpec":
        """Merge equal frequencies and drop zero coefficients."""
        merged: Dict[float, complex] = {}
        for freq, coef in terms:
            key = float(freq)
            merged[key] = merged.get(key, 0j) + complex(coef)
        kept = tuple(sorted((f, c) for f, c in merged.items() if c != 0))
        support = Interval(kept[0][0], kept[-1][0]) if len(kept) > 1 and kept[0][0] < kept[-1][0] else None
        return cls("trig", kept, support=support)

    @classmethod
    def constant(cls, c: complex = 1.0) -> "SymbolSpec":
        return cls.trig([(0.0, c)])

    @classmethod
    def from_grid(cls, g: GridFunction, support: Optional[Interval] = None) -> "SymbolSpec":
        return cls("grid", grid=g, support=support)

    @property
    def frequencies(self) -> List[float]:
        return [f for f, _ in self.terms]

    def evaluate(self, x: ArrayLike) -> NDArray[np.complex128]:
        xs = np.asarray(x, dtype=float)
        if self.kind == "grid":
            assert self.grid is not None
            return self.grid(xs)
        out = np.zeros(xs.shape, dtype=complex)
        for freq, coef in self.terms:
            out += coef * np.exp(1j * freq * xs)
        return out

    __call__ = evaluate

    def sup_bound(self) -> float:
        """Upper bound for ``sup |phi|``."""
        if self.kind == "grid":
            assert self.grid is not None
            return max(self.grid.sup_norm(), self.grid.tail.constant if self.grid.tail.kind == "bounded" else 0.0)
        return math.fsum(abs(c) for _, c in self.terms)

    def scaled(self, c: complex) -> "SymbolSpec":
        if self.kind == "grid":
            assert self.grid is not None
            g = self.grid
            tail = TailModel(g.tail.kind, abs(c) * g.tail.constant)
            return SymbolSpec.from_grid(g.with_values(c * g.values, tail), self.support)
        return SymbolSpec.trig([(f, c * v) for f, v in self.terms])

    def __add__(self, other: "SymbolSpec") -> "SymbolSpec":
        if self.kind == "trig" and other.kind == "trig":
            return SymbolSpec.trig(list(self.terms) + list(other.terms))
        if self.kind == "grid" and other.kind == "grid":
            assert self.grid is not None and other.grid is not None
            a, b = self.grid, other.grid
            if not (math.isclose(a.h, b.h) and a.K == b.K):
                raise WindowMismatch("grid symbols must share step and extent to be added")
            kind = "bounded" if "bounded" in (a.tail.kind, b.tail.kind) else "decay"
            tail = TailModel(kind, a.tail.constant + b.tail.constant)
            return SymbolSpec.from_grid(a.with_values(a.values + b.values, tail))
        raise InputError("cannot add a trigonometric symbol to a tabulated one")


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    """``M_jk`` for ``|j|, |k| <= N`` in the basis of ``band``."""

    band: Band
    N: int
    entries: NDArray[np.complex128] = field(repr=False)
    asymmetry: float = 0.0
    tail_bound: float = 0.0

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        size = 2 * self.N + 1
        if entries.shape != (size, size):
            raise InputError(f"expected a {size}x{size} matrix, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InputError("matrix entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def indices(self) -> NDArray[np.int64]:
        return np.arange(-self.N, self.N + 1)

    def rows(self) -> Iterator[Tuple[int, int, float, float]]:
        """``(j, k, re, im)`` in row-major order."""
        idx = self.indices
        for a, j in enumerate(idx):
            for b, k in enumerate(idx):
                v = self.entries[a, b]
                yield int(j), int(k), float(v.real), float(v.imag)


def _clip_to_band(terms: Sequence[Tuple[float, complex]], limit: float) -> List[Tuple[float, complex]]:
    return [(f, c) for f, c in terms if abs(f) <= limit + FREQ_TOL]


def _grid_frequencies(g: GridFunction) -> NDArray[np.float64]:
    return 2 * np.pi * scipy.fft.fftfreq(g.values.size, d=g.h)


def _check_resolution(g: GridFunction, band: Band) -> None:
    nyquist = math.pi / g.h
    if nyquist <= 2 * band.kappa:
        raise UnknownSpectrum(f"grid step {g.h} cannot resolve frequencies up to {2 * band.kappa:.6g}")
    resolution = 2 * math.pi / (g.values.size * g.h)
    if resolution * MIN_BINS_PER_KAPPA > band.kappa:
        raise UnknownSpectrum(
            f"grid extent {g.extent} gives frequency bins of {resolution:.3g}; "
            f"need at most {band.kappa / MIN_BINS_PER_KAPPA:.3g}"
        )


def _masked(g: GridFunction, mask: NDArray[np.float64]) -> GridFunction:
    values = scipy.fft.ifft(scipy.fft.fft(g.values) * mask)
    bound = max(float(np.max(np.abs(values))), g.tail.constant if g.tail.kind == "bounded" else 0.0)
    return GridFunction(g.h, g.T, values, TailModel.bounded(bound))


def band_reduce(phi: SymbolSpec, band: Band = Band(DEFAULT_KAPPA)) -> SymbolSpec:
    """Clip the spectrum of ``phi`` to ``[-2 kappa, 2 kappa]``; the Hankel operator is unchanged."""
    limit = 2 * band.kappa
    if phi.kind == "trig":
        return SymbolSpec.trig(_clip_to_band(phi.terms, limit))
    assert phi.grid is not None
    if phi.support is not None and -limit <= phi.support.lo and phi.support.hi <= limit:
        return phi
    _check_resolution(phi.grid, band)
    mask = (np.abs(_grid_frequencies(phi.grid)) <= limit + FREQ_TOL).astype(float)
    return SymbolSpec.from_grid(_masked(phi.grid, mask), Interval(-limit, limit))


def _basis(band: Band, N: int, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Columns ``e_n(x)`` for ``|n| <= N``."""
    scale = band.kappa / math.pi
    n = np.arange(-N, N + 1)
    return math.sqrt(scale) * np.asarray(sinc(scale * x[:, None] - n[None, :]))


def _trig_entries(terms: Sequence[Tuple[float, complex]], band: Band, N: int) -> NDArray[np.complex128]:
    """``int e^{i w x} e_j e_k dx = (1/2 kappa) e^{i w j pi/kappa} int_lo^hi e^{-i pi (j-k) xi/kappa} dxi``

    over ``[lo, hi] = [-kappa, kappa] ∩ [w - kappa, w + kappa]``.
    """
    kappa = band.kappa
    n = np.arange(-N, N + 1)
    d = (n[:, None] - n[None, :]).astype(float)
    M = np.zeros(d.shape, dtype=complex)
    for freq, coef in terms:
        lo, hi = max(-kappa, freq - kappa), min(kappa, freq + kappa)
        if hi <= lo:
            continue
        rate = -np.pi * d / kappa
        with np.errstate(divide="ignore", invalid="ignore"):
            segment = np.where(
                d == 0,
                hi - lo,
                (np.exp(1j * rate * hi) - np.exp(1j * rate * lo)) / (1j * np.where(d == 0, 1.0, rate)),
            )
        phase = np.exp(1j * freq * n * np.pi / kappa)[:, None]
        M += coef * phase * segment / (2 * kappa)
    return M


def _grid_entries(g: GridFunction, band: Band, N: int) -> Tuple[NDArray[np.complex128], float]:
    """Simpson product ``E^T diag(w phi) E`` and a bound for the part beyond the grid."""
    U = band.kappa * g.extent / math.pi
    if U <= N + 1:
        raise PrecondViolated(
            f"grid extent {g.extent} does not reach past the basis window; need more than {(N + 1) * band.spacing:.6g}"
        )
    x = g.x
    if x.size % 2 == 0:
        raise PrecondViolated("symbol grid needs an odd number of points")
    E = _basis(band, N, x)
    w = np.full(x.size, g.h / 3.0)
    w[1:-1:2] *= 4.0
    w[2:-1:2] *= 2.0
    M = E.T @ ((w * g.values)[:, None] * E)
    sup = max(g.sup_norm(), g.tail.constant)
    if g.tail.kind == "decay":
        sup = g.tail.constant / g.extent ** 2
    tail_bound = 2 * sup / (math.pi ** 2 * (U - N))
    return M, tail_bound


def assemble(phi: SymbolSpec, band: Band = Band(DEFAULT_KAPPA), N: int = 16) -> HankelMatrix:
    """Hankel form matrix, symmetrised with the asymmetry residual recorded."""
    if N < 0:
        raise InputError(f"window must be nonnegative, got {N}")
    if phi.kind == "trig":
        M = _trig_entries(phi.terms, band, N)
        tail_bound = 0.0
    else:
        assert phi.grid is not None
        M, tail_bound = _grid_entries(phi.grid, band, N)
    asymmetry = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    M = 0.5 * (M + M.T)
    log.debug("assembled %s symbol at N=%d: asymmetry %.3g, tail bound %.3g", phi.kind, N, asymmetry, tail_bound)
    return HankelMatrix(band, N, M, asymmetry, tail_bound)


def apply(M: HankelMatrix, f: SampledBandlimited) -> SampledBandlimited:
    """``H_phi f`` as samples: ``M @ conj(samples)``."""
    if not math.isclose(f.band.kappa, M.band.kappa):
        raise WindowMismatch(f"function band {f.band.kappa} differs from operator band {M.band.kappa}")
    if f.offset.alpha != 0.0:
        raise WindowMismatch("Hankel matrices act on samples at the unshifted lattice")
    if f.N != M.N:
        raise WindowMismatch(f"function window {f.N} differs from operator window {M.N}")
    return f.with_samples(M.entries @ np.conj(f.samples))


def op_norm(M: HankelMatrix, max_iter: int = 20000) -> float:
    """Norm of the antilinear operator, the largest singular value of its matrix."""
    return top_singular_value(M.entries, max_iter=max_iter)


def frobenius_norm(M: HankelMatrix) -> float:
    return float(np.linalg.norm(M.entries))


def tail_index(N: int) -> int:
    """Singular-value index tracked by the compactness profile at window ``N``."""
    return max(1, N // 4)


@dataclass(frozen=True)
class ProfileRow:
    N: int
    k: int
    sigma_k: float
    singular_values: Tuple[float, ...] = field(repr=False)


def compactness_profile(
    phi: SymbolSpec, band: Band = Band(DEFAULT_KAPPA), N_list: Sequence[int] = (8, 16, 32, 64), k: Optional[int] = None
) -> List[ProfileRow]:
    """Singular values per window with the tracked ``sigma_k``.

    With ``k`` unset the index grows with the window (:func:`tail_index`):
    ``sigma_k`` of a fixed ``k`` can only grow as the window grows, while the
    tracked value drops to zero for compact operators and keeps a floor for
    bounded non-compact ones.
    """
    rows = []
    for N in N_list:
        sv = singular_values(assemble(phi, band, N).entries)
        index = tail_index(N) if k is None else k
        index = min(index, sv.size)
        rows.append(ProfileRow(N, index, float(sv[index - 1]), tuple(float(s) for s in sv)))
        log.info("profile N=%d: sigma_%d = %.4g", N, index, rows[-1].sigma_k)
    return rows


def _smoothstep(u: NDArray[np.float64]) -> NDArray[np.float64]:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def eta_left(xi: ArrayLike, band: Band = Band(DEFAULT_KAPPA)) -> NDArray[np.float64]:
    """Rises on ``[-4k, -3k]``, equals 1 on ``[-3k, -k]``, falls on ``[-k, -k/2]``."""
    kappa = band.kappa
    xi = np.asarray(xi, dtype=float)
    rising = _smoothstep((xi + 4 * kappa) / kappa)
    falling = _smoothstep((-0.5 * kappa - xi) / (0.5 * kappa))
    return np.minimum(rising, falling)


def eta_right(xi: ArrayLike, band: Band = Band(DEFAULT_KAPPA)) -> NDArray[np.float64]:
    return eta_left(-np.asarray(xi, dtype=float), band)


def eta_centre(xi: ArrayLike, band: Band = Band(DEFAULT_KAPPA)) -> NDArray[np.float64]:
    xi = np.asarray(xi, dtype=float)
    inside = (np.abs(xi) <= 2 * band.kappa + FREQ_TOL).astype(float)
    return inside - eta_left(xi, band) - eta_right(xi, band)


@dataclass(frozen=True, eq=False)
class RochbergSplit:
    phi_L: SymbolSpec
    phi_C: SymbolSpec
    phi_R: SymbolSpec
    band: Band


@dataclass(frozen=True)
class RochbergQuantities:
    q_L: float
    q_C: float
    q_R: float

    @property
    def total(self) -> float:
        return self.q_L + self.q_C + self.q_R


def _weighted_terms(terms, weight) -> List[Tuple[float, complex]]:
    return [(f, c * float(weight(f))) for f, c in terms]


def rochberg_split(phi: SymbolSpec, band: Band = Band(DEFAULT_KAPPA)) -> RochbergSplit:
    """Split a band-reduced symbol by the spectral cutoffs."""
    if phi.kind == "trig":
        outside = [f for f in phi.frequencies if abs(f) > 2 * band.kappa + FREQ_TOL]
        if outside:
            raise PrecondViolated(f"symbol is not band-reduced: frequencies {outside} exceed {2 * band.kappa:.6g}")
        return RochbergSplit(
            SymbolSpec.trig(_weighted_terms(phi.terms, lambda f: eta_left(f, band))),
            SymbolSpec.trig(_weighted_terms(phi.terms, lambda f: eta_centre(f, band))),
            SymbolSpec.trig(_weighted_terms(phi.terms, lambda f: eta_right(f, band))),
            band,
        )
    assert phi.grid is not None
    _check_resolution(phi.grid, band)
    xi = _grid_frequencies(phi.grid)
    parts = [SymbolSpec.from_grid(_masked(phi.grid, eta(xi, band))) for eta in (eta_left, eta_centre, eta_right)]
    return RochbergSplit(parts[0], parts[1], parts[2], band)


def _trig_bmo(terms: Sequence[Tuple[float, complex]], h: float, T: float) -> float:
    if not terms:
        return 0.0
    symbol = SymbolSpec.trig(terms)
    g = GridFunction.from_callable(symbol.evaluate, h, T)
    return bmo_r_norm(g).value


def rochberg_quantities(
    split: RochbergSplit, h: float = 0.05, T: float = 24.0, spec: QuadratureSpec = QuadratureSpec()
) -> RochbergQuantities:
    """``q_L = ||P-(e^{-2ik.} phi_L)||_BMO``, ``q_C = sup |phi_C|``, ``q_R = ||P+(e^{2ik.} phi_R)||_BMO``."""
    kappa = split.band.kappa
    if split.phi_C.kind == "trig":
        K = int(math.floor(T / h + 1e-9))
        x = np.arange(-K, K + 1) * h
        q_C = float(np.max(np.abs(split.phi_C.evaluate(x)))) if split.phi_C.terms else 0.0
        left = [(f - 2 * kappa, c) for f, c in split.phi_L.terms if f - 2 * kappa <= FREQ_TOL]
        right = [(f + 2 * kappa, c) for f, c in split.phi_R.terms if f + 2 * kappa >= -FREQ_TOL]
        return RochbergQuantities(_trig_bmo(left, h, T), q_C, _trig_bmo(right, h, T))

    assert split.phi_L.grid is not None and split.phi_C.grid is not None and split.phi_R.grid is not None
    q_C = split.phi_C.grid.sup_norm()
    left = analytic_project(split.phi_L.grid.modulate(-2 * kappa), "-", spec)
    right = analytic_project(split.phi_R.grid.modulate(2 * kappa), "+", spec)
    return RochbergQuantities(bmo_r_norm(left).value, q_C, bmo_r_norm(right).value)


def _envelope(s: SampledBandlimited) -> Callable[[NDArray[np.float64]], NDArray[np.complex128]]:
    """``S(u) = sum (-1)^n c_n / (u - n)``, so that ``f(pi u / kappa) = sin(pi u)/pi * S(u)``."""
    signed = np.where(s.indices % 2 == 0, 1.0, -1.0) * s.samples
    shift = s.indices.astype(float)

    def S(u: NDArray[np.float64]) -> NDArray[np.complex128]:
        u = np.asarray(u, dtype=float)
        return ((1.0 / (u.reshape(-1)[:, None] - shift[None, :])) @ signed).reshape(u.shape)

    return S


def _product_integral(
    phi: SymbolSpec, f: SampledBandlimited, g: SampledBandlimited, L: float, spec: QuadratureSpec
) -> complex:
    """``int phi f g`` in the variable ``u = kappa x / pi``.

    Beyond ``|u| = U`` the product is ``(1 - cos 2 pi u) S_f S_g / (2 pi^2)``
    and each exponential of a trigonometric term is integrated against it by
    the oscillatory tail rule.
    """
    def fg(x: NDArray[np.float64]) -> NDArray[np.complex128]:
        return np.asarray(interpolate(f, x), dtype=complex) * np.asarray(interpolate(g, x), dtype=complex)

    if phi.kind == "grid":
        assert phi.grid is not None
        grid = phi.grid
        return complex(simpson(grid.values * fg(grid.x), dx=grid.h))
    kappa = f.band.kappa
    scale = math.pi / kappa
    U = max(L / scale, max(f.N, g.N) + 33.0)
    S_f, S_g = _envelope(f), _envelope(g)

    def envelope(u: NDArray[np.float64]) -> NDArray[np.complex128]:
        return S_f(u) * S_g(u) / (2 * math.pi ** 2)

    def tail(nu: float) -> complex:
        return integrate_tail(envelope, U, spec, frequency=nu if abs(nu) > FREQ_TOL else None)

    total = 0j
    for freq, coef in phi.terms:
        nu = freq * scale
        inner = integrate(
            lambda u, w=nu: np.exp(1j * w * u) * fg(scale * u), Interval(-U, U), spec,
            period=2 * math.pi / (2 * math.pi + abs(nu)),
        )
        far = tail(nu) - 0.5 * (tail(nu + 2 * math.pi) + tail(nu - 2 * math.pi))
        total += coef * scale * (inner + far)
    return total


def duality_bridge(
    phi: SymbolSpec,
    f: SampledBandlimited,
    g: SampledBandlimited,
    M: Optional[HankelMatrix] = None,
    L: float = 64.0,
    spec: QuadratureSpec = QuadratureSpec(),
) -> Tuple[float, float]:
    """``(|int phi f g|, ||H_phi|| pw_norm(f) pw_norm(g))``; the first never exceeds the second."""
    band = f.band if M is None else M.band
    if not (math.isclose(f.band.kappa, band.kappa) and math.isclose(g.band.kappa, band.kappa)):
        raise WindowMismatch("both factors must live in the operator's band")
    if f.offset.alpha != 0.0 or g.offset.alpha != 0.0:
        raise WindowMismatch("both factors must be sampled on the unshifted lattice")
    if M is None:
        M = assemble(phi, band, max(f.N, g.N))
    lhs = abs(_product_integral(phi, f, g, L, spec))
    return lhs, op_norm(M) * pw_norm(f) * pw_norm(g)


__all__ = [
    "DEFAULT_KAPPA",
    "SymbolSpec",
    "HankelMatrix",
    "RochbergSplit",
    "RochbergQuantities",
    "ProfileRow",
    "band_reduce",
    "assemble",
    "apply",
    "op_norm",
    "frobenius_norm",
    "compactness_profile",
    "tail_index",
    "eta_left",
    "eta_right",
    "eta_centre",
    "rochberg_split",
    "rochberg_quantities",
    "duality_bridge",
]
