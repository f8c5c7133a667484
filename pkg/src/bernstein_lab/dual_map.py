"""The T_alpha synthesis map, X_alpha norms, duality pairings and Clark measures."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray

from .bandlimited import LatticeOffset, PointLike, SampledBandlimited, as_points, interpolate, sinc
from .discrete_hardy import (
    FiniteSequence,
    WindowedValue,
    bmo_z_norm,
    discrete_hilbert,
    h1_norm,
    summability_check,
    _verdict,
)
from .errors import InputError, PrecondViolated
from .numerics import Interval, QuadratureSpec, integrate, integrate_tail

log = logging.getLogger(__name__)

POINT_CHUNK = 1024

Evaluator = Callable[[np.ndarray], np.ndarray]


def t_alpha(a: FiniteSequence, alpha: LatticeOffset, z: PointLike):
    """``T_alpha a`` at ``z`` for a finitely supported sequence.

    With ``w = z - alpha`` the n-th term ``(-1)^n a_n (1/(w-n) + 1/n) sin(pi(w-n))/pi``
    equals ``(-1)^n a_n (w/n) sinc(w - n)``, which has no cancellation near
    the lattice. Terms are summed in order of increasing ``|n|``, negative
    index first.
    """
    points = as_points(z)
    w = points.reshape(-1) - alpha.alpha
    n = a.indices
    order = np.lexsort((n > 0, np.abs(n)))
    n = n[order]
    coeffs = a.values[order] * np.where(n % 2 == 0, 1.0, -1.0)
    nonzero = n != 0
    inv_n = np.zeros(n.size)
    inv_n[nonzero] = 1.0 / n[nonzero]
    out = np.empty(w.size, dtype=complex)
    for start in range(0, w.size, POINT_CHUNK):
        ww = w[start:start + POINT_CHUNK, None]
        weight = np.where(nonzero[None, :], ww * inv_n[None, :], 1.0)
        terms = coeffs[None, :] * weight * np.asarray(sinc(ww - n[None, :]))
        out[start:start + POINT_CHUNK] = np.cumsum(terms, axis=1)[:, -1] if n.size else 0.0
    out *= np.exp(-1j * np.pi * alpha.alpha)
    if points.ndim == 0:
        return complex(out[0])
    return out.reshape(points.shape)


@dataclass(frozen=True, eq=False)
class XAlphaElement:
    """An entire function known through an evaluator, tied to the lattice ``Z + alpha``.

    ``source`` is set for ``T_alpha`` images and records the sequence they
    were synthesised from.
    """

    evaluator: Evaluator = field(repr=False)
    alpha: LatticeOffset
    N: int
    source: Optional[FiniteSequence] = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        if self.N < 0:
            raise InputError(f"window must be nonnegative, got {self.N}")

    @classmethod
    def from_sequence(cls, a: FiniteSequence, alpha: LatticeOffset) -> "XAlphaElement":
        return cls(lambda z: t_alpha(a, alpha, z), alpha, a.N, a, "t_alpha")

    @classmethod
    def from_sampled(cls, s: SampledBandlimited) -> "XAlphaElement":
        if not math.isclose(s.band.kappa, math.pi):
            raise PrecondViolated("X_alpha elements live on the integer lattice (kappa = pi)")
        return cls(lambda z: interpolate(s, z), s.offset, s.N, label="sampled")

    @classmethod
    def from_callable(cls, f: Evaluator, alpha: LatticeOffset, N: int, label: str = "") -> "XAlphaElement":
        return cls(f, alpha, N, label=label)

    def __call__(self, z: PointLike):
        return self.evaluator(z)

    def summability(self) -> WindowedValue:
        return summability_check(transformed_sequence(self))


def transformed_sequence(
    f: XAlphaElement, alpha: Optional[LatticeOffset] = None, N: Optional[int] = None
) -> FiniteSequence:
    """``e^{i pi (n + alpha)} f(n + alpha)`` for ``|n| <= N``."""
    alpha = f.alpha if alpha is None else alpha
    N = f.N if N is None else N
    p = np.arange(-N, N + 1) + alpha.alpha
    values = np.exp(1j * np.pi * p) * np.asarray(f(p.astype(complex)), dtype=complex)
    return FiniteSequence(values)


def x_alpha_norm(f: XAlphaElement) -> float:
    """BMO(Z) norm of the transformed sequence on the element's window."""
    if not f.summability().converged:
        log.info("transformed sequence of %s is not visibly summable against 1/(1+n^2)", f.label or "element")
    return bmo_z_norm(transformed_sequence(f))


def _values_on_lattice(h: Union[SampledBandlimited, Evaluator], p: NDArray[np.float64]) -> NDArray[np.complex128]:
    if isinstance(h, SampledBandlimited):
        return np.asarray(interpolate(h, p), dtype=complex)
    return np.asarray(h(p), dtype=complex)


def pairing_discrete(
    h: Union[SampledBandlimited, Evaluator],
    f: Union[XAlphaElement, Evaluator],
    alpha: LatticeOffset,
    N: Optional[int] = None,
) -> WindowedValue:
    """``sum_{|n|<=N} h(n + alpha) f(n + alpha)`` with the last-octave increment."""
    if N is None:
        N = h.N if isinstance(h, SampledBandlimited) else 64
    n = np.arange(-N, N + 1)
    p = n + alpha.alpha
    terms = _values_on_lattice(h, p) * np.asarray(f(p.astype(complex)), dtype=complex)
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    last_mask = np.abs(n) > N // 2
    before_mask = (np.abs(n) > N // 4) & ~last_mask
    last = abs(complex(math.fsum(terms[last_mask].real), math.fsum(terms[last_mask].imag)))
    before = abs(complex(math.fsum(terms[before_mask].real), math.fsum(terms[before_mask].imag)))
    return WindowedValue(value, last, _verdict(last, before, abs(value)), N)


def pairing_integral(
    h: Evaluator,
    f: Union[XAlphaElement, Evaluator],
    L: float = 16.0,
    spec: QuadratureSpec = QuadratureSpec(),
) -> complex:
    """``int h f`` over the line for rapidly decaying ``h``."""

    def product(x: np.ndarray) -> np.ndarray:
        return np.asarray(h(x), dtype=complex) * np.asarray(f(x.astype(complex)), dtype=complex)

    inner = integrate(product, Interval(-L, L), spec, period=1.0)
    return inner + integrate_tail(product, L, spec)


def duality_ratio(
    h: Union[SampledBandlimited, Evaluator],
    f: XAlphaElement,
    alpha: LatticeOffset,
    N: Optional[int] = None,
) -> float:
    """``|<h, f>| / (||b_h||_{H^1} * ||f||_{X_alpha})`` with ``b_h`` the transformed samples of ``h``."""
    pairing = pairing_discrete(h, f, alpha, N)
    window = pairing.window
    p = np.arange(-window, window + 1) + alpha.alpha
    b = FiniteSequence(np.exp(-1j * np.pi * p) * _values_on_lattice(h, p))
    h1 = h1_norm(b, alpha).value
    x_norm = bmo_z_norm(transformed_sequence(f, alpha, window))
    denominator = h1 * x_norm
    if abs(pairing.value) == 0.0:
        return 0.0
    if denominator == 0.0:
        return math.inf
    return abs(pairing.value) / denominator


def r_alpha_check(
    f: XAlphaElement, alpha: LatticeOffset, central: Optional[int] = None, reduce: bool = True
) -> float:
    """Sup-discrepancy of the lattice relation between ``R_alpha f`` and ``H_alpha R_0 f``.

    With ``a = R_0 f = ((-1)^n f(n))`` and ``a_0 = 0``:
    ``(-1)^k f(k + alpha) = (sin(pi alpha)/pi) [(H_alpha a)_k + C]`` where ``C sin(pi z)/pi``
    is what ``f`` adds to the cardinal series of its integer samples. ``C`` is
    read off at ``z = 1/2``; for ``T_0`` images it is ``sum_{n != 0} a_n / n``.
    When ``reduce`` is set, ``a_0 sinc`` is subtracted from ``f`` first.
    """
    if not 0.0 < alpha.alpha < 1.0:
        raise PrecondViolated("the R_alpha relation needs 0 < alpha < 1")
    N = f.N
    a = transformed_sequence(f, LatticeOffset(0.0), N).values.copy()
    a0 = a[N]
    n = np.arange(-N, N + 1)
    cardinal = np.where(n % 2 == 0, 1.0, -1.0) * a * np.asarray(sinc(0.5 - n))
    at_half = complex(f(np.asarray(0.5 + 0j)))
    constant = math.pi * (at_half - complex(math.fsum(cardinal.real), math.fsum(cardinal.imag)))
    if not reduce and abs(a0) > 1e-12:
        raise PrecondViolated(f"R_0 f has a nonzero 0-th entry {a0:.3g}")
    a[N] = 0.0
    reduced = FiniteSequence(a)
    M = N // 2 if central is None else central
    k = np.arange(-M, M + 1)
    p = k + alpha.alpha
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    lhs = signs * (np.asarray(f(p.astype(complex)), dtype=complex) - a0 * np.asarray(sinc(p)))
    rhs = (math.sin(math.pi * alpha.alpha) / math.pi) * (discrete_hilbert(reduced, alpha, M).values + constant)
    discrepancy = float(np.max(np.abs(lhs - rhs)))
    log.debug("R_alpha discrepancy on |k|<=%d: %.3g", M, discrepancy)
    return discrepancy


@dataclass(frozen=True, eq=False)
class ClarkMeasure:
    """Point masses ``w_n`` at ``n + alpha``, ``|n| <= N``."""

    alpha: LatticeOffset
    N: int
    points: NDArray[np.float64] = field(repr=False)
    weights: NDArray[np.float64] = field(repr=False)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)


def clark_measure(alpha: LatticeOffset, N: int) -> ClarkMeasure:
    """Clark measure of ``exp(-i pi z)`` at ``alpha``: mass ``1/pi`` on each point of ``Z + alpha``."""
    if N < 0:
        raise InputError(f"window must be nonnegative, got {N}")
    points = np.arange(-N, N + 1) + alpha.alpha
    return ClarkMeasure(alpha, N, points, np.full(points.size, 1.0 / math.pi))


def bmo_clark_norm(f: XAlphaElement, alpha: Optional[LatticeOffset] = None, N: Optional[int] = None) -> float:
    """``pi * || f / e^{-i pi .} ||_{BMO(sigma_alpha)}`` on the window.

    Averages are taken with respect to ``sigma_alpha`` and oscillations are
    normalised by the number of lattice points in the interval.
    """
    alpha = f.alpha if alpha is None else alpha
    measure = clark_measure(alpha, f.N if N is None else N)
    g = np.asarray(f(measure.points.astype(complex)), dtype=complex) / np.exp(-1j * np.pi * measure.points)
    w = measure.weights
    best = 0.0
    for L in range(2, g.size + 1):
        gv = sliding_window_view(g, L)
        wv = sliding_window_view(w, L)
        mass = wv.sum(axis=1, keepdims=True)
        mean = (gv * wv).sum(axis=1, keepdims=True) / mass
        osc = (wv * np.abs(gv - mean)).sum(axis=1) / L
        best = max(best, float(osc.max()))
    return math.pi * best
