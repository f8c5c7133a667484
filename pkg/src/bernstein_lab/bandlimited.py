"""Lattice-sample representation of functions of exponential type.

A ``SampledBandlimited`` stores plain values ``c_n = f(x_n)`` at the shifted
lattice ``x_n = (pi/kappa)(n + alpha)``, ``|n| <= N``, and is evaluated by
the cardinal series ``sum c_n sinc((kappa/pi) z - n - alpha)``. The
orthonormal coefficients are ``sqrt(pi/kappa) c_n``; that factor appears
only in :func:`pw_norm`.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import GrowthOverflow, InputError
from .numerics import Interval, QuadratureSpec, integrate, integrate_tail

log = logging.getLogger(__name__)

TAYLOR_RADIUS = 1e-4
# exp(700) is the last comfortable power below the double range.
EXPONENT_GUARD = 700.0
EVAL_CHUNK = 4096


@dataclass(frozen=True)
class Band:
    kappa: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise InputError(f"band width must be positive, got {self.kappa}")

    @property
    def spacing(self) -> float:
        """Distance between lattice points, pi/kappa."""
        return math.pi / self.kappa


@dataclass(frozen=True)
class LatticeOffset:
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and 0.0 <= self.alpha < 1.0):
            raise InputError(f"lattice offset must lie in [0, 1), got {self.alpha}")


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise InputError(f"point must be finite, got {self.re}+{self.im}i")

    @classmethod
    def of(cls, z: complex) -> "ComplexPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


PointLike = Union[ComplexPoint, complex, float, Sequence[ComplexPoint], ArrayLike]


def as_points(z: PointLike) -> NDArray[np.complex128]:
    """Normalise a point or a collection of points to a complex array."""
    if isinstance(z, ComplexPoint):
        return np.asarray(z.value, dtype=complex)
    if isinstance(z, (list, tuple)) and z and isinstance(z[0], ComplexPoint):
        return np.array([p.value for p in z], dtype=complex)
    return np.asarray(z, dtype=complex)


def _scalar_or_array(values: np.ndarray, like: np.ndarray):
    if like.ndim == 0:
        return values[()].item()
    return values


def sinc(z: PointLike):
    """Normalised cardinal sine ``sin(pi z)/(pi z)`` for real or complex input."""
    arr = as_points(z) if not isinstance(z, (float, int, np.ndarray)) else np.asarray(z)
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    pz = np.pi * arr
    small = np.abs(arr) < TAYLOR_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 1.0, np.sin(pz) / np.where(small, 1.0, pz))
    if np.any(small):
        p2 = pz[small] ** 2
        out[small] = 1.0 - p2 / 6.0 + p2 * p2 / 120.0
    return _scalar_or_array(out, arr)


def scaled_sinc(w: ArrayLike) -> NDArray[np.complex128]:
    """``sinc(w) * exp(-pi |Im w|)``, finite for any imaginary part."""
    w = np.asarray(w, dtype=complex)
    damp = np.pi * np.abs(w.imag)
    small = np.abs(w) < TAYLOR_RADIUS
    safe = np.where(small, 1.0, w)
    with np.errstate(over="ignore"):
        plus = np.exp(1j * np.pi * safe - damp)
        minus = np.exp(-1j * np.pi * safe - damp)
    out = (plus - minus) / (2j * np.pi * safe)
    if np.any(small):
        out[small] = np.asarray(sinc(w[small])) * np.exp(-damp[small])
    return out


@dataclass(frozen=True, eq=False)
class SampledBandlimited:
    """Finitely many lattice samples of a function of exponential type kappa."""

    band: Band
    offset: LatticeOffset
    samples: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size % 2 != 1:
            raise InputError(f"samples must be a 1-D array of odd length 2N+1, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InputError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def N(self) -> int:
        return (self.samples.size - 1) // 2

    @property
    def indices(self) -> NDArray[np.int64]:
        return np.arange(-self.N, self.N + 1)

    @classmethod
    def from_callable(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        band: Band,
        offset: LatticeOffset,
        N: int,
    ) -> "SampledBandlimited":
        """Sample ``f`` at the lattice of ``band`` and ``offset`` on ``|n| <= N``."""
        if N < 0:
            raise InputError(f"window must be nonnegative, got {N}")
        n = np.arange(-N, N + 1)
        x = band.spacing * (n + offset.alpha)
        return cls(band, offset, np.asarray(f(x), dtype=complex))

    @classmethod
    def unit(cls, n: int, N: int, band: Band = Band(math.pi), offset: LatticeOffset = LatticeOffset()) -> "SampledBandlimited":
        if abs(n) > N:
            raise InputError(f"index {n} outside window {N}")
        samples = np.zeros(2 * N + 1, dtype=complex)
        samples[n + N] = 1.0
        return cls(band, offset, samples)

    def with_samples(self, samples: ArrayLike) -> "SampledBandlimited":
        return SampledBandlimited(self.band, self.offset, np.asarray(samples, dtype=complex))

    def __call__(self, z: PointLike):
        return interpolate(self, z)


def lattice_points(s: SampledBandlimited) -> NDArray[np.float64]:
    """Sampling points ``(pi/kappa)(n + alpha)`` for ``|n| <= N``."""
    return s.band.spacing * (s.indices + s.offset.alpha)


def interpolate(s: SampledBandlimited, z: PointLike, tol: float = 1e-6):
    """Evaluate the cardinal series of ``s`` at ``z``.

    At the m-th lattice point the value is ``c_m``. Off the real axis the
    truncated series can be inaccurate; a warning is logged when the edge
    samples times ``exp(kappa |Im z|) / N`` exceed ``tol``.
    """
    points = as_points(z)
    flat = points.reshape(-1)
    kappa = s.band.kappa
    if flat.size and s.N > 0:
        edge = max(abs(s.samples[0]), abs(s.samples[-1]))
        bound = edge * math.exp(min(kappa * float(np.max(np.abs(flat.imag))), EXPONENT_GUARD)) / s.N
        if bound > tol:
            log.warning("cardinal series truncated at N=%d may be off by %.3g away from the axis", s.N, bound)
    shift = s.indices + s.offset.alpha
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, EVAL_CHUNK):
        u = (kappa / math.pi) * flat[start:start + EVAL_CHUNK, None] - shift[None, :]
        out[start:start + EVAL_CHUNK] = np.asarray(sinc(u)) @ s.samples
    return _scalar_or_array(out.reshape(points.shape), points)


def pw_norm(s: SampledBandlimited) -> float:
    """L^2 norm of the truncated series, ``sqrt(pi/kappa) * ||c||_2``."""
    return math.sqrt(s.band.spacing) * float(np.linalg.norm(s.samples))


def energy(s: SampledBandlimited, spec: QuadratureSpec = QuadratureSpec(), L: Optional[float] = None) -> float:
    """``int |f|^2`` over the line by quadrature, independent of :func:`pw_norm`.

    In the variable ``u = kappa x / pi`` the series is ``sin(pi(u - alpha))/pi * S(u)``
    with ``S(u) = sum (-1)^n c_n / (u - n - alpha)``; beyond ``|u| = L`` the
    square is integrated as ``|S|^2 (1 - cos 2 pi (u - alpha)) / (2 pi^2)``.
    """
    L = float(s.N + 33) if L is None else L
    if L <= s.N + 1:
        raise InputError(f"cutoff {L} must clear the sampled window {s.N}")
    scale = s.band.spacing
    shift = s.indices + s.offset.alpha
    signed = np.where(s.indices % 2 == 0, 1.0, -1.0) * s.samples

    def inner(u: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(interpolate(s, scale * u))) ** 2

    def envelope(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float).reshape(-1)
        return np.abs((1.0 / (u[:, None] - shift[None, :])) @ signed) ** 2

    near = integrate(inner, Interval(-L, L), spec, period=1.0)
    flat = integrate_tail(envelope, L, spec)
    wave = integrate_tail(envelope, L, spec, frequency=2 * math.pi)
    far = (flat - (np.exp(-2j * math.pi * s.offset.alpha) * wave).real) / (2 * math.pi ** 2)
    return float(scale * (near.real + far.real))


def involution(s: SampledBandlimited) -> SampledBandlimited:
    """``f#(z) = conj(f(conj z))``; on the real lattice this conjugates the samples."""
    return s.with_samples(np.conj(s.samples))


def dilate(s: SampledBandlimited, lam: float) -> SampledBandlimited:
    """Same samples on the band ``lam * kappa``: the result is ``z -> f(lam z)``."""
    if not (math.isfinite(lam) and lam > 0):
        raise InputError(f"dilation factor must be positive, got {lam}")
    return SampledBandlimited(Band(lam * s.band.kappa), s.offset, s.samples)


def growth_ratio_Y(
    f: Union[SampledBandlimited, Callable[[np.ndarray], np.ndarray]],
    y: Sequence[float],
    band: Band = Band(math.pi),
) -> NDArray[np.float64]:
    """Log-scale ratios ``log|f(iy)| - log|y| - kappa|y|`` along the imaginary axis.

    Sampled functions are evaluated with the exponential factor divided out
    term by term, so large ``|y|`` never overflows. Plain callables are
    evaluated directly and raise GrowthOverflow beyond ``kappa|y| = 700``.
    """
    ys = np.asarray(y, dtype=float)
    if np.any(ys == 0) or not np.all(np.isfinite(ys)):
        raise InputError("growth ratios need finite nonzero y values")
    if isinstance(f, SampledBandlimited):
        kappa = f.band.kappa
        shift = f.indices + f.offset.alpha
        w = (kappa / math.pi) * (1j * ys[:, None]) - shift[None, :]
        damped = scaled_sinc(w) @ f.samples
        with np.errstate(divide="ignore"):
            return np.log(np.abs(damped)) - np.log(np.abs(ys))
    kappa = band.kappa
    if np.any(kappa * np.abs(ys) > EXPONENT_GUARD):
        raise GrowthOverflow(
            f"direct evaluation at kappa|y| = {kappa * np.max(np.abs(ys)):.1f} leaves the exponent range"
        )
    values = np.asarray(f(1j * ys), dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values)) - np.log(np.abs(ys)) - kappa * np.abs(ys)


def satisfies_growth_condition(ratios: Sequence[float], margin: float = 1.0) -> bool:
    """True when the log-ratios never increase and fall by at least ``margin``."""
    r = np.asarray(ratios, dtype=float)
    if r.size < 2:
        return False
    return bool(np.all(np.diff(r) <= 1e-12) and r[-1] <= r[0] - margin)
