"""Band-limiting and half-line projections of tabulated symbols, BMO on the line.

Symbols are tabulated on a uniform symmetric grid. Contributions from beyond
the grid come from the tail model: when it carries an evaluator, the kernel
is expanded in powers of ``x/t`` and each power is integrated once against
the evaluator with the oscillatory tail rule; otherwise the tail is
dropped and the bound it would contribute is logged.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .bandlimited import (
    Band,
    LatticeOffset,
    PointLike,
    SampledBandlimited,
    as_points,
    interpolate,
    sinc,
)
from .discrete_hardy import mean_oscillation_sup
from .errors import InputError, MissingTailModel, NonConvergence, PrecondViolated
from .numerics import Interval, QuadratureSpec, integrate_tail, principal_value

log = logging.getLogger(__name__)

TAIL_KINDS = ("none", "bounded", "decay")
SERIES_EPS = 1e-16
MAX_SERIES_TERMS = 80
ROW_CHUNK = 256

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TailModel:
    """Behaviour of a symbol beyond its grid.

    ``none``: zero outside the grid. ``bounded``: ``|g| <= constant``.
    ``decay``: ``|g(t)| <= constant * t**-2``. An optional ``evaluator``
    gives the values outside the grid; ``frequency`` is its dominant
    oscillation, so that ``evaluator(t) * exp(-i frequency t)`` varies slowly.
    """

    kind: str = "none"
    constant: float = 0.0
    evaluator: Optional[Evaluator] = field(default=None, compare=False)
    frequency: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in TAIL_KINDS:
            raise InputError(f"unknown tail kind {self.kind!r}; expected one of {TAIL_KINDS}")
        if not (math.isfinite(self.constant) and self.constant >= 0):
            raise InputError(f"tail constant must be nonnegative, got {self.constant}")

    @classmethod
    def bounded(cls, M: float, evaluator: Optional[Evaluator] = None, frequency: float = 0.0) -> "TailModel":
        return cls("bounded", M, evaluator, frequency)

    @classmethod
    def decay(cls, C: float, evaluator: Optional[Evaluator] = None, frequency: float = 0.0) -> "TailModel":
        return cls("decay", C, evaluator, frequency)

    def amplitude(self, t: np.ndarray) -> np.ndarray:
        """Evaluator with the dominant oscillation divided out."""
        assert self.evaluator is not None
        return np.asarray(self.evaluator(t), dtype=complex) * np.exp(-1j * self.frequency * t)

    def modulated(self, freq: float) -> "TailModel":
        if self.evaluator is None:
            return self
        ev = self.evaluator
        return replace(self, evaluator=lambda t: np.exp(1j * freq * t) * ev(t), frequency=self.frequency + freq)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values at ``x = k h`` for ``|k| <= K`` with ``K h <= T``."""

    h: float
    T: float
    values: NDArray[np.complex128] = field(repr=False)
    tail: TailModel = TailModel()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h) and self.h > 0):
            raise InputError(f"grid step must be positive, got {self.h}")
        if not (math.isfinite(self.T) and self.T >= 1):
            raise InputError(f"grid extent must be at least 1, got {self.T}")
        values = np.asarray(self.values, dtype=complex)
        K = int(math.floor(self.T / self.h + 1e-9))
        if values.shape != (2 * K + 1,):
            raise InputError(f"expected {2 * K + 1} grid values for h={self.h}, T={self.T}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("grid values must be finite")
        if self.tail.kind == "bounded" and float(np.max(np.abs(values))) > self.tail.constant * (1 + 1e-9) + 1e-12:
            raise InputError(
                f"grid values reach {np.max(np.abs(values)):.6g}, above the declared bound {self.tail.constant:.6g}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, f: Evaluator, h: float, T: float, tail: TailModel = TailModel()) -> "GridFunction":
        K = int(math.floor(T / h + 1e-9))
        x = np.arange(-K, K + 1) * h
        return cls(h, T, np.asarray(f(x), dtype=complex), tail)

    @classmethod
    def from_bandlimited(cls, s: SampledBandlimited, h: float, T: float) -> "GridFunction":
        """Tabulate a cardinal series; the series itself serves as the tail evaluator."""
        bound = float(np.sum(np.abs(s.samples)))
        return cls.from_callable(
            lambda x: interpolate(s, x), h, T, TailModel.bounded(bound, evaluator=lambda t: interpolate(s, t))
        )

    @property
    def K(self) -> int:
        return (self.values.size - 1) // 2

    @property
    def x(self) -> NDArray[np.float64]:
        return np.arange(-self.K, self.K + 1) * self.h

    @property
    def extent(self) -> float:
        """Last grid abscissa, ``K h``."""
        return self.K * self.h

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.x, np.column_stack([self.values.real, self.values.imag]))

    def derivative(self, t: ArrayLike) -> NDArray[np.complex128]:
        d = self._spline(np.asarray(t, dtype=float), 1)
        return d[..., 0] + 1j * d[..., 1]

    def __call__(self, t: ArrayLike) -> NDArray[np.complex128]:
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= self.extent
        out = np.zeros(t.shape, dtype=complex)
        if np.any(inside):
            v = self._spline(t[inside])
            out[inside] = v[..., 0] + 1j * v[..., 1]
        if np.any(~inside):
            if self.tail.evaluator is not None:
                out[~inside] = np.asarray(self.tail.evaluator(t[~inside]), dtype=complex)
            elif self.tail.kind != "none":
                raise MissingTailModel("values beyond the grid need a tail evaluator")
        return out

    def with_values(self, values: ArrayLike, tail: Optional[TailModel] = None) -> "GridFunction":
        return GridFunction(self.h, self.T, np.asarray(values, dtype=complex), self.tail if tail is None else tail)

    def modulate(self, freq: float) -> "GridFunction":
        """Multiply by ``exp(i freq x)``."""
        return self.with_values(np.exp(1j * freq * self.x) * self.values, self.tail.modulated(freq))


@dataclass(frozen=True)
class BmoEstimate:
    value: float
    finest_scale: float
    coarsest_scale: float


def _require_tail(g: GridFunction) -> None:
    if g.tail.kind == "none":
        raise MissingTailModel("a bounded symbol needs a declared tail model (bounded or decay)")


def _series_terms(ratio: float) -> int:
    if ratio <= 0:
        return 1
    if ratio >= 1:
        raise PrecondViolated("kernel expansion needs evaluation points inside the grid extent")
    return min(MAX_SERIES_TERMS, int(math.ceil(math.log(SERIES_EPS) / math.log(ratio))) + 1)


def _tail_moments(
    tail: TailModel, T: float, freq: float, first_power: int, count: int, spec: QuadratureSpec
) -> NDArray[np.complex128]:
    """``mu_m = int_{|t|>T} g(t) t^-(m+first_power) e^{i freq t} dt`` for ``m < count``."""
    moments = np.empty(count, dtype=complex)
    for m in range(count):
        p = m + first_power
        moments[m] = integrate_tail(
            lambda t, p=p: tail.amplitude(t) * t ** (-p), T, spec, frequency=freq + tail.frequency
        )
    return moments


def _powers(z: NDArray[np.complex128], count: int, first: int) -> NDArray[np.complex128]:
    """Columns ``z**(first + m)`` for ``m < count``."""
    return z[:, None] ** (first + np.arange(count))[None, :]


def _lattice(band: Band, offset: LatticeOffset, N: int) -> NDArray[np.float64]:
    return band.spacing * (np.arange(-N, N + 1) + offset.alpha)


def project_l2_at(
    g: GridFunction, band: Band, x: ArrayLike, spec: QuadratureSpec = QuadratureSpec()
) -> NDArray[np.complex128]:
    """``(P_kappa g)(x) = int g(t) (kappa/pi) sinc((kappa/pi)(x - t)) dt`` at real points."""
    if g.tail.kind == "bounded" and g.tail.evaluator is None:
        raise PrecondViolated("L2 projection of a bounded symbol needs a tail evaluator; use project_linf")
    xs = np.asarray(x, dtype=float).reshape(-1)
    kappa = band.kappa
    t = g.x
    out = np.empty(xs.size, dtype=complex)
    for start in range(0, xs.size, ROW_CHUNK):
        rows = xs[start:start + ROW_CHUNK, None]
        kernel = (kappa / math.pi) * np.asarray(sinc((kappa / math.pi) * (rows - t[None, :])))
        out[start:start + ROW_CHUNK] = simpson(kernel * g.values[None, :], dx=g.h, axis=-1)

    T = g.extent
    if g.tail.evaluator is not None:
        # sin(kappa(t-x)) / (pi (t-x)) with 1/(t-x) = sum x^m t^-(m+1)
        count = _series_terms(float(np.max(np.abs(xs))) / T if xs.size else 0.0)
        plus = _tail_moments(g.tail, T, kappa, 1, count, spec)
        minus = _tail_moments(g.tail, T, -kappa, 1, count, spec)
        P = _powers(xs.astype(complex), count, 0)
        out += (np.exp(-1j * kappa * xs) * (P @ plus) - np.exp(1j * kappa * xs) * (P @ minus)) / (2j * math.pi)
    elif g.tail.kind == "decay":
        log.debug("dropping decaying tail beyond %g (bound %.3g)", T, 2 * g.tail.constant * kappa / (math.pi * T))
    return out


def project_l2(
    g: GridFunction,
    band: Band,
    offset: LatticeOffset = LatticeOffset(),
    N: Optional[int] = None,
    spec: QuadratureSpec = QuadratureSpec(),
) -> SampledBandlimited:
    """Samples of the band-limiting projection at the lattice of ``band``.

    The default window keeps the lattice inside half the grid extent.
    """
    if N is None:
        N = max(0, int(math.floor(0.5 * g.extent / band.spacing - offset.alpha)))
    samples = project_l2_at(g, band, _lattice(band, offset, N), spec)
    return SampledBandlimited(band, offset, samples)


def project_linf(
    g: GridFunction,
    z: PointLike,
    R: Optional[float] = None,
    spec: QuadratureSpec = QuadratureSpec(),
) -> NDArray[np.complex128]:
    """Representative of ``P_pi g`` at ``z`` for a bounded symbol.

    ``int_{I*} g(t) sinc(t - z) dt + int_{outside} g(t) sin(pi(t - z))/pi
    (1/(t - z) - 1/t) dt`` with ``I* = [-3R, 3R]``. The value is defined
    modulo ``span{exp(i pi z), exp(-i pi z)}``.
    """
    _require_tail(g)
    points = as_points(z)
    zs = points.reshape(-1)
    if R is None:
        R = max(5.0, 2.0 * float(np.max(np.abs(zs.real)))) if zs.size else 5.0
    if zs.size and float(np.max(np.abs(zs.real))) > R:
        raise PrecondViolated(f"|Re z| must not exceed R={R}")
    if 3 * R > g.extent + 1e-9:
        raise PrecondViolated(f"grid extent {g.extent} must cover [-3R, 3R] = [{-3 * R}, {3 * R}]")

    t = g.x
    inner = np.abs(t) <= 3 * R + 1e-9 * g.h
    k_in = int(np.count_nonzero(inner)) // 2
    K = g.K
    left = slice(0, K - k_in + 1)
    right = slice(K + k_in, 2 * K + 1)
    out = np.empty(zs.size, dtype=complex)
    for start in range(0, zs.size, ROW_CHUNK):
        zz = zs[start:start + ROW_CHUNK, None]
        ti = t[inner][None, :]
        total = simpson(g.values[inner][None, :] * np.asarray(sinc(ti - zz)), dx=g.h, axis=-1)
        for part in (left, right):
            tp = t[part][None, :]
            if tp.shape[1] < 2:
                continue
            kernel = np.sin(np.pi * (tp - zz)) / np.pi * zz / (tp * (tp - zz))
            total = total + simpson(g.values[part][None, :] * kernel, dx=g.h, axis=-1)
        out[start:start + ROW_CHUNK] = total

    T = g.extent
    if g.tail.evaluator is not None:
        # z/(t(t-z)) = sum z^(m+1) t^-(m+2)
        count = _series_terms(float(np.max(np.abs(zs))) / T if zs.size else 0.0)
        plus = _tail_moments(g.tail, T, math.pi, 2, count, spec)
        minus = _tail_moments(g.tail, T, -math.pi, 2, count, spec)
        P = _powers(zs, count, 1)
        out += (np.exp(-1j * np.pi * zs) * (P @ plus) - np.exp(1j * np.pi * zs) * (P @ minus)) / (2j * math.pi)
    else:
        reach = float(np.max(np.abs(zs))) if zs.size else 0.0
        bound = 2 * g.tail.constant * math.log(T / (T - reach)) / math.pi if reach < T else math.inf
        log.warning("tail beyond %g dropped without an evaluator (bound %.3g)", T, bound)
    return out.reshape(points.shape)


def mod_out_exponentials(
    values: ArrayLike, x: ArrayLike
) -> Tuple[NDArray[np.complex128], Tuple[complex, complex]]:
    """Remove the least-squares fit ``c+ exp(i pi x) + c- exp(-i pi x)``."""
    v = np.asarray(values, dtype=complex).reshape(-1)
    xs = np.asarray(x, dtype=float).reshape(-1)
    A = np.column_stack([np.exp(1j * np.pi * xs), np.exp(-1j * np.pi * xs)])
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    return v - A @ coef, (complex(coef[0]), complex(coef[1]))


def _side_sign(side: str) -> float:
    if side not in ("+", "-"):
        raise InputError(f"side must be '+' or '-', got {side!r}")
    return 1.0 if side == "+" else -1.0


def _central_mean(x: NDArray[np.float64], values: NDArray[np.complex128]) -> complex:
    mask = np.abs(x) <= 0.5 + 1e-12
    if np.count_nonzero(mask) < 2:
        return complex(values[np.argmin(np.abs(x))])
    xm = x[mask]
    return complex(simpson(values[mask], x=xm) / (xm[-1] - xm[0]))


def _hilbert_tail(g: GridFunction, xs: NDArray[np.float64], spec: QuadratureSpec) -> NDArray[np.complex128]:
    """``int_{|t|>T} g(t) (1/(t - x) - 1/t) dt``."""
    T = g.extent
    if g.tail.evaluator is None:
        reach = float(np.max(np.abs(xs))) if xs.size else 0.0
        log.warning(
            "tail beyond %g dropped without an evaluator (bound %.3g)",
            T, 2 * g.tail.constant * math.log(T / (T - reach)) if reach < T else math.inf,
        )
        return np.zeros(xs.size, dtype=complex)
    count = _series_terms(float(np.max(np.abs(xs))) / T if xs.size else 0.0)
    moments = _tail_moments(g.tail, T, 0.0, 2, count, spec)
    return _powers(xs.astype(complex), count, 1) @ moments


def analytic_project(g: GridFunction, side: str = "+", spec: QuadratureSpec = QuadratureSpec()) -> GridFunction:
    """Boundary values of the half-line spectral projection on the central third of the grid.

    ``P+ g = g/2 + (1/2 pi i) p.v. int g(t)/(t - x) dt`` with the compensated
    kernel beyond the grid. The result is fixed up to an additive constant by
    zero mean on ``[-1/2, 1/2]``.
    """
    _require_tail(g)
    sign = _side_sign(side)
    T = g.extent
    t = g.x
    K_out = g.K // 3
    offset = g.K - K_out
    xs = t[offset:offset + 2 * K_out + 1]
    gx = g.values[offset:offset + 2 * K_out + 1]
    slope = g.derivative(xs)

    pv = np.empty(xs.size, dtype=complex)
    for start in range(0, xs.size, ROW_CHUNK):
        rows = slice(start, min(start + ROW_CHUNK, xs.size))
        diff = t[None, :] - xs[rows, None]
        num = g.values[None, :] - gx[rows, None]
        quotient = np.divide(num, diff, out=np.zeros(num.shape, dtype=complex), where=diff != 0.0)
        local = np.arange(rows.start, rows.stop)
        quotient[local - start, local + offset] = slope[rows]
        pv[rows] = simpson(quotient, dx=g.h, axis=-1)
    pv += gx * np.log((T - xs) / (T + xs))
    pv += _hilbert_tail(g, xs, spec)

    values = 0.5 * gx + sign * pv / (2j * math.pi)
    values = values - _central_mean(xs, values)
    return GridFunction(g.h, K_out * g.h, values)


def analytic_project_at(
    g: GridFunction, side: str, x: Sequence[float], spec: QuadratureSpec = QuadratureSpec()
) -> NDArray[np.complex128]:
    """Pointwise ``P+/-`` through symmetric-excision principal values, without fixing the constant."""
    _require_tail(g)
    sign = _side_sign(side)
    T = g.extent
    xs = np.asarray(x, dtype=float).reshape(-1)
    if xs.size and float(np.max(np.abs(xs))) >= T:
        raise PrecondViolated("evaluation points must lie inside the grid")
    iv = Interval(-T, T)
    pv = np.array(
        [principal_value(lambda t, x0=x0: g(t) / (t - x0), x0, iv, spec, period=4 * g.h) for x0 in xs],
        dtype=complex,
    )
    pv += _hilbert_tail(g, xs, spec)
    return 0.5 * g(xs) + sign * pv / (2j * math.pi)


def _scale_sups(values: NDArray[np.complex128], h: float) -> List[Tuple[float, float]]:
    sups = []
    L = 2
    while L <= values.size:
        sups.append((L * h, mean_oscillation_sup(values, L)))
        L *= 2
    return sups


def bmo_r_norm(g: GridFunction) -> BmoEstimate:
    """Largest mean oscillation over dyadic lengths ``2h, 4h, ...`` at every grid position."""
    sups = _scale_sups(np.asarray(g.values), g.h)
    if not sups:
        return BmoEstimate(0.0, 2 * g.h, 2 * g.h)
    return BmoEstimate(max(s for _, s in sups), sups[0][0], sups[-1][0])


def vmo_profile(g: GridFunction, deltas: Sequence[float]) -> List[float]:
    """For each delta, the largest mean oscillation over intervals no longer than delta."""
    sups = _scale_sups(np.asarray(g.values), g.h)
    profile = []
    for delta in deltas:
        if delta < 2 * g.h - 1e-12:
            raise InputError(f"scale {delta} is below the finest resolvable scale {2 * g.h}")
        profile.append(max((s for scale, s in sups if scale <= delta + 1e-12), default=0.0))
    return profile


def _bmo_values(values: NDArray[np.complex128], h: float) -> float:
    return max((s for _, s in _scale_sups(values, h)), default=0.0)


def _infimum_over_c(g: NDArray[np.complex128], u: NDArray[np.complex128], h: float, rounds: int) -> float:
    """``inf_c`` of the BMO norm of ``g + c u`` by alternating bounded scalar searches.

    The search disk is ``|c| <= 2 ||g||``, widened to ``2 ||g|| / ||u||`` when
    ``||u|| < 1`` so that it always holds the minimiser.
    """
    best = _bmo_values(g, h)
    unit = _bmo_values(u, h)
    if best == 0.0 or unit == 0.0:
        return best
    radius = 2.0 * best * max(1.0, 1.0 / unit)
    c = 0j
    for _ in range(rounds):
        before = best
        for axis in (1.0, 1j):
            fixed = c.imag * 1j if axis == 1.0 else c.real

            def objective(s: float) -> float:
                return _bmo_values(g + (fixed + axis * s) * u, h)

            res = minimize_scalar(
                objective, bounds=(-radius, radius), method="bounded", options={"xatol": 1e-10 * radius}
            )
            if not res.success:
                raise NonConvergence(f"scalar minimisation failed: {res.message}")
            if res.fun < best:
                best = float(res.fun)
                c = fixed + axis * float(res.x)
        log.debug("bmoe infimum round: %.6g (c=%s)", best, c)
        if before - best <= 1e-12 * max(before, 1.0):
            break
    return best


def bmoe_norm(
    f: Union[SampledBandlimited, Evaluator],
    h: float = 0.05,
    T: Optional[float] = None,
    rounds: int = 3,
) -> float:
    """Norm in BMO(exp(-i pi z)) of a function of type pi.

    Sum of ``inf_c || e^{i pi x} f + c e^{2 i pi x} ||_BMO`` and the mirrored
    term with ``e^{-i pi x}``, both measured on a grid of step ``h``.
    """
    if isinstance(f, SampledBandlimited):
        if not math.isclose(f.band.kappa, math.pi):
            raise PrecondViolated("BMO(exp(-i pi z)) norms are defined for kappa = pi")
        if T is None:
            T = f.band.spacing * (f.N + 1) + 8.0
        evaluate: Evaluator = lambda x: interpolate(f, x)
    else:
        T = 16.0 if T is None else T
        evaluate = f
    K = int(math.floor(T / h + 1e-9))
    x = np.arange(-K, K + 1) * h
    fx = np.asarray(evaluate(x), dtype=complex)
    plus = _infimum_over_c(np.exp(1j * np.pi * x) * fx, np.exp(2j * np.pi * x), h, rounds)
    minus = _infimum_over_c(np.exp(-1j * np.pi * x) * fx, np.exp(-2j * np.pi * x), h, rounds)
    return plus + minus
