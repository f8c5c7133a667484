"""Quadrature and dense linear-algebra primitives.

All integrands are vectorised evaluators ``f(x: ndarray) -> ndarray``.
Integrals are composite Gauss-Legendre sums over panels that are bisected
until the two-level error estimate meets the tolerance. Panel sums are
accumulated in increasing order of the left endpoint with ``math.fsum`` so
results do not depend on how panels were refined.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from .errors import InputError, NonConvergence

log = logging.getLogger(__name__)

Evaluator = Callable[[NDArray[np.float64]], NDArray[np.complex128]]

TAIL_LEVELS = 12
RICHARDSON_DEPTH = 4
POWER_SEED = 7

__all__ = [
    "Interval",
    "QuadratureSpec",
    "integrate",
    "integrate_tail",
    "principal_value",
    "top_singular_value",
    "singular_values",
]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InputError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise InputError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budgets shared by every integral in the library."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_panels: int = 20000
    tail_cutoff: float = 10.0
    order: int = 10

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InputError("quadrature tolerances must be positive")
        if self.tail_cutoff <= 0:
            raise InputError("tail cutoff must be positive")
        if self.max_panels < 1:
            raise InputError("max_panels must be at least 1")
        if self.order < 2:
            raise InputError("Gauss-Legendre order must be at least 2")

    def target(self, value: complex) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    return np.polynomial.legendre.leggauss(order)


def _panel_rule(
    f: Evaluator, lo: NDArray[np.float64], hi: NDArray[np.float64], order: int
) -> NDArray[np.complex128]:
    """Gauss-Legendre sums for a batch of panels in one evaluator call."""
    nodes, weights = _gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    values = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    return half * (values @ weights)


def _estimate(
    f: Evaluator, lo: NDArray[np.float64], hi: NDArray[np.float64], order: int
) -> Tuple[NDArray[np.complex128], NDArray[np.float64]]:
    mid = 0.5 * (lo + hi)
    coarse = _panel_rule(f, lo, hi, order)
    fine = _panel_rule(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]), order)
    n = lo.size
    fine = fine[:n] + fine[n:]
    return fine, np.abs(fine - coarse)


def _ordered_sum(lo: NDArray[np.float64], values: NDArray[np.complex128]) -> complex:
    order = np.argsort(lo, kind="stable")
    ordered = values[order]
    return complex(math.fsum(ordered.real), math.fsum(ordered.imag))


def _breakpoints(iv: Interval, singular_points: Iterable[float], period: Optional[float]) -> NDArray[np.float64]:
    points = {iv.lo, iv.hi}
    points.update(p for p in singular_points if iv.lo < p < iv.hi)
    edges = np.array(sorted(points))
    if period is None:
        return edges
    if period <= 0:
        raise InputError("oscillation period must be positive")
    max_width = 0.5 * period
    refined: List[NDArray[np.float64]] = []
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(math.ceil((b - a) / max_width)))
        refined.append(np.linspace(a, b, pieces + 1)[:-1])
    refined.append(edges[-1:])
    return np.concatenate(refined)


def integrate(
    f: Evaluator,
    iv: Interval,
    spec: QuadratureSpec,
    singular_points: Sequence[float] = (),
    period: Optional[float] = None,
) -> complex:
    """Adaptive composite Gauss-Legendre integral of ``f`` over ``iv``.

    Panels are split at ``singular_points`` and, for oscillatory integrands,
    kept no wider than half the shortest ``period``. Raises NonConvergence
    when more than ``spec.max_panels`` panels would be needed.
    """
    edges = _breakpoints(iv, singular_points, period)
    lo, hi = edges[:-1], edges[1:]
    if lo.size > spec.max_panels:
        raise NonConvergence(
            f"{lo.size} initial panels exceed the budget of {spec.max_panels} on [{iv.lo}, {iv.hi}]"
        )
    values, errors = _estimate(f, lo, hi, spec.order)

    while True:
        if not np.all(np.isfinite(values)):
            raise NonConvergence(f"integrand is not finite on [{iv.lo}, {iv.hi}]")
        total = _ordered_sum(lo, values)
        target = spec.target(total)
        if float(errors.sum()) <= target:
            break
        # Split every panel whose error exceeds its share of the budget.
        share = target * (hi - lo) / iv.width
        split = errors > share
        if not split.any():
            split = errors >= errors.max()
        if lo.size + int(split.sum()) > spec.max_panels:
            raise NonConvergence(
                f"quadrature on [{iv.lo}, {iv.hi}] did not reach {target:.3g} within "
                f"{spec.max_panels} panels (error estimate {errors.sum():.3g})"
            )
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_values, new_errors = _estimate(f, new_lo, new_hi, spec.order)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        values = np.concatenate([values[keep], new_values])
        errors = np.concatenate([errors[keep], new_errors])

    log.debug("integrate [%g, %g]: %d panels, error %.3g", iv.lo, iv.hi, lo.size, errors.sum())
    return total


def _cutoff(s: NDArray[np.float64]) -> NDArray[np.float64]:
    """C-infinity step: 1 for ``s <= 0``, 0 for ``s >= 1``."""
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(s < 1.0, np.exp(-1.0 / np.where(s < 1.0, 1.0 - s, 1.0)), 0.0)
        right = np.where(s > 0.0, np.exp(-1.0 / np.where(s > 0.0, s, 1.0)), 0.0)
    return left / (left + right)


def _oscillatory_tail(f: Evaluator, T: float, frequency: float, spec: QuadratureSpec) -> complex:
    """``int_{|t|>T} f(t) exp(i frequency t) dt`` by smooth cutoffs at doubling radii.

    Each radius ``X`` contributes ``int_T^X`` of the integrand times a cutoff
    falling from 1 at ``X/2`` to 0 at ``X``. Oscillating parts of the remainder
    vanish faster than any power of ``X``; algebraic parts are powers of
    ``1/X`` and are removed by Richardson extrapolation.
    """
    period = 2 * math.pi / abs(frequency) if frequency else 1.0

    def both_sides(t: NDArray[np.float64]) -> NDArray[np.complex128]:
        wave = np.exp(1j * frequency * t)
        return np.asarray(f(t), dtype=complex) * wave + np.asarray(f(-t), dtype=complex) / wave

    X = 2.0 * max(2.0 * T, T + 16.0 * period)
    flat = integrate(both_sides, Interval(T, 0.5 * X), spec, period=period)
    size = abs(flat)
    previous_row: List[complex] = []
    estimate = 0j
    for level in range(TAIL_LEVELS):
        if level:
            piece = integrate(both_sides, Interval(0.25 * X, 0.5 * X), spec, period=period)
            flat += piece
            size = max(size, abs(piece))

        def tapered(t: NDArray[np.float64], X: float = X) -> NDArray[np.complex128]:
            return both_sides(t) * _cutoff(2.0 * t / X - 1.0)

        taper = integrate(tapered, Interval(0.5 * X, X), spec, period=period)
        size = max(size, abs(taper))
        row = [flat + taper]
        for k in range(1, min(level, RICHARDSON_DEPTH) + 1):
            row.append(row[k - 1] + (row[k - 1] - previous_row[k - 1]) / (2 ** k - 1))
        change = abs(row[-1] - estimate)
        estimate = row[-1]
        # quadrature error of the pieces, amplified by the extrapolation
        floor = 16 * spec.target(size)
        if level >= 2 and change <= max(spec.target(estimate), floor):
            log.debug("oscillatory tail beyond %g settled at radius %g (change %.3g)", T, X, change)
            return estimate
        previous_row = row
        X *= 2.0
    raise NonConvergence(f"oscillatory tail beyond {T} did not settle by radius {X / 2:g} (last change {change:.3g})")


def integrate_tail(
    f: Evaluator,
    T: float,
    spec: QuadratureSpec,
    frequency: Optional[float] = None,
) -> complex:
    """Integral over ``|t| > T``.

    Without ``frequency`` ``f`` must decay like ``t**-2`` without oscillating;
    the substitution ``t = ±1/u`` maps both half-lines onto ``(0, 1/T]`` where
    the integrand stays bounded. With ``frequency`` (zero allowed) the
    integrand is ``f(t) * exp(i*frequency*t)``, ``f`` may oscillate itself,
    and the tail is summed cycle by cycle up to doubling cutoff radii.
    """
    if T <= 0:
        raise InputError("tail cutoff must be positive")
    if frequency is not None:
        return _oscillatory_tail(f, T, frequency, spec)

    def compact(u: NDArray[np.float64]) -> NDArray[np.complex128]:
        t = 1.0 / u
        return (np.asarray(f(t), dtype=complex) + np.asarray(f(-t), dtype=complex)) * t * t

    return integrate(compact, Interval(0.0, 1.0 / T), spec)


def principal_value(
    f: Evaluator,
    x0: float,
    iv: Interval,
    spec: QuadratureSpec,
    period: Optional[float] = None,
) -> complex:
    """Cauchy principal value of ``∫ f`` over ``iv`` with a simple pole at ``x0``.

    The symmetric excision ``|t - x0| < eps`` is shrunk by halving ``eps``;
    inside the symmetric band the two sides are integrated together, so the
    pole cancels and every partial integral is regular.
    """
    if not iv.lo < x0 < iv.hi:
        raise InputError(f"singularity {x0} must lie inside [{iv.lo}, {iv.hi}]")
    rho = min(x0 - iv.lo, iv.hi - x0)

    def symmetric(s: NDArray[np.float64]) -> NDArray[np.complex128]:
        return np.asarray(f(x0 + s), dtype=complex) + np.asarray(f(x0 - s), dtype=complex)

    total = 0j
    if x0 - rho > iv.lo:
        total += integrate(f, Interval(iv.lo, x0 - rho), spec, period=period)
    if x0 + rho < iv.hi:
        total += integrate(f, Interval(x0 + rho, iv.hi), spec, period=period)

    eps = 0.5 * rho
    band = integrate(symmetric, Interval(eps, rho), spec, period=period)
    for _ in range(64):
        piece = integrate(symmetric, Interval(0.5 * eps, eps), spec, period=period)
        band += piece
        eps *= 0.5
        if abs(piece) <= spec.target(total + band) and eps < 1e-3 * rho:
            return total + band
    raise NonConvergence(f"principal value at {x0} did not settle after 64 halvings")


def top_singular_value(
    M: NDArray[np.complex128], tol: float = 1e-12, max_iter: int = 20000
) -> float:
    """Largest singular value by power iteration on ``M^* M``.

    The start vector is drawn from a fixed seed, so the result is reproducible
    and the start is not confined to the even or odd vectors of a
    centrosymmetric matrix. Iteration stops when the residual
    ``|G v - lambda v|`` or the change of the Rayleigh quotient drops below
    ``tol * lambda``; a repeated top singular value makes the residual vanish
    without a spectral gap.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    n = M.shape[0]
    if n == 0 or not np.any(M):
        return 0.0
    gram = M.conj().T @ M
    rng = np.random.default_rng(POWER_SEED)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    rayleigh = 0.0
    for iteration in range(1, max_iter + 1):
        w = gram @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            # start is orthogonal to the range; restart on a basis vector
            v = np.zeros(n, dtype=complex)
            v[iteration % n] = 1.0
            continue
        v = w / norm
        gv = gram @ v
        current = float(np.real(np.vdot(v, gv)))
        residual = float(np.linalg.norm(gv - current * v))
        scale = tol * max(current, np.finfo(float).tiny)
        if residual <= scale or abs(current - rayleigh) <= scale:
            log.debug("power iteration converged in %d steps", iteration)
            return math.sqrt(max(current, 0.0))
        rayleigh = current
    raise NonConvergence(f"power iteration did not stabilise in {max_iter} iterations")


def singular_values(M: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Full singular-value profile in nonincreasing order."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        return np.zeros(0)
    return np.asarray(linalg.svdvals(M), dtype=float)
