"""Sequence-side analysis on Z: discrete Hilbert transforms, H^1(Z), BMO(Z), atoms."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray

from .bandlimited import Band, LatticeOffset, SampledBandlimited, interpolate
from .errors import InputError, NonContiguousSupport, NotMeanZero, PrecondViolated, SupTooLarge
from .numerics import Interval, QuadratureSpec, integrate, integrate_tail
from .settings import thread_count

log = logging.getLogger(__name__)

MEAN_ZERO_TOL = 1e-12
# Increment must shrink by this factor per doubling to count as convergent.
DECAY_FACTOR = 0.75
ROW_CHUNK = 512
BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class FiniteSequence:
    """Complex values ``a_n`` on the symmetric window ``|n| <= N``."""

    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size % 2 != 1:
            raise InputError(f"sequence needs odd length 2N+1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("sequence values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def N(self) -> int:
        return (self.values.size - 1) // 2

    @property
    def indices(self) -> NDArray[np.int64]:
        return np.arange(-self.N, self.N + 1)

    @classmethod
    def zeros(cls, N: int) -> "FiniteSequence":
        return cls(np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def from_mapping(cls, entries: Mapping[int, complex], N: Optional[int] = None) -> "FiniteSequence":
        """Sequence with the given nonzero entries, on the smallest covering window by default."""
        reach = max((abs(n) for n in entries), default=0)
        N = reach if N is None else N
        if reach > N:
            raise InputError(f"entry at |n|={reach} does not fit window {N}")
        values = np.zeros(2 * N + 1, dtype=complex)
        for n, v in entries.items():
            values[n + N] = v
        return cls(values)

    @classmethod
    def from_function(cls, f, N: int) -> "FiniteSequence":
        n = np.arange(-N, N + 1)
        return cls(np.asarray(f(n), dtype=complex))

    def at(self, n: ArrayLike) -> NDArray[np.complex128]:
        """Values at arbitrary indices, zero outside the window."""
        n = np.asarray(n)
        inside = np.abs(n) <= self.N
        out = np.zeros(n.shape, dtype=complex)
        out[inside] = self.values[n[inside] + self.N]
        return out

    def resized(self, N: int) -> "FiniteSequence":
        """Restrict to or zero-extend onto the window ``|n| <= N``."""
        return FiniteSequence(self.at(np.arange(-N, N + 1)))

    def support_radius(self) -> int:
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(self.indices[nz])))

    def __add__(self, other: "FiniteSequence") -> "FiniteSequence":
        N = max(self.N, other.N)
        return FiniteSequence(self.resized(N).values + other.resized(N).values)

    def __mul__(self, c: complex) -> "FiniteSequence":
        return FiniteSequence(self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class WindowedValue:
    """A windowed partial result with its last-octave increment."""

    value: Union[float, complex]
    increment: float
    converged: bool
    window: int = 0


def _verdict(increment: float, previous: float, scale: float) -> bool:
    if increment <= 1e-13 * max(1.0, scale):
        return True
    return increment < DECAY_FACTOR * previous


@dataclass(frozen=True, eq=False)
class DiscreteAtom:
    """Atom of H^1(Z): contiguous support starting at ``start``, values ``alpha_n``."""

    start: int
    values: NDArray[np.complex128] = field(repr=False)

    @property
    def support(self) -> range:
        return range(self.start, self.start + len(self.values))

    def as_sequence(self, N: Optional[int] = None) -> FiniteSequence:
        return FiniteSequence.from_mapping(dict(zip(self.support, self.values)), N)


def discrete_hilbert(
    a: FiniteSequence, alpha: LatticeOffset, out_window: Optional[int] = None
) -> FiniteSequence:
    """``(H_alpha a)(n) = sum_k a_k / (n - k + alpha)`` on ``|n| <= out_window``.

    The ``k = n`` term is dropped only for ``alpha = 0``. The default output
    window is half the input window.
    """
    M = a.N // 2 if out_window is None else out_window
    if M < 0:
        raise InputError(f"output window must be nonnegative, got {M}")
    n = np.arange(-M, M + 1, dtype=float)
    k = a.indices.astype(float)
    shift = alpha.alpha
    out = np.empty(n.size, dtype=complex)
    for start in range(0, n.size, ROW_CHUNK):
        rows = n[start:start + ROW_CHUNK, None]
        denom = rows - k[None, :] + shift
        kernel = np.divide(1.0, denom, out=np.zeros_like(denom), where=denom != 0.0)
        out[start:start + ROW_CHUNK] = kernel @ a.values
    return FiniteSequence(out)


def reflect(a: FiniteSequence) -> FiniteSequence:
    """``n -> -n``."""
    return FiniteSequence(a.values[::-1])


def shift_defect(a: FiniteSequence, alpha: LatticeOffset, window: int, central: int = 16) -> float:
    """Central-window sup of ``(sin(pi alpha)/pi)^2 H_{1-alpha} H_alpha a + a(. + 1)``.

    ``window`` is the intermediate window on which ``H_alpha a`` is kept; the
    defect decays like ``|sum a| / window``.
    """
    if not 0.0 < alpha.alpha < 1.0:
        raise PrecondViolated("the composition identity needs 0 < alpha < 1")
    if window < central + a.N:
        raise InputError(f"intermediate window {window} too small for central window {central}")
    inner = discrete_hilbert(a, alpha, window)
    outer = discrete_hilbert(inner, LatticeOffset(1.0 - alpha.alpha), central)
    scale = (math.sin(math.pi * alpha.alpha) / math.pi) ** 2
    shifted = a.at(np.arange(-central, central + 1) + 1)
    defect = float(np.max(np.abs(scale * outer.values + shifted)))
    log.debug("shift defect at window %d: %.3g", window, defect)
    return defect


def _l1(values: NDArray[np.complex128]) -> float:
    return math.fsum(np.abs(values))


def h1_norm(a: FiniteSequence, alpha: LatticeOffset, window: Optional[int] = None) -> WindowedValue:
    """``||a||_1 + ||H_alpha a||_1`` on a window four times the support.

    The value is also computed on the half and quarter windows; ``converged``
    is False when the last increment fails to shrink, which is how divergent
    inputs such as a single unit mass show up.
    """
    W = window if window is not None else 4 * max(a.support_radius(), 16)
    base = _l1(a.values)
    wide = discrete_hilbert(a, alpha, W).values
    partial = []
    for M in (W // 4, W // 2, W):
        part = wide[W - M:W + M + 1]
        partial.append(base + _l1(part))
    previous = partial[1] - partial[0]
    increment = partial[2] - partial[1]
    return WindowedValue(partial[2], increment, _verdict(increment, previous, partial[2]), W)


def mean_oscillation_sup(values: NDArray[np.complex128], L: int) -> float:
    """Largest mean oscillation over all runs of ``L`` consecutive values."""
    windows = sliding_window_view(values, L)
    step = max(1, BLOCK_ELEMENTS // L)
    best = 0.0
    for start in range(0, windows.shape[0], step):
        block = windows[start:start + step]
        means = block.mean(axis=1, keepdims=True)
        best = max(best, float(np.abs(block - means).mean(axis=1).max()))
    return best


def _interval_sups(values: NDArray[np.complex128], lengths: Iterable[int]) -> float:
    return max((mean_oscillation_sup(values, L) for L in lengths), default=0.0)


def bmo_z_norm(b: FiniteSequence) -> float:
    """Exhaustive ``sup_A (1/#A) sum_{n in A} |b_n - b_A|`` over contiguous ``A``."""
    values = b.values
    n = values.size
    if n < 2:
        return 0.0
    lengths = list(range(2, n + 1))
    workers = min(thread_count(), len(lengths))
    if workers <= 1:
        return _interval_sups(values, lengths)
    chunks = [lengths[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return max(pool.map(lambda ls: _interval_sups(values, ls), chunks))


def summability_check(b: FiniteSequence) -> WindowedValue:
    """``sum |b_n| / (1 + n^2)`` with the contribution of the last octave."""
    n = b.indices
    terms = np.abs(b.values) / (1.0 + n.astype(float) ** 2)
    N = b.N
    total = math.fsum(terms)
    last = math.fsum(terms[np.abs(n) > N // 2])
    before = math.fsum(terms[(np.abs(n) > N // 4) & (np.abs(n) <= N // 2)])
    return WindowedValue(total, last, _verdict(last, before, total), N)


def make_atom(support: Sequence[int], values: Sequence[complex]) -> DiscreteAtom:
    """Validate an H^1(Z) atom."""
    support = [int(n) for n in support]
    vals = np.asarray(values, dtype=complex)
    if not support or len(support) != vals.size:
        raise InputError("atom needs one value per support point")
    if support != list(range(support[0], support[0] + len(support))):
        raise NonContiguousSupport(f"support {support} is not a contiguous integer interval")
    size = len(support)
    if float(np.max(np.abs(vals))) > 1.0 / size + 1e-15:
        raise SupTooLarge(f"sup |values| = {np.max(np.abs(vals)):.6g} exceeds 1/#A = {1.0 / size:.6g}")
    if abs(vals.sum()) > MEAN_ZERO_TOL:
        raise NotMeanZero(f"atom values sum to {vals.sum():.3g}, not zero")
    vals.setflags(write=False)
    return DiscreteAtom(support[0], vals)


def atom_to_b1(atom: DiscreteAtom) -> SampledBandlimited:
    """``sum (-1)^n alpha_n sinc(z - n)`` as samples on the integer lattice."""
    N = max(abs(atom.support.start), abs(atom.support.stop - 1))
    seq = atom.as_sequence(N)
    signs = np.where(seq.indices % 2 == 0, 1.0, -1.0)
    return SampledBandlimited(Band(math.pi), LatticeOffset(0.0), signs * seq.values)


def atom_edge_transform(
    atom: DiscreteAtom, side: int = 1, spec: QuadratureSpec = QuadratureSpec(), L: Optional[float] = None
) -> complex:
    """``int a(x) exp(side * i pi x) dx`` for the B^1 image ``a`` of an atom.

    The image is ``sin(pi x)/pi * S(x)`` with ``S(x) = sum alpha_n / (x - n)``,
    which decays like ``x**-2`` because the atom has mean zero; the transform
    at the band edge vanishes for every atom.
    """
    if side not in (1, -1):
        raise InputError(f"side must be 1 or -1, got {side}")
    s = atom_to_b1(atom)
    L = float(s.N + 33) if L is None else L
    n = np.asarray(atom.support, dtype=float)

    def near(x: np.ndarray) -> np.ndarray:
        return np.asarray(interpolate(s, x)) * np.exp(side * 1j * np.pi * x)

    def resolvent(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        return (1.0 / (x[:, None] - n[None, :])) @ atom.values

    inner = integrate(near, Interval(-L, L), spec, period=1.0)
    # sin(pi x) e^{i side pi x} = side (e^{2 i side pi x} - 1) / 2i
    wave = integrate_tail(resolvent, L, spec, frequency=2 * side * math.pi)
    flat = integrate_tail(resolvent, L, spec)
    return complex(inner + side * (wave - flat) / (2j * math.pi))


def synthesize(atoms: Sequence[DiscreteAtom], coefficients: Sequence[complex]) -> FiniteSequence:
    """``sum lambda_j atom_j`` on the smallest covering window."""
    if len(atoms) != len(coefficients):
        raise InputError("one coefficient per atom is required")
    total = FiniteSequence.zeros(0)
    for atom, lam in zip(atoms, coefficients):
        total = total + atom.as_sequence() * lam
    return total


def pair(h: FiniteSequence, b: FiniteSequence) -> complex:
    """Bilinear pairing ``sum h_n b_n`` over the common window."""
    N = min(h.N, b.N)
    prod = h.resized(N).values * b.resized(N).values
    return complex(math.fsum(prod.real), math.fsum(prod.imag))

