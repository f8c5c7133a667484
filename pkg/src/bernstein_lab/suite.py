"""Acceptance suite: identity and property checks across all modules."""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import sici

from .bandlimited import Band, LatticeOffset, SampledBandlimited, energy, pw_norm, sinc
from .discrete_hardy import FiniteSequence, atom_edge_transform, bmo_z_norm, make_atom, shift_defect
from .dual_map import XAlphaElement, bmo_clark_norm, pairing_discrete, t_alpha, x_alpha_norm
from .errors import BernsteinLabError, InputError, NonContiguousSupport, NotMeanZero, SupTooLarge
from .hankel import DEFAULT_KAPPA, SymbolSpec, assemble, band_reduce, compactness_profile, frobenius_norm, op_norm
from .profiles import Profile, get_profile
from .projection import (
    GridFunction,
    TailModel,
    bmoe_norm,
    mod_out_exponentials,
    project_l2,
    project_linf,
)

log = logging.getLogger(__name__)

SEED = 1234
LEVELS = ("fast", "full")

Check = Callable[[Profile, np.random.Generator], Tuple[bool, str]]


@dataclass(frozen=True)
class CriterionResult:
    id: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


CRITERIA: List[Tuple[str, str, Check]] = []


def criterion(cid: str, name: str) -> Callable[[Check], Check]:
    def register(check: Check) -> Check:
        CRITERIA.append((cid, name, check))
        return check
    return register


def _random_sequence(rng: np.random.Generator, N: int) -> FiniteSequence:
    return FiniteSequence(rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1))


def _bounded_sequence(rng: np.random.Generator, N: int) -> FiniteSequence:
    return FiniteSequence(rng.uniform(-1.0, 1.0, 2 * N + 1))


@criterion("C01", "lattice identity")
def lattice_identity(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    K = 32
    k = np.arange(-K, K + 1)
    worst = 0.0
    for _ in range(profile.limits['random_sequences']):
        a = _random_sequence(rng, K)
        for alpha in profile.limits['alphas']:
            p = k + alpha
            values = np.exp(1j * np.pi * p) * t_alpha(a, LatticeOffset(alpha), p)
            worst = max(worst, float(np.max(np.abs(values - a.values))))
    return worst <= 1e-10, f"max |e^(i pi p) T a(p) - a_k| = {worst:.3g}"


@criterion("C02", "cosine identity")
def cosine_identity(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    offset = LatticeOffset(0.5)
    z = offset.alpha + rng.uniform(-2.0, 2.0, 10) + 1j * rng.uniform(-0.5, 0.5, 10)
    target = np.exp(-1j * np.pi * offset.alpha) * np.cos(np.pi * (z - offset.alpha))
    errors = []
    for N in profile.window('cosine_N'):
        ones = FiniteSequence(np.ones(2 * N + 1))
        errors.append(float(np.max(np.abs(t_alpha(ones, offset, z) - target))))
    halving = all(later <= 0.6 * earlier for earlier, later in zip(errors, errors[1:]))
    detail = ", ".join(f"N={N}: {e:.3g}" for N, e in zip(profile.window('cosine_N'), errors))
    return errors[0] <= 5e-3 and halving, detail


@criterion("C03", "composition identity")
def composition_identity(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    a = _bounded_sequence(rng, 8)
    windows = profile.window('doublings')
    ok = True
    parts = []
    for alpha in (0.25, 0.5, 0.9):
        defects = [shift_defect(a, LatticeOffset(alpha), W, central=16) for W in windows]
        ok &= max(defects) <= 0.05 and all(b < c for c, b in zip(defects, defects[1:]))
        parts.append(f"alpha={alpha}: " + "/".join(f"{d:.2g}" for d in defects))
    return ok, "; ".join(parts)


@criterion("C04", "Shannon consistency")
def shannon_consistency(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = profile.quadrature_spec()
    worst = 0.0
    for _ in range(10):
        offset = LatticeOffset(float(rng.uniform(0.0, 1.0)))
        samples = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        s = SampledBandlimited(Band(math.pi), offset, samples)
        norm2 = pw_norm(s) ** 2
        worst = max(worst, abs(energy(s, spec) - norm2) / norm2)
    return worst <= 1e-5, f"max relative error {worst:.3g}"


def _random_trig(rng: np.random.Generator, limit: float, count: int) -> SymbolSpec:
    freqs = rng.uniform(-limit, limit, count)
    coeffs = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    return SymbolSpec.trig(list(zip(freqs, coeffs)))


@criterion("C05", "Hankel basics")
def hankel_basics(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    band = Band(DEFAULT_KAPPA)
    identity = assemble(SymbolSpec.constant(1.0), band, 16)
    deviation = float(np.max(np.abs(identity.entries - np.eye(33))))
    excess = -math.inf
    for _ in range(10):
        phi = _random_trig(rng, 1.5 * band.kappa, int(rng.integers(1, 4)))
        excess = max(excess, op_norm(assemble(phi, band, 16)) - phi.sup_bound())
    outside = frobenius_norm(assemble(SymbolSpec.trig([(3 * math.pi, 1.0)]), band, 16))
    ok = deviation <= 1e-8 and excess <= 1e-6 and outside <= 1e-6
    return ok, f"identity deviation {deviation:.3g}, norm excess {excess:.3g}, out-of-band {outside:.3g}"


@criterion("C06", "band-reduction invariance")
def band_reduction_invariance(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    band = Band(DEFAULT_KAPPA)
    worst = 0.0
    for _ in range(5):
        inside = _random_trig(rng, 1.9 * band.kappa, 2)
        far = rng.uniform(2.5, 4.0, 2) * band.kappa * rng.choice([-1.0, 1.0], 2)
        outside = SymbolSpec.trig([(f, complex(rng.standard_normal())) for f in far])
        phi = inside + outside
        before = op_norm(assemble(phi, band, 16))
        after = op_norm(assemble(band_reduce(phi, band), band, 16))
        worst = max(worst, abs(before - after))
    return worst <= 1e-6, f"max |op_norm change| {worst:.3g}"


def _test_functions(profile: Profile, rng: np.random.Generator, N: int) -> List[XAlphaElement]:
    alphas = profile.limits['alphas']
    functions = []
    for i in range(10):
        offset = LatticeOffset(alphas[i % len(alphas)])
        functions.append(XAlphaElement.from_sequence(_random_sequence(rng, N), offset))
        s = SampledBandlimited(Band(math.pi), offset, _random_sequence(rng, N).values)
        functions.append(XAlphaElement.from_sampled(s))
    return functions


@criterion("C07", "Clark measure identity")
def clark_identity(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    worst = 0.0
    for f in _test_functions(profile, rng, 24):
        clark = bmo_clark_norm(f)
        direct = x_alpha_norm(f)
        worst = max(worst, abs(clark - direct) / max(1.0, direct))
    return worst <= 1e-12, f"max relative discrepancy {worst:.3g}"


@criterion("C08", "isomorphism witness")
def isomorphism_witness(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    alphas = profile.limits['alphas']
    worst = 0.0
    for i in range(20):
        a = _random_sequence(rng, 24)
        f = XAlphaElement.from_sequence(a, LatticeOffset(alphas[i % len(alphas)]))
        worst = max(worst, abs(x_alpha_norm(f) - bmo_z_norm(a)))
    return worst <= 1e-10, f"max |x_alpha(T a) - bmo_z(a)| = {worst:.3g}"


def _bounded_symbols() -> List[Tuple[str, Callable[[np.ndarray], np.ndarray], float]]:
    return [
        ("cos 0.4 pi x", lambda x: np.cos(0.4 * np.pi * x), 1.0),
        ("sin 0.7 pi x", lambda x: np.sin(0.7 * np.pi * x), 1.0),
        ("cos 3 pi x", lambda x: np.cos(3 * np.pi * x), 1.0),
        ("exp(0.3 i pi x)", lambda x: np.exp(0.3j * np.pi * x), 1.0),
        ("tanh 2x", lambda x: np.tanh(2 * x), 1.0),
        ("sinc", lambda x: np.sinc(x), 1.0),
        ("gaussian", lambda x: np.exp(-x ** 2 / 4), 1.0),
        ("cauchy", lambda x: 1.0 / (1.0 + x ** 2), 1.0),
        ("cos 0.4 pi x tanh x", lambda x: np.cos(0.4 * np.pi * x) * np.tanh(x), 1.0),
        ("0.5 + 0.5 cos 1.3 pi x", lambda x: 0.5 + 0.5 * np.cos(1.3 * np.pi * x), 1.0),
    ]


def _bounded_grid(f: Callable[[np.ndarray], np.ndarray], bound: float, h: float, T: float) -> GridFunction:
    return GridFunction.from_callable(f, h, T, TailModel.bounded(bound, evaluator=f))


@criterion("C09", "projection sanity")
def projection_sanity(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = profile.quadrature_spec()
    h = profile.window('grid_step')
    rounds = profile.limits['minimizer_rounds']
    R, T = 8.5, 26.0
    worst_ratio = 0.0
    for name, f, bound in _bounded_symbols():
        g = _bounded_grid(f, bound, h, T)
        norm = bmoe_norm(lambda z, g=g: project_linf(g, z, R, spec), h=h, T=8.0, rounds=rounds)
        ratio = norm / (4 * g.sup_norm())
        log.info("projection of %s: bmoe %.4g (ratio to 4 sup %.3f)", name, norm, ratio)
        worst_ratio = max(worst_ratio, ratio)

    cosine = _bounded_grid(lambda x: np.cos(0.4 * np.pi * x), 1.0, h, T)
    x = np.linspace(-4.0, 4.0, 33)
    residual, _ = mod_out_exponentials(project_linf(cosine, x, R, spec) - np.cos(0.4 * np.pi * x), x)
    residual_sup = float(np.max(np.abs(residual)))

    gaussian = GridFunction.from_callable(
        lambda x: np.exp(-x ** 2 / 4), h, 24.0, TailModel.decay(16.0, evaluator=lambda x: np.exp(-x ** 2 / 4))
    )
    first = project_l2(gaussian, Band(math.pi), spec=spec)
    again = project_l2(GridFunction.from_bandlimited(first, h, 24.0), Band(math.pi), N=first.N, spec=spec)
    drift = float(np.max(np.abs(again.samples - first.samples)))

    ok = worst_ratio <= 1.05 and residual_sup <= 1e-3 and drift <= 1e-6
    return ok, f"bmoe/(4 sup) <= {worst_ratio:.3f}, cosine residual {residual_sup:.3g}, idempotence {drift:.3g}"


@criterion("C10", "alpha-independence of duality")
def alpha_independence(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    N = profile.window('pairing_N')[-1]
    worst = 0.0
    for s in (0.0, 0.3, 1.1, -0.7, 2.5):
        f = XAlphaElement.from_sequence(_bounded_sequence(rng, 16), LatticeOffset(0.0))

        def h(x: np.ndarray, s: float = s) -> np.ndarray:
            return np.asarray(sinc((np.asarray(x) - s) / 4)) ** 4

        at_zero = pairing_discrete(h, f, LatticeOffset(0.0), N)
        at_half = pairing_discrete(h, f, LatticeOffset(0.5), N)
        worst = max(worst, abs(at_zero.value - at_half.value))
    return worst < 1e-3, f"max |pairing(0) - pairing(1/2)| = {worst:.3g} at N={N}"


def _decreasing(values: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


@criterion("C11", "compactness dichotomy")
def compactness_dichotomy(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = profile.quadrature_spec()
    band = Band(DEFAULT_KAPPA)
    h = 0.05
    N_list = profile.window('hankel_N')

    hat = GridFunction.from_callable(lambda x: np.maximum(0.0, 1.0 - np.abs(x) / 2), h, 16.0)
    smooth = project_l2(hat, Band(math.pi), N=12, spec=spec)
    vmo = SymbolSpec.from_grid(GridFunction.from_bandlimited(smooth, h, 400.0))

    def sign_like(x: np.ndarray) -> np.ndarray:
        return (2 / np.pi) * sici(np.pi * np.asarray(x, dtype=float))[0]

    jump = SymbolSpec.from_grid(GridFunction.from_callable(sign_like, h, 400.0, TailModel.bounded(1.2, sign_like)))

    compact = [row.sigma_k for row in compactness_profile(vmo, band, N_list)]
    floor = [row.sigma_k for row in compactness_profile(jump, band, N_list)]
    ok = _decreasing(compact) and compact[-1] < 0.2 * compact[0] and min(floor) > 0.5 * floor[0]
    detail = "vmo " + "/".join(f"{v:.3g}" for v in compact) + "; sign " + "/".join(f"{v:.3g}" for v in floor)
    return ok, detail


@criterion("C12", "atom checks")
def atom_checks(profile: Profile, rng: np.random.Generator) -> Tuple[bool, str]:
    spec = profile.quadrature_spec()
    atoms = [
        make_atom([0, 1], [0.5, -0.5]),
        make_atom([-3, -2, -1], [1 / 3, -1 / 3, 0.0]),
        make_atom([5, 6, 7, 8], [0.25, 0.25, -0.25, -0.25]),
        make_atom([-1, 0, 1, 2, 3], [0.2j, -0.2, 0.2, -0.2j, 0.0]),
    ]
    edge = max(abs(atom_edge_transform(atom, side, spec)) for atom in atoms for side in (1, -1))

    invalid = [
        (SupTooLarge, [0, 1], [0.6, -0.6]),
        (NotMeanZero, [0, 1], [0.5, 0.4]),
        (NonContiguousSupport, [0, 2], [0.5, -0.5]),
    ]
    rejected = 0
    for expected, support, values in invalid:
        try:
            make_atom(support, values)
        except expected:
            rejected += 1
    ok = edge <= 1e-6 and rejected == len(invalid)
    return ok, f"max band-edge transform {edge:.3g}, {rejected}/{len(invalid)} invalid atoms rejected"


def run_suite(level: str = "fast", only: Optional[Sequence[str]] = None) -> List[CriterionResult]:
    """Run the criteria (all, or the ids in ``only``) at the given level."""
    if level not in LEVELS:
        raise InputError(f"unknown suite level {level!r}; expected one of {LEVELS}")
    profile = get_profile(level)
    wanted = set(only) if only else None
    if wanted is not None:
        unknown = wanted - {cid for cid, _, _ in CRITERIA}
        if unknown:
            raise InputError(f"unknown criteria: {', '.join(sorted(unknown))}")
    results = []
    for index, (cid, name, check) in enumerate(CRITERIA):
        if wanted is not None and cid not in wanted:
            continue
        rng = np.random.default_rng(SEED + index)
        start = time.perf_counter()
        try:
            passed, detail = check(profile, rng)
        except BernsteinLabError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - start
        log.info("%s %s: %s in %.2f s (%s)", cid, name, "PASS" if passed else "FAIL", seconds, detail)
        results.append(CriterionResult(cid, name, bool(passed), detail, seconds))
    return results
