"""Tests for projections of tabulated symbols and BMO on the line."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.special import dawsn

from bernstein_lab.bandlimited import Band, LatticeOffset, SampledBandlimited
from bernstein_lab.errors import InputError, MissingTailModel, PrecondViolated
from bernstein_lab.projection import (
    GridFunction,
    TailModel,
    analytic_project,
    analytic_project_at,
    bmo_r_norm,
    bmoe_norm,
    mod_out_exponentials,
    project_l2,
    project_l2_at,
    project_linf,
    vmo_profile,
)


def gaussian(x):
    return np.exp(-np.asarray(x) ** 2)


def cosine(x):
    return np.cos(0.4 * np.pi * np.asarray(x))


BOUNDED_SYMBOLS = {
    "cos 3 pi x": lambda x: np.cos(3 * np.pi * x),
    "sin 0.7 pi x": lambda x: np.sin(0.7 * np.pi * x),
    "sinc": np.sinc,
    "raised cosine": lambda x: 0.5 + 0.5 * np.cos(1.3 * np.pi * x),
    "damped cosine": lambda x: np.cos(0.4 * np.pi * x) * np.tanh(x),
}


def bounded_grid(f, T=26.0):
    return GridFunction.from_callable(f, 0.05, T, TailModel.bounded(1.0, evaluator=f))


class TestGridFunction:
    """Tabulated symbols."""

    def test_wrong_length(self):
        with pytest.raises(InputError):
            GridFunction(0.5, 2.0, np.zeros(7))

    def test_bound_enforced(self):
        """Test values above a declared bound are rejected."""
        with pytest.raises(InputError):
            GridFunction.from_callable(lambda x: 2 * np.ones_like(x), 0.5, 2.0, TailModel.bounded(1.0))

    def test_unknown_tail_kind(self):
        with pytest.raises(InputError):
            TailModel("wild")

    def test_evaluation_inside_and_outside(self):
        """Test the spline inside the grid and the evaluator beyond it."""
        g = GridFunction.from_callable(cosine, 0.05, 4.0, TailModel.bounded(1.0, evaluator=cosine))
        assert g(np.array([0.5]))[0] == pytest.approx(cosine(0.5), abs=1e-6)
        assert g(np.array([7.3]))[0] == pytest.approx(cosine(7.3), abs=1e-15)

    def test_missing_evaluator(self):
        """Test bounded symbols cannot be evaluated off-grid without an evaluator."""
        g = GridFunction.from_callable(cosine, 0.05, 4.0, TailModel.bounded(1.0))
        with pytest.raises(MissingTailModel):
            g(np.array([10.0]))

    def test_modulate(self):
        g = GridFunction.from_callable(gaussian, 0.1, 3.0)
        np.testing.assert_allclose(g.modulate(math.pi).values, np.exp(1j * math.pi * g.x) * g.values)


class TestProjectL2:
    """Band-limiting projection."""

    def test_reproduces_bandlimited(self, random_samples, spec):
        """Test projecting a cardinal series returns its samples."""
        s = random_samples(4)
        g = GridFunction.from_bandlimited(s, 0.05, 24.0)
        projected = project_l2(g, Band(math.pi), N=4, spec=spec)
        np.testing.assert_allclose(projected.samples, s.samples, atol=1e-6)

    def test_wide_gaussian_is_fixed(self, spec):
        """Test a Gaussian whose spectrum fits the band is left alone."""
        def wide(x):
            return np.exp(-np.asarray(x) ** 2 / 16)

        g = GridFunction.from_callable(wide, 0.05, 24.0, TailModel.decay(100.0))
        projected = project_l2(g, Band(math.pi), N=5, spec=spec)
        np.testing.assert_allclose(projected.samples, wide(np.arange(-5, 6)), atol=1e-6)

    def test_shifted_lattice(self, spec):
        """Test the samples sit on the shifted lattice."""
        def wide(x):
            return np.exp(-np.asarray(x) ** 2 / 16)

        g = GridFunction.from_callable(wide, 0.05, 24.0, TailModel.decay(100.0))
        projected = project_l2(g, Band(math.pi), LatticeOffset(0.5), N=3, spec=spec)
        np.testing.assert_allclose(projected.samples, wide(np.arange(-3, 4) + 0.5), atol=1e-6)

    def test_off_lattice_points(self, spec):
        """Test the projection at arbitrary points leaves a band-limited Gaussian unchanged."""
        def wide(x):
            return np.exp(-np.asarray(x) ** 2 / 16)

        g = GridFunction.from_callable(wide, 0.05, 24.0, TailModel.decay(100.0))
        xs = np.array([-2.3, 0.1, 1.7])
        np.testing.assert_allclose(project_l2_at(g, Band(math.pi), xs, spec), wide(xs), atol=1e-6)

    def test_self_adjoint(self, spec):
        """Test <P f, k> = <f, P k> for two Gaussians with different centres and frequencies."""
        def shifted(x):
            x = np.asarray(x)
            return np.exp(-(x - 1.0) ** 2 / 2 + 2j * x)

        band = Band(math.pi / 2)
        f = GridFunction.from_callable(gaussian, 0.05, 12.0, TailModel.decay(1.0, evaluator=gaussian))
        k = GridFunction.from_callable(shifted, 0.05, 12.0, TailModel.decay(1.0, evaluator=shifted))
        x = f.x
        left = simpson(project_l2_at(f, band, x, spec) * np.conj(k.values), dx=f.h)
        right = simpson(f.values * np.conj(project_l2_at(k, band, x, spec)), dx=f.h)
        assert abs(left) > 1e-3
        assert left == pytest.approx(right, abs=1e-8)

    def test_bounded_needs_evaluator(self):
        g = GridFunction.from_callable(cosine, 0.05, 8.0, TailModel.bounded(1.0))
        with pytest.raises(PrecondViolated):
            project_l2(g, Band(math.pi))


class TestProjectLinf:
    """Representatives of the projection of bounded symbols."""

    def test_cosine_modulo_exponentials(self, spec):
        """Test a cosine of type below pi is reproduced modulo exp(+-i pi z)."""
        g = GridFunction.from_callable(cosine, 0.05, 26.0, TailModel.bounded(1.0, evaluator=cosine))
        x = np.linspace(-4.0, 4.0, 33)
        residual, _ = mod_out_exponentials(project_linf(g, x, 8.0, spec) - cosine(x), x)
        assert np.max(np.abs(residual)) < 1e-3

    @pytest.mark.parametrize("name", sorted(BOUNDED_SYMBOLS))
    def test_oscillating_tails(self, name, spec):
        """Test symbols that oscillate past the grid project at R=8.5."""
        values = project_linf(bounded_grid(BOUNDED_SYMBOLS[name]), np.linspace(-8.0, 8.0, 17), 8.5, spec)
        assert np.all(np.isfinite(values))

    @pytest.mark.parametrize("name", sorted(BOUNDED_SYMBOLS))
    def test_bmoe_dominated_by_sup(self, name, spec):
        """Test the BMO(exp(-i pi z)) norm of the projection stays below 4 sup |g|."""
        g = bounded_grid(BOUNDED_SYMBOLS[name])
        norm = bmoe_norm(lambda z: project_linf(g, z, 8.5, spec), h=0.05, T=8.0)
        assert norm <= 1.05 * 4 * g.sup_norm()

    def test_agrees_with_l2_projection(self, spec):
        """Test a Gaussian gives the L2 projection modulo exp(+-i pi z)."""
        g = GridFunction.from_callable(gaussian, 0.05, 12.0, TailModel.decay(1.0, evaluator=gaussian))
        x = np.linspace(-4.0, 4.0, 41)
        expected = project_l2_at(g, Band(math.pi), x, spec)
        residual, _ = mod_out_exponentials(project_linf(g, x, 4.0, spec) - expected, x)
        assert np.max(np.abs(residual)) < 1e-6

    def test_requires_tail_model(self):
        g = GridFunction.from_callable(gaussian, 0.05, 26.0)
        with pytest.raises(MissingTailModel):
            project_linf(g, [0.0])

    def test_radius_must_fit(self):
        """Test the grid must cover three times the radius."""
        g = GridFunction.from_callable(cosine, 0.05, 10.0, TailModel.bounded(1.0, evaluator=cosine))
        with pytest.raises(PrecondViolated):
            project_linf(g, [0.0], R=5.0)

    def test_mod_out_exact_combination(self):
        """Test an exact combination of the two exponentials is removed."""
        x = np.linspace(-2.0, 2.0, 21)
        v = 2 * np.exp(1j * np.pi * x) - 3j * np.exp(-1j * np.pi * x)
        residual, (c_plus, c_minus) = mod_out_exponentials(v, x)
        assert np.max(np.abs(residual)) < 1e-12
        assert c_plus == pytest.approx(2.0)
        assert c_minus == pytest.approx(-3j)


class TestAnalyticProject:
    """Half-line spectral projections."""

    def gaussian_grid(self):
        return GridFunction.from_callable(gaussian, 0.05, 12.0, TailModel.decay(1.0, evaluator=gaussian))

    def test_gaussian_matches_dawson(self, spec):
        """Test P+ of a Gaussian is (g + 2i/sqrt(pi) dawsn)/2 up to a constant."""
        p = analytic_project(self.gaussian_grid(), "+", spec)
        expected = 0.5 * (gaussian(p.x) + 2j / math.sqrt(math.pi) * dawsn(p.x))
        diff = p.values - expected
        assert np.max(np.abs(diff - diff[p.K])) < 1e-5

    def test_sides_sum_to_symbol(self, spec):
        """Test P+ + P- recovers the symbol up to a constant."""
        g = self.gaussian_grid()
        p = analytic_project(g, "+", spec)
        m = analytic_project(g, "-", spec)
        diff = p.values + m.values - gaussian(p.x)
        assert np.max(np.abs(diff - diff[p.K])) < 1e-10

    def test_pointwise_agrees(self, spec):
        """Test the principal-value path against the Dawson closed form."""
        values = analytic_project_at(self.gaussian_grid(), "+", [0.0, 0.3], spec)
        expected = 0.5 * (gaussian(0.3) - 1.0) + 1j / math.sqrt(math.pi) * dawsn(0.3)
        assert values[1] - values[0] == pytest.approx(expected, abs=1e-6)

    def test_band_from_half_line_projections(self, spec):
        """Test e^{-i pi x} P+(e^{i pi .} g) - e^{i pi x} P+(e^{-i pi .} g) is P_pi g modulo exp(+-i pi x)."""
        g = self.gaussian_grid()
        upper = analytic_project(g.modulate(math.pi), "+", spec)
        lower = analytic_project(g.modulate(-math.pi), "+", spec)
        x = upper.x
        combined = np.exp(-1j * np.pi * x) * upper.values - np.exp(1j * np.pi * x) * lower.values
        expected = project_l2_at(g, Band(math.pi), x, spec)
        residual, _ = mod_out_exponentials(combined - expected, x)
        assert np.max(np.abs(residual)) < 5e-4

    def test_bad_side(self):
        with pytest.raises(InputError):
            analytic_project(self.gaussian_grid(), "up")


class TestBmoOnLine:
    """Dyadic BMO estimates."""

    def test_constant(self):
        g = GridFunction.from_callable(lambda x: np.full_like(x, 2.0), 0.1, 4.0)
        assert bmo_r_norm(g).value == 0.0

    def test_sign(self):
        """Test a jump from -1 to 1 has norm one."""
        g = GridFunction.from_callable(lambda x: np.where(x >= 0, 1.0, -1.0), 0.05, 8.0)
        assert bmo_r_norm(g).value == pytest.approx(1.0, abs=1e-12)

    def test_translation_invariant(self):
        """Test shifting a bump by a whole number of steps keeps the norm."""
        centred = GridFunction.from_callable(gaussian, 0.05, 8.0)
        moved = GridFunction.from_callable(lambda x: gaussian(np.asarray(x) - 1.0), 0.05, 8.0)
        assert bmo_r_norm(moved).value == pytest.approx(bmo_r_norm(centred).value, abs=1e-12)

    def test_vmo_profile_monotone(self):
        """Test oscillation over longer intervals never decreases."""
        g = GridFunction.from_callable(lambda x: np.sign(x), 0.05, 8.0)
        profile = vmo_profile(g, [0.1, 0.2, 0.4, 0.8, 1.6])
        assert all(b >= a for a, b in zip(profile, profile[1:]))
        assert profile[-1] > 0.4

    def test_vmo_below_resolution(self):
        g = GridFunction.from_callable(gaussian, 0.05, 4.0)
        with pytest.raises(InputError):
            vmo_profile(g, [0.05])

    def test_bmoe_of_edge_exponential(self):
        """Test exp(i pi z) has zero norm in BMO(exp(-i pi z))."""
        assert bmoe_norm(lambda x: np.exp(1j * np.pi * x), h=0.05, T=4.0) < 1e-6

    def test_bmoe_of_edge_combination(self):
        """Test both edge exponentials are removed with coefficients beyond one."""
        def edges(x):
            return 3 * np.exp(1j * np.pi * x) - 2j * np.exp(-1j * np.pi * x)

        assert bmoe_norm(edges, h=0.05, T=4.0) < 1e-6

    def test_bmoe_needs_type_pi(self):
        s = SampledBandlimited(Band(math.pi / 2), LatticeOffset(), np.ones(3))
        with pytest.raises(PrecondViolated):
            bmoe_norm(s)
