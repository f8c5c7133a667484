"""Tests for the quadrature and linear-algebra primitives."""

import math

import numpy as np
import pytest
from scipy.special import sici

from bernstein_lab.errors import InputError, NonConvergence
from bernstein_lab.numerics import (
    Interval,
    QuadratureSpec,
    integrate,
    integrate_tail,
    principal_value,
    singular_values,
    top_singular_value,
)


class TestIntegrate:
    """Adaptive Gauss-Legendre integration."""

    def test_polynomial(self, spec):
        """Test a polynomial is integrated to rounding."""
        assert integrate(lambda x: x ** 2, Interval(0.0, 1.0), spec) == pytest.approx(1 / 3, abs=1e-14)

    def test_oscillatory_with_period(self, spec):
        """Test whole periods of a cosine integrate to zero."""
        value = integrate(lambda x: np.cos(2 * np.pi * x), Interval(0.0, 10.0), spec, period=1.0)
        assert abs(value) < 1e-10

    def test_complex_integrand(self, spec):
        """Test complex integrands keep their imaginary part."""
        value = integrate(lambda x: np.exp(1j * x), Interval(0.0, math.pi), spec)
        assert value == pytest.approx(2j, abs=1e-12)

    def test_panel_budget_exhausted(self):
        """Test a cusp with a tiny panel budget raises NonConvergence."""
        tight = QuadratureSpec(max_panels=3)
        with pytest.raises(NonConvergence):
            integrate(lambda x: np.abs(x - 1 / 3) ** 0.5, Interval(0.0, 1.0), tight)

    def test_invalid_interval(self):
        """Test reversed intervals are rejected."""
        with pytest.raises(InputError):
            Interval(1.0, 0.0)

    def test_invalid_spec(self):
        """Test nonpositive tolerances are rejected."""
        with pytest.raises(InputError):
            QuadratureSpec(rel_tol=0.0)


class TestIntegrateTail:
    """Integrals over ``|t| > T``."""

    def test_inverse_square(self, spec):
        """Test the tail of 1/t^2 beyond 1 is 2."""
        assert integrate_tail(lambda t: 1.0 / t ** 2, 1.0, spec) == pytest.approx(2.0, abs=1e-10)

    def test_fourier_tail(self, spec):
        """Test the oscillatory rule against the sine-integral closed form."""
        value = integrate_tail(lambda t: 1.0 / t ** 2, 1.0, spec, frequency=math.pi)
        si_pi = sici(math.pi)[0]
        expected = 2 * (-1.0 - math.pi * (math.pi / 2 - si_pi))
        assert value.real == pytest.approx(expected, abs=1e-8)
        assert abs(value.imag) < 1e-8

    def test_oscillating_amplitude(self, spec):
        """Test an amplitude with its own oscillation against the sine integral."""
        T = 10.0
        value = integrate_tail(lambda t: np.cos(3 * np.pi * t) / t ** 2, T, spec, frequency=math.pi)

        def cosine_tail(a):
            return math.cos(a * T) / T - a * (math.pi / 2 - sici(a * T)[0])

        expected = cosine_tail(4 * math.pi) + cosine_tail(2 * math.pi)
        assert value.real == pytest.approx(expected, abs=1e-8)
        assert abs(value.imag) < 1e-8

    def test_zero_frequency(self, spec):
        """Test frequency zero uses the cycle sums and matches the arctangent."""
        value = integrate_tail(lambda t: 1.0 / (1.0 + t ** 2), 3.0, spec, frequency=0.0)
        assert value.real == pytest.approx(2 * (math.pi / 2 - math.atan(3.0)), abs=1e-9)

    def test_tail_budget_exhausted(self):
        """Test a tail that decays too slowly to settle raises NonConvergence."""
        with pytest.raises(NonConvergence):
            integrate_tail(lambda t: 1.0 / np.sqrt(np.abs(t)), 1.0, QuadratureSpec(max_panels=200), frequency=0.0)

    def test_nonpositive_cutoff(self, spec):
        """Test the cutoff must be positive."""
        with pytest.raises(InputError):
            integrate_tail(lambda t: 1.0 / t ** 2, 0.0, spec)


class TestPrincipalValue:
    """Symmetric-excision principal values."""

    def test_log_two(self, spec):
        """Test p.v. of 1/t over [-1, 2] is log 2."""
        value = principal_value(lambda t: 1.0 / t, 0.0, Interval(-1.0, 2.0), spec)
        assert value == pytest.approx(math.log(2.0), abs=1e-9)

    def test_pole_outside(self, spec):
        """Test the singularity must lie inside the interval."""
        with pytest.raises(InputError):
            principal_value(lambda t: 1.0 / t, 3.0, Interval(-1.0, 2.0), spec)


class TestSingularValues:
    """Power iteration and the dense SVD."""

    def test_power_iteration_matches_svd(self, rng):
        """Test power iteration agrees with the dense SVD."""
        M = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        assert top_singular_value(M) == pytest.approx(singular_values(M)[0], rel=1e-8)

    def test_zero_matrix(self):
        """Test the zero matrix has norm zero."""
        assert top_singular_value(np.zeros((4, 4))) == 0.0

    def test_nonincreasing(self, rng):
        """Test the profile is sorted from largest to smallest."""
        sv = singular_values(rng.standard_normal((6, 6)))
        assert np.all(np.diff(sv) <= 0)

    def test_non_square(self):
        """Test rectangular matrices are rejected."""
        with pytest.raises(InputError):
            top_singular_value(np.ones((2, 3)))

    def test_repeated_top_value(self, rng):
        """Test a threefold top singular value is found without a spectral gap."""
        Q, _ = np.linalg.qr(rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)))
        sigma = np.array([1.795, 1.795, 1.795, 1.2, 0.9, 0.5, 0.2, 0.0])
        M = Q @ np.diag(sigma) @ Q.conj().T
        assert top_singular_value(M) == pytest.approx(1.795, rel=1e-10)

    def test_odd_top_vector(self):
        """Test a centrosymmetric matrix whose top vector is odd."""
        M = np.array([[1.0, 0.0, -2.0], [0.0, 0.5, 0.0], [-2.0, 0.0, 1.0]])
        assert top_singular_value(M) == pytest.approx(3.0, rel=1e-10)
