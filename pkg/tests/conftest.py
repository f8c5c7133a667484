"""Test configuration for pytest."""

import math

import numpy as np
import pytest

from bernstein_lab.bandlimited import Band, LatticeOffset, SampledBandlimited
from bernstein_lab.discrete_hardy import FiniteSequence
from bernstein_lab.fileio import write_samples, write_sequence
from bernstein_lab.numerics import QuadratureSpec


@pytest.fixture
def rng():
    """Seeded generator so random inputs are the same on every run."""
    return np.random.default_rng(20240611)


@pytest.fixture
def spec():
    return QuadratureSpec()


@pytest.fixture
def random_sequence(rng):
    """Factory for complex Gaussian sequences on ``|n| <= N``."""
    def make(N):
        return FiniteSequence(rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1))
    return make


@pytest.fixture
def random_samples(rng):
    """Factory for sampled functions of type pi."""
    def make(N, alpha=0.0, kappa=math.pi):
        values = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
        return SampledBandlimited(Band(kappa), LatticeOffset(alpha), values)
    return make


@pytest.fixture
def ones_file(tmp_path):
    """All-ones sequence on ``|n| <= 2000``."""
    path = tmp_path / "ones.csv"
    write_sequence(path, FiniteSequence(np.ones(4001)))
    return path


@pytest.fixture
def sinc_file(tmp_path):
    """Samples of sinc: a single unit sample at the origin."""
    path = tmp_path / "sinc.csv"
    write_samples(path, SampledBandlimited.unit(0, 4))
    return path


@pytest.fixture
def one_symbol_file(tmp_path):
    path = tmp_path / "one.json"
    path.write_text('{"kind": "trig", "terms": [[0.0, 1.0, 0.0]]}\n')
    return path
