"""Named tolerance profiles for experiments and the acceptance suite."""

from typing import Any, Dict, Optional

from .numerics import QuadratureSpec


class Profile:
    """Base profile."""

    def __init__(self, name: str):
        self.name = name
        self.quadrature: Dict[str, Any] = {}
        self.windows: Dict[str, Any] = {}
        self.limits: Dict[str, Any] = {}

    def quadrature_spec(self, rel_tol: Optional[float] = None) -> QuadratureSpec:
        """Build the quadrature spec, optionally overriding the relative tolerance."""
        settings = dict(self.quadrature)
        if rel_tol is not None:
            settings['rel_tol'] = rel_tol
        return QuadratureSpec(**settings)

    def window(self, key: str) -> Any:
        return self.windows[key]


class FastProfile(Profile):
    """Desk-scale runs: windows capped at 64."""

    def __init__(self):
        super().__init__("fast")
        self.quadrature = {
            'rel_tol': 1e-10,
            'abs_tol': 1e-12,
            'max_panels': 20000,
            'tail_cutoff': 10.0,
            'order': 10,
        }
        self.windows = {
            'max_N': 64,
            'hankel_N': [8, 16, 32, 64],
            'doublings': [256, 512, 1024],
            'cosine_N': [2000, 4000],
            'pairing_N': [64, 128, 256],
            'grid_step': 0.05,
        }
        self.limits = {
            'random_sequences': 50,
            'alphas': [0.0, 0.2, 0.5, 0.7, 0.9],
            'minimizer_rounds': 3,
            'power_iterations': 20000,
        }


class FullProfile(Profile):
    """Window-doubling studies at larger windows."""

    def __init__(self):
        super().__init__("full")
        self.quadrature = {
            'rel_tol': 1e-11,
            'abs_tol': 1e-13,
            'max_panels': 80000,
            'tail_cutoff': 20.0,
            'order': 12,
        }
        self.windows = {
            'max_N': 128,
            'hankel_N': [8, 16, 32, 64, 128],
            'doublings': [256, 512, 1024, 2048],
            'cosine_N': [2000, 4000, 8000],
            'pairing_N': [64, 128, 256, 512],
            'grid_step': 0.025,
        }
        self.limits = {
            'random_sequences': 50,
            'alphas': [0.0, 0.2, 0.5, 0.7, 0.9],
            'minimizer_rounds': 4,
            'power_iterations': 50000,
        }


def get_profile(profile_name: str) -> Profile:
    """Get profile by name, falling back to the fast profile."""
    profiles = {
        'fast': FastProfile(),
        'full': FullProfile(),
    }
    return profiles.get(profile_name, FastProfile())
