"""
bernstein-lab - numerical laboratory for duality in spaces of functions of exponential type.
"""

__version__ = "1.0.0"

from .bandlimited import Band, LatticeOffset, SampledBandlimited, interpolate, pw_norm
from .discrete_hardy import FiniteSequence, bmo_z_norm, discrete_hilbert, h1_norm
from .dual_map import XAlphaElement, t_alpha, x_alpha_norm
from .errors import BernsteinLabError, InputError, NumericalError
from .hankel import SymbolSpec, assemble, op_norm
from .projection import GridFunction, TailModel, project_l2, project_linf

__all__ = [
    "__version__",
    "Band",
    "LatticeOffset",
    "SampledBandlimited",
    "interpolate",
    "pw_norm",
    "FiniteSequence",
    "discrete_hilbert",
    "h1_norm",
    "bmo_z_norm",
    "XAlphaElement",
    "t_alpha",
    "x_alpha_norm",
    "SymbolSpec",
    "assemble",
    "op_norm",
    "GridFunction",
    "TailModel",
    "project_l2",
    "project_linf",
    "BernsteinLabError",
    "InputError",
    "NumericalError",
]
