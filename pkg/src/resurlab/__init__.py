"""Configurable-precision laboratory for resurgent asymptotic series.

Pipelines: divergent series -> Borel-plane singularity towers and Stokes
constants -> Dirichlet series and completed L-functions -> generating
q-series, median resummation, and quantum-modular cocycles, with bundled
exemplars that verify the structural identities at desk scale.
"""

from .precision import (
    DEFAULT_PRECISION_BITS,
    get_precision,
    set_precision,
    working_precision,
    bits_agree,
    digits_agree,
)
from .series import (
    FormalSeries,
    PrefixTerm,
    StokesTower,
    SIMPLE_POLE,
    LOG_BRANCH,
    borel_transform,
    gevrey1_fit,
    coefficients_from_stokes,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRECISION_BITS",
    "get_precision",
    "set_precision",
    "working_precision",
    "bits_agree",
    "digits_agree",
    "FormalSeries",
    "PrefixTerm",
    "StokesTower",
    "SIMPLE_POLE",
    "LOG_BRANCH",
    "borel_transform",
    "gevrey1_fit",
    "coefficients_from_stokes",
    "__version__",
]
