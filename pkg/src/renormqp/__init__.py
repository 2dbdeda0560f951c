"""Quasi-periodic doubling renormalization for forced unimodal maps.

Modules
-------
analytic   disc-centred Taylor maps, trigonometric polynomials, quasi-periodic maps
renorm1d   the 1-D doubling operator, its fixed point and spectrum
qp         the quasi-periodic operator, its derivative and Fourier-block spectra
families   the normalized forced logistic family and the slope formulas
dynamics   direct dynamics: invariant curves, reducibility indicator, boundaries
cli        command line front end
"""

__version__ = "0.1.0"

from .analytic import AnalyticMap1D, ModePair, PeriodicFn, QPMap  # noqa: E402
from .config import GOLDEN_MEAN, DiscDomain, RenormConfig  # noqa: E402
from .errors import RenormError  # noqa: E402

__all__ = [
    "AnalyticMap1D", "ModePair", "PeriodicFn", "QPMap",
    "DiscDomain", "RenormConfig", "GOLDEN_MEAN", "RenormError", "__version__",
]
