"""Fourier analysis of semi-measures on finite groups and a windowed real line.

Semi-measures are linear functionals on ``K2(G)``, the span of convolutions of
compactly supported functions.  The Fourier transformable ones are stored
through their dual measure; from there the package evaluates them, forms
convolutions, tests positive definiteness, splits them by Eberlein and
probes whether they are measures at all.
"""

__version__ = "0.1.0"

from .group import GroupSpec, Finite, RealLine, VanHoveSequence, dual  # noqa: E402
from .measure import ConcreteMeasure, fourier_transform_measure, lebesgue_parts  # noqa: E402
from .semimeasure import SemiMeasure, evaluate, from_dual, is_positive_definite, lift  # noqa: E402
from .decomp import eberlein, fb_coefficient, fb_series, generalized_eberlein  # noqa: E402
from .report import ProbeReport  # noqa: E402

__all__ = [
    "__version__",
    "GroupSpec",
    "Finite",
    "RealLine",
    "VanHoveSequence",
    "dual",
    "ConcreteMeasure",
    "fourier_transform_measure",
    "lebesgue_parts",
    "SemiMeasure",
    "evaluate",
    "from_dual",
    "is_positive_definite",
    "lift",
    "eberlein",
    "fb_coefficient",
    "fb_series",
    "generalized_eberlein",
    "ProbeReport",
]
