"""curvefactor: component structure and genera of curves P(x) - Q(y) = 0.

Given rational functions P and Q, this package decides whether the curve
P(x) - Q(y) = 0 is irreducible, lists its components with their genera, and
answers two functional-equation questions: does P(f) = Q(g) admit
non-constant meromorphic solutions, and is P a strong uniqueness function
(does P(f) = c P(g) force f = g and c = 1)?

The engine combines exact resultant arithmetic over the Gaussian rationals
with certified numerical monodromy: permutations are recovered by tracking
fibers along loops and cross-checked against exact cycle-type data at every
step, escalating through a precision ladder on failure.
"""

__version__ = "0.1.0"

from .decide import (
    AnalysisOptions,
    AnalysisReport,
    SelfAnalysisReport,
    SweepReport,
    UniquenessReport,
    analyze_pair,
    analyze_self,
    generic_sweep,
    sample_all_simple,
    sample_disjoint_pair,
    sample_rational,
    strong_uniqueness,
    uniqueness_sweep,
)
from .errors import (
    CurveFactorError,
    InputError,
    NumericFailure,
    ParseError,
)
from .gaussian import GaussianRational, gr
from .poly import Polynomial
from .ratfunc import RationalFunction

__all__ = [
    "AnalysisOptions",
    "AnalysisReport",
    "CurveFactorError",
    "GaussianRational",
    "InputError",
    "NumericFailure",
    "ParseError",
    "Polynomial",
    "RationalFunction",
    "SelfAnalysisReport",
    "SweepReport",
    "UniquenessReport",
    "analyze_pair",
    "analyze_self",
    "generic_sweep",
    "gr",
    "parse_function",
    "sample_all_simple",
    "sample_disjoint_pair",
    "sample_rational",
    "strong_uniqueness",
    "uniqueness_sweep",
]


def parse_function(text: str) -> RationalFunction:
    """Parse an expression in z (see `curvefactor.cli`) into a function."""
    from .cli import parse_function as _parse

    return _parse(text)
