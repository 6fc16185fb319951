"""Error taxonomy for the analysis pipeline.

Two families matter to callers: input errors (bad expressions, degenerate
functions) and numeric failures (anything the precision ladder may cure by
retrying at higher precision).  The CLI maps the first family to exit code 1
and the second, once the ladder is exhausted, to exit code 2.
"""

from __future__ import annotations


class CurveFactorError(Exception):
    """Base class for every error raised by this package."""


class InputError(CurveFactorError):
    """User-supplied input is invalid; retrying cannot help."""


class ZeroDenominator(InputError):
    """A rational function was built with an identically-zero denominator."""


class DegreeZero(InputError):
    """A constant (degree-0) function reached an entry point that needs degree >= 1."""


class ParseError(InputError):
    """Syntax error in an input expression.

    Carries the byte offset of the failure and a short description of what
    was expected there.  (Named ParseError rather than SyntaxError to avoid
    shadowing the builtin.)
    """

    def __init__(self, offset: int, expected: str):
        self.offset = offset
        self.expected = expected
        super().__init__(f"syntax error at offset {offset}: expected {expected}")


class EmptyCriticalSet(CurveFactorError):
    """No critical values were found where at least two are guaranteed."""


class NumericFailure(CurveFactorError):
    """Base class for failures that escalating precision may resolve."""


class NumericallyCoincidentValues(NumericFailure):
    """Two candidate critical values are closer than the working tolerance
    but the exact multiplicity bookkeeping disagrees with the clustering."""


class PathJumpSuspected(NumericFailure):
    """Two tracked fiber points came close enough that sheets may have been
    confused, or endpoint matching was ambiguous."""


class NoConvergence(NumericFailure):
    """An iteration (root finder, corrector, step control) failed to converge
    within its budget."""


class ConsistencyFailure(NumericFailure):
    """A cross-check between two independent computations disagreed."""


class NonIntegerGenus(ConsistencyFailure):
    """A Riemann-Hurwitz count produced a non-integer or negative genus."""


# Alias for callers that expect the stdlib-style name for a syntax failure;
# the class itself is named ParseError so nothing inside this package shadows
# the builtin.
SyntaxError = ParseError  # noqa: A001
