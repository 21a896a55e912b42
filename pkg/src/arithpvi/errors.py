"""Exception hierarchy.

Every failure mode the engine distinguishes gets its own class so callers
(and the command line front end) can map them to exit codes without string
matching.
"""


class ArithPviError(Exception):
    """Base class for all engine errors."""


class PrecisionError(ArithPviError):
    """A result would claim more trusted digits than the inputs support,
    or a comparison was requested beyond the certified precision."""


class ValuationFloorError(ArithPviError):
    """A fraction-field element crossed the configured negative-valuation
    floor.  Loud by design: silent deep poles are always bugs here."""


class IntegralityError(ArithPviError):
    """An exact divisibility guaranteed by a theorem failed.  This is an
    internal assertion, not a user input problem."""


class ConvergenceError(ArithPviError):
    """A truncated series was evaluated where its tail is not controlled
    (unit substituted into a non-polynomial series)."""


class ValidationError(ArithPviError):
    """Malformed or out-of-contract user input."""


class PoleError(ValidationError):
    """Evaluation requested at a deleted section (a pole of r)."""


class UnsupportedRegimeError(ArithPviError):
    """Mathematically out of scope: supersingular or anomalous reduction,
    missing rational 2-torsion on an image curve, p = 2 or 3."""


class BudgetError(ArithPviError):
    """An enumeration or degree bound exceeded the configured budget."""
