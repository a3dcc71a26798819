"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class WeylScatterError(Exception):
    """Base class for every error raised by the package."""


class NonSquare(WeylScatterError, ValueError):
    pass


class NonHermitian(WeylScatterError, ValueError):
    pass


class NotPSD(WeylScatterError, ValueError):
    pass


class NotDissipative(WeylScatterError, ValueError):
    pass


class Singular(WeylScatterError, ArithmeticError):
    pass


class IllConditioned(WeylScatterError, ArithmeticError):
    def __init__(self, message: str, cond: float = float("inf")):
        super().__init__(message)
        self.cond = cond


class NearPole(WeylScatterError, ArithmeticError):
    """Evaluation point sits on (or numerically at) a pole of a Weyl function."""

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message)
        self.location = location


class EvaluationFailed(WeylScatterError, RuntimeError):
    pass


class StepFailure(EvaluationFailed):
    pass


class ProfileGap(WeylScatterError, ValueError):
    pass


class NoBoundaryLimit(WeylScatterError, ArithmeticError):
    pass


class OutsideDomain(WeylScatterError, ValueError):
    pass


class ConfigError(WeylScatterError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class Abort(WeylScatterError, RuntimeError):
    """A numerical guard fired while the sweep runs under the ``abort`` policy."""
