"""Exception hierarchy shared by every hahnfield module."""


class HahnFieldError(Exception):
    """Base class for all errors raised by the library."""


class DivisionByZero(HahnFieldError, ZeroDivisionError):
    pass


class UndecidedAtPrecision(HahnFieldError, ArithmeticError):
    """Interval enclosures still overlap at the precision cap.

    Callers must treat this as a hard failure, never as equality.
    """


class NonPositiveArgument(HahnFieldError, ValueError):
    pass


class MixedRepresentation(HahnFieldError, TypeError):
    """Nested omega-monomials and free monomials were combined."""


class ChainMismatch(HahnFieldError, TypeError):
    pass


class TruncationObscuresComparison(HahnFieldError, ArithmeticError):
    """A remainder bound is too coarse to decide the requested relation."""


class ZeroArgument(HahnFieldError, ValueError):
    pass


class NotInfinitesimal(HahnFieldError, ValueError):
    pass


class CenterOutOfRange(HahnFieldError, ValueError):
    pass


class IotaRangeViolation(HahnFieldError, ValueError):
    pass


class PsiRangeViolation(HahnFieldError, ValueError):
    pass


class DomainViolation(HahnFieldError, ValueError):
    pass


class RangeViolation(HahnFieldError, ValueError):
    pass


class UnknownRule(HahnFieldError, KeyError):
    pass


class WitnessNotFound(HahnFieldError):
    pass


class StageInvariantFailure(HahnFieldError):
    """A sampled tower invariant failed; ``counterexample`` holds the data."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class UnexpectedRecursion(HahnFieldError, RuntimeError):
    pass


class ExprSyntaxError(HahnFieldError, SyntaxError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class UnknownIdentifier(HahnFieldError, NameError):
    pass
