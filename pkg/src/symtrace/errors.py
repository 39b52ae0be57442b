"""Exception hierarchy shared by every module.

Each error carries an optional ``context`` string naming the operation that
raised it, so the command line can report where a computation failed.
"""


class SymtraceError(Exception):
    """Base class. ``exit_code`` is what the command line returns."""

    exit_code = 3

    def __init__(self, message, context=None):
        self.context = context
        if context:
            message = f"{context}: {message}"
        super().__init__(message)


class ParseError(SymtraceError):
    exit_code = 2

    def __init__(self, message, line=None, column=None, context=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message, context)


class PreconditionError(SymtraceError):
    exit_code = 3


class NumericError(SymtraceError):
    exit_code = 4


# symbol calculus
class InhomogeneousAngular(PreconditionError):
    pass


class RankMismatch(PreconditionError):
    pass


class NonIntegerDegree(PreconditionError):
    pass


class NonPolyhomogeneous(PreconditionError):
    pass


class NotScalarLeading(PreconditionError):
    pass


class NotMultiplier(PreconditionError):
    pass


# finite parts and residues
class FlaggedCompositionInput(PreconditionError):
    pass


class NotIntegrableAtOrigin(PreconditionError):
    pass


class LogTermAtResidueDegree(PreconditionError):
    pass


class OrderMismatch(PreconditionError):
    pass


class IllConditionedFit(NumericError):
    pass


# lattice sums
class NonPositiveP(PreconditionError):
    pass


class TailBoundExceedsTolerance(NumericError):
    pass


class InsufficientN(PreconditionError):
    pass


class NotTraceClassOrder(PreconditionError):
    pass


class NotIntegrableAfterM(PreconditionError):
    pass


class JOutOfRange(PreconditionError):
    pass


# expansions and zeta values
class IllConditioned(NumericError):
    pass


class ResidualTooLarge(NumericError):
    pass


class FitMarginInsufficient(NumericError):
    pass


class ZeroModeWithoutConvention(PreconditionError):
    pass


class SuiteFailure(SymtraceError):
    exit_code = 5
