"""Exceptions raised by polyak_rates.

Every exception carries the process exit code the command line reports for it.

"""


class Error(Exception):

    """Base class for all polyak_rates errors."""

    exit_code = 1


class InputError(Error, ValueError):

    """Malformed or inconsistent input."""

    exit_code = 2


class PreconditionError(Error):

    """Input is well formed, but the requested computation is not defined for it."""

    exit_code = 3


class DimensionMismatch(InputError):
    pass


class EmptySetList(InputError):
    pass


class NonFiniteValue(InputError):
    pass


class NonPositiveBase(InputError):
    pass


class BadIndices(InputError):
    pass


class DomainError(InputError):
    pass


class BadMultipliers(InputError):
    pass


class LengthMismatch(InputError):
    pass


class ParseError(InputError):
    pass


class InfeasibleStart(PreconditionError):
    pass


class MissingOptimalValue(PreconditionError):
    pass


class MissingSubgradientBound(PreconditionError):
    pass


class ZeroSubgradient(PreconditionError):
    pass


class NotPositiveDefinite(PreconditionError):
    pass


class SingularMatrix(PreconditionError):
    pass


class NoConvergence(PreconditionError):
    pass


class ConstructionError(PreconditionError):
    pass
