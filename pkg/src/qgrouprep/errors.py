"""Exception and warning types shared across the package."""


class QGroupRepError(Exception):
    """Base class for every error raised by qgrouprep."""


class InputError(QGroupRepError, ValueError):
    """Malformed or inconsistent input (maps to CLI exit code 2)."""


class VerificationError(QGroupRepError):
    """A mathematical property failed to hold (maps to CLI exit code 1)."""


# group_core
class ClosureExceeded(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class UnassignedLabel(InputError, KeyError):
    pass


class ParseError(InputError):
    pass


class NotSubgroup(InputError):
    pass


# qlinalg
class NonSquare(InputError):
    pass


class DimMismatch(InputError):
    pass


class NotUnitary(InputError):
    pass


class ZeroVector(InputError):
    pass


class NotHomomorphism(VerificationError):
    pass


class SingularFactorization(VerificationError):
    pass


# repr_synth
class TooLarge(InputError):
    pass


class NotFaithful(VerificationError):
    pass


class DimTooSmall(InputError):
    pass


class SearchFailed(VerificationError):
    pass


# circuits
class TooWide(InputError):
    pass


class NotPowerOfTwo(InputError):
    pass


class DegreeTooLarge(InputError):
    pass


# vqa
class LengthMismatch(InputError):
    pass


class UnknownLabel(InputError, KeyError):
    pass


class RelationViolation(VerificationError):
    pass


# applications
class BadTarget(InputError):
    pass


class NotCoprime(InputError):
    pass


class PhaseDegenerateWarning(UserWarning):
    """A non-identity element maps to a scalar multiple of the identity."""


class BudgetExhausted(UserWarning):
    """Training stopped on its evaluation budget before reaching the target cost.

    Issued as a warning; ``best_params`` and ``best_cost`` carry the best point seen.
    """

    def __init__(self, message, best_params=None, best_cost=None):
        super().__init__(message)
        self.best_params = best_params
        self.best_cost = best_cost
