"""Exception hierarchy shared by every module of the package."""


class SMSPError(Exception):
    """Base class for all errors raised by this package."""


class MatroidError(SMSPError):
    pass


class NonLaminarFamily(MatroidError):
    pass


class ClassesNotPartition(MatroidError):
    pass


class SparsityViolated(MatroidError):
    pass


class InvalidMatroidSpec(MatroidError):
    pass


class UnknownElement(SMSPError, KeyError):
    def __init__(self, elements):
        self.elements = sorted(elements)
        super().__init__(f"elements not in ground set: {self.elements}")

    def __str__(self):
        return self.args[0]


class GroundTooLarge(SMSPError):
    pass


class ObjectiveError(SMSPError):
    pass


class ElementAlreadyInSet(ObjectiveError):
    pass


class SetTooLargeForExactConvolution(ObjectiveError):
    pass


class GroundTooLargeForExactOpt(ObjectiveError):
    pass


class IndexOutOfRange(SMSPError, ValueError):
    pass


class InvalidConfig(SMSPError, ValueError):
    pass


class InvalidAlpha(InvalidConfig):
    pass


class InvalidArgs(InvalidConfig):
    pass


class BetaOutOfRange(InvalidConfig):
    pass


class VariantMismatch(SMSPError):
    pass


class UnknownGenerator(SMSPError, ValueError):
    pass


class TrialError(SMSPError):
    """Wraps an exception raised inside one Monte Carlo trial."""

    def __init__(self, trial: int, cause: BaseException):
        self.trial = trial
        self.cause = cause
        super().__init__(f"trial {trial} failed: {cause!r}")
