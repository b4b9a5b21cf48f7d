"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError`, which carries
an optional ``stage`` name so the command line can report where a pipeline
run broke down.
"""


class ParamBTError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ParamBTError, ValueError):
    """Invalid user configuration or model file."""


class NumericalError(ParamBTError):
    """A numerical kernel or pipeline stage failed."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class ShapeMismatch(ParamBTError, ValueError):
    pass


class InvalidOrder(ParamBTError, ValueError):
    pass


class InsufficientOrder(ParamBTError, ValueError):
    pass


class NotSymmetric(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class SingularInput(NumericalError):
    pass


class UnstableOrIllConditioned(NumericalError):
    pass


class LyapunovSolveFailed(NumericalError):
    pass


class SingularLeadingCoefficient(NumericalError):
    pass


class DegenerateSingularValues(NumericalError):
    pass


class CrossCheckFailed(NumericalError):
    pass


class NonpositiveSingularValue(NumericalError):
    pass


class SolveFailed(NumericalError):
    pass
