"""Exception hierarchy.

Two families: :class:`InputError` for malformed input (CLI exit status 1) and
:class:`ComputationError` for numerical or resource failures (exit status 2).
"""


class QmacError(Exception):
    """Base class for every error raised by this package."""


class InputError(QmacError):
    pass


class ComputationError(QmacError):
    pass


class NotSquare(ComputationError):
    pass


class NotHermitian(ComputationError):
    pass


class NegativeEigenvalue(ComputationError):
    pass


class DimensionMismatch(InputError):
    pass


class InvalidEnsemble(InputError):
    pass


class UnknownLetter(InputError):
    pass


class InvalidDistribution(InputError):
    pass


class InvalidProfile(InputError):
    pass


class InvalidSamplerPlan(InputError):
    pass


class LambdaOutOfRange(InputError):
    pass


class LengthMismatch(InputError):
    pass


class InvalidState(InputError):
    pass


class InvalidCodebook(InputError):
    pass


class ConfigError(InputError):
    pass


class DimensionCapExceeded(ComputationError):
    pass
