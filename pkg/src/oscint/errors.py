"""Exception hierarchy shared by all oscint modules."""


class OscintError(Exception):
    """Base class for every error raised by this package."""


class FewnomialError(OscintError, ValueError):
    pass


class NonIncreasingExponents(FewnomialError):
    pass


class ZeroCoefficient(FewnomialError):
    pass


class LinearTermPresent(FewnomialError):
    def __init__(self, msg=None):
        super().__init__(
            msg
            or "exponent 1 is not allowed: absorb the linear term into the "
            "frequency variable (or pass --drop-linear on the command line)"
        )


class PhaseOverflow(OscintError, OverflowError):
    """The phase or one of its derivatives is not representable; rescale t."""


class DegeneratePhase(OscintError, ValueError):
    pass


class IndexOutOfRange(OscintError, IndexError):
    pass


class EmptyWindow(OscintError, ValueError):
    pass


class InvalidDimensions(OscintError, ValueError):
    pass


class InsufficientPoints(OscintError, ValueError):
    pass


class ToleranceNotMet(OscintError, ArithmeticError):
    """Certification failed.

    The best available estimate is kept on the exception so callers that
    can tolerate uncertified values (sweeps) may still report it.
    """

    def __init__(self, msg, value=None, abs_err=None):
        super().__init__(msg)
        self.value = value
        self.abs_err = abs_err
