"""Exception hierarchy shared by every solver module."""


class RingDFTError(Exception):
    """Base class for all errors raised by :mod:`ringdft`."""


class ConfigurationError(RingDFTError, ValueError):
    """Invalid parameters (bad grid size, negative temperature, unknown key...)."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class UsageError(RingDFTError, ValueError):
    """A call that is inconsistent with the state of its arguments."""


class GridMismatchError(RingDFTError, ValueError):
    """A profile was combined with a grid it was not defined on."""


class NumericalError(RingDFTError, ArithmeticError):
    """A linear-algebra kernel failed."""

    def __init__(self, message, operator=None, step=None):
        super().__init__(message)
        self.operator = operator
        self.step = step


class DivergenceError(NumericalError):
    """A propagation blew up or produced a nonpositive partition function."""

    def __init__(self, message, operator=None, step=None, iteration=None):
        super().__init__(message, operator=operator, step=step)
        self.iteration = iteration


class InsufficientSpectrumError(NumericalError):
    """Too few eigenpairs were retained for the requested thermal weighting."""
