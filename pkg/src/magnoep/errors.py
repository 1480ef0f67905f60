"""Exception types raised across the package."""


class MagnoEPError(Exception):
    """Base class for all package errors."""


class ZeroDenominator(MagnoEPError, ZeroDivisionError):
    pass


class NondegenerateModes(MagnoEPError, ValueError):
    """Raised when the two-mode reduction is requested for omega_1 != omega_2."""


class NotPseudoHermitian(MagnoEPError, ValueError):
    pass


class AmbiguousPhase(MagnoEPError):
    """Neither the broken nor the unbroken eigenvalue pattern holds."""


class NoSignChange(MagnoEPError, ValueError):
    pass


class StepTooLarge(MagnoEPError, ValueError):
    pass


class TooShort(MagnoEPError, ValueError):
    """Trajectory has too few envelope peaks to fit."""


class ParseError(MagnoEPError, ValueError):
    pass


class ValidationError(MagnoEPError, ValueError):
    """Config violates one or more constraints; ``problems`` lists all of them."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SerializationError(MagnoEPError, ValueError):
    pass


class AdiabaticValidityWarning(UserWarning):
    """Decay rate is not much larger than the coupling being eliminated."""
