"""Exception hierarchy shared by all modules."""


class ModjacError(Exception):
    """Base class for every error raised by this package."""


class NotPrincipal(ModjacError):
    pass


class NotAlternating(ModjacError):
    pass


class NoRationalFound(ModjacError):
    """Rational reconstruction failed; usually the working precision is too low."""


class NotTenthPower(ModjacError):
    pass


class ParseError(ModjacError):
    pass


class RamanujanBoundViolated(ModjacError):
    pass


class InsufficientEigenvalues(ModjacError):
    pass


class PrecisionLoss(ModjacError):
    pass


class SingularOmega1(ModjacError):
    pass


class NotPositiveDefinite(ModjacError):
    pass


class Indeterminate(ModjacError):
    """A thetanullwert is too close to zero to decide vanishing at this precision."""


class TooManyInfiniteRoots(ModjacError):
    pass


class SignAmbiguous(ModjacError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class BadReduction(ModjacError):
    pass


class BadPrime(ModjacError):
    pass


class SingularCurve(ModjacError):
    pass


#: failures that the pipeline answers by doubling the working precision
PRECISION_ERRORS = (NoRationalFound, Indeterminate, NotTenthPower, PrecisionLoss)
