"""Exception hierarchy shared by all modules."""


class InducertError(Exception):
    """Base class for every error raised by this package."""


class ZeroPolynomial(InducertError):
    pass


class RadicandOverflow(InducertError):
    """A value would need more than two independent square roots."""


class TooLarge(InducertError):
    pass


class NotEmbeddable(InducertError):
    pass


class MalformedGraph6(InducertError, ValueError):
    pass


class BlockBudgetExceeded(InducertError):
    pass


class OrderOutOfRange(InducertError):
    pass


class BoundaryP(InducertError):
    pass


class IdenticallyZero(InducertError):
    pass


class ZeroMu(InducertError):
    pass


class ImaginaryResidue(InducertError):
    """Internal consistency failure: a real density came out with imaginary part."""


class UnsupportedPrime(InducertError):
    pass


class NoValidForm(InducertError):
    pass


class SearchExhausted(InducertError):
    pass


class ExceptionalPoint(InducertError):
    """The linear perturbation is uninformative at this p."""


class SupportDegenerate(InducertError):
    pass


class RangeViolation(InducertError):
    pass


class PreconditionError(InducertError, ValueError):
    pass
