"""Exception hierarchy shared across the package."""


class CptError(Exception):
    """Base class for every error raised by :mod:`cpt`."""


# field construction / arithmetic
class BadPolynomial(CptError, ValueError):
    pass


class NotPrimitive(CptError, ValueError):
    pass


class DivideByZero(CptError, ZeroDivisionError):
    pass


# codec
class ParamsInvalid(CptError, ValueError):
    pass


class ShapeMismatch(CptError, ValueError):
    pass


class InsufficientPackets(CptError):
    """Fewer than k coded rows survived; the packet set cannot be decoded."""

    def __init__(self, received, needed):
        super().__init__(f"received {received} coded packets, need {needed}")
        self.received = received
        self.needed = needed


class SingularSubmatrix(CptError, ArithmeticError):
    pass


# transport
class TooManyPaths(CptError, ValueError):
    pass


class EmptyPayload(CptError, ValueError):
    pass


class HeaderMismatch(CptError, ValueError):
    pass


class ChecksumFailure(CptError, ValueError):
    pass


class UnknownRow(CptError, KeyError):
    pass


# analysis
class BadPathCount(CptError, ValueError):
    pass


class BadParams(CptError, ValueError):
    pass


class BadProbability(BadParams):
    pass


class SecrecyViolated(CptError, ValueError):
    pass


class Infeasible(CptError):
    pass


# simulation / adversary
class BadSpec(CptError, ValueError):
    pass


class PredicateUnsatisfiable(CptError):
    pass
