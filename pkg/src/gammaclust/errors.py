"""Exception hierarchy shared by all modules."""


class GammaClustError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpace(GammaClustError, ValueError):
    """The distance matrix or weights do not describe a finite metric probability space."""


class AsymmetricMatrix(InvalidSpace):
    pass


class NegativeDistance(InvalidSpace):
    pass


class NonzeroDiagonal(InvalidSpace):
    pass


class TriangleViolation(InvalidSpace):
    def __init__(self, witness: tuple[int, int, int], message: str | None = None):
        self.witness = witness
        i, j, k = witness
        super().__init__(message or f"d({i},{k}) > d({i},{j}) + d({j},{k})")


class BadWeights(InvalidSpace):
    pass


class ShapeMismatch(GammaClustError, ValueError):
    pass


class EmptySet(GammaClustError, ValueError):
    """A proximity was requested against an empty (or zero-mass) set."""


class EmptyPart(EmptySet):
    pass


class DomainError(GammaClustError, ValueError):
    """Parameters outside the range where the operation is defined."""


class HasExceptionalPoints(DomainError):
    pass


class GammaTooSmall(DomainError):
    pass


class TooManyPartitions(GammaClustError, RuntimeError):
    pass


class BudgetExceeded(GammaClustError, RuntimeError):
    pass


class LaminarityViolation(GammaClustError, RuntimeError):
    def __init__(self, pair, message: str | None = None):
        self.pair = pair
        super().__init__(message or f"clusters {pair[0]} and {pair[1]} cross")


class PlantingFailed(GammaClustError, RuntimeError):
    pass


class DisconnectedGraph(UserWarning):
    """Emitted (not raised) when a gadget graph has more than one component."""
