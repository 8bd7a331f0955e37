"""Exception hierarchy shared by all graphlike modules."""

from __future__ import annotations


class GraphlikeError(Exception):
    """Base class for every error raised by the library."""


# construction
class NonPositiveLength(GraphlikeError, ValueError):
    pass


class DanglingEndpoint(GraphlikeError, ValueError):
    pass


class SelfLoop(GraphlikeError, ValueError):
    pass


class DuplicateId(GraphlikeError, ValueError):
    pass


# lookup
class UnknownEdge(GraphlikeError, KeyError):
    pass


class UnknownVertex(GraphlikeError, KeyError):
    pass


class UnknownPoint(GraphlikeError, KeyError):
    pass


class FractionOutOfRange(GraphlikeError, ValueError):
    pass


# connectivity
class Disconnected(GraphlikeError):
    pass


class DisconnectedPart(Disconnected):
    pass


# electrical
class HostMismatch(GraphlikeError):
    pass


class InvalidFlow(GraphlikeError):
    pass


class SamePoint(GraphlikeError, ValueError):
    pass


class TooLarge(GraphlikeError):
    pass


class BoundaryNotTwo(GraphlikeError):
    pass


class EndpointDegreeNotOne(GraphlikeError):
    pass


class NotShortestPath(GraphlikeError):
    pass


class BoundViolation(GraphlikeError, AssertionError):
    """A proven inequality failed numerically; indicates a bug or bad input."""


# sequences and measure
class NonSummable(GraphlikeError, ValueError):
    pass


class CutNotAchievable(GraphlikeError):
    pass


class StaleCut(GraphlikeError):
    pass


class PathNotInK(GraphlikeError):
    pass


class BudgetExhausted(GraphlikeError):
    """Raised when an iterative search runs out of budget.

    ``best`` carries the best partial result obtained so far, so callers can
    still report it.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class DisconnectedH(DisconnectedPart):
    pass
