"""Exception hierarchy.

Everything raised on bad input derives from :class:`TapError`, so callers
(the CLI in particular) can tell input problems apart from bugs.
"""


class TapError(Exception):
    """Base class for all package errors."""


class InstanceError(TapError, ValueError):
    """The instance violates a structural invariant."""


class DisconnectedTree(InstanceError):
    pass


class CycleDetected(InstanceError):
    pass


class UnknownVertex(InstanceError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownEdge(InstanceError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownLink(InstanceError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NegativeCost(InstanceError):
    pass


class SelfLoopLink(InstanceError):
    pass


class DuplicateLinkId(InstanceError):
    pass


class EmptyTree(InstanceError):
    pass


class NotLeafToLeaf(InstanceError):
    pass


class NotStarShaped(InstanceError):
    pass


class LevelOutOfRange(TapError, ValueError):
    pass


class MalformedProblem(TapError, ValueError):
    pass


class EvenBoundary(TapError, ValueError):
    pass


class NotFeasible(TapError, ValueError):
    pass


class TooLarge(TapError):
    """Exhaustive work would exceed the configured size limit."""


class Infeasible(TapError):
    """Some tree edge cannot be covered by any link."""


class UncoverableEdge(Infeasible):
    def __init__(self, edge):
        super().__init__(f"tree edge {edge!r} is covered by no link")
        self.edge = edge
