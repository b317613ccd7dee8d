"""Exception hierarchy shared by every module of the package."""


class PossibleWorldsError(Exception):
    """Base class for all errors raised by this package."""


# graph construction and queries
class DuplicateVertex(PossibleWorldsError, ValueError):
    pass


class UnknownEndpoint(PossibleWorldsError, ValueError):
    pass


class DuplicateEdge(PossibleWorldsError, ValueError):
    pass


class UnknownVertex(PossibleWorldsError, KeyError):
    pass


class CyclicGraph(PossibleWorldsError, ValueError):
    pass


# causal structures
class NotLatent(PossibleWorldsError, ValueError):
    pass


class LatentNotExogenous(PossibleWorldsError, ValueError):
    pass


class NotExoSimplicial(PossibleWorldsError, ValueError):
    pass


class InvalidStructure(PossibleWorldsError, ValueError):
    pass


# probability
class WeightSumNotOne(PossibleWorldsError, ValueError):
    pass


class VariableMismatch(PossibleWorldsError, ValueError):
    pass


class ZeroProbabilityEvidence(PossibleWorldsError, ValueError):
    pass


class InvalidDistribution(PossibleWorldsError, ValueError):
    pass


# worlds and search
class IncompleteTable(PossibleWorldsError):
    """A world needed a table entry that was never assigned."""

    def __init__(self, blocking):
        self.blocking = sorted(blocking)
        shown = ", ".join(f"{v}{list(k)}" for v, k in self.blocking[:5])
        more = "" if len(self.blocking) <= 5 else f" (+{len(self.blocking) - 5} more)"
        super().__init__(f"function table is missing reachable entries: {shown}{more}")


class NotABijection(PossibleWorldsError, ValueError):
    pass


class OrbitTooLarge(PossibleWorldsError):
    pass


class EmptySupport(PossibleWorldsError, ValueError):
    pass


class CardinalityMismatch(PossibleWorldsError, ValueError):
    pass


class NonBooleanVisible(PossibleWorldsError, ValueError):
    pass


class EnumerationBudgetExceeded(PossibleWorldsError):
    """Raised instead of silently returning a truncated enumeration."""

    def __init__(self, message, nodes=None):
        self.nodes = nodes
        super().__init__(message)
