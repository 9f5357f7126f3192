"""Exception hierarchy shared by all probekit modules."""


class ProbekitError(Exception):
    """Base class for every error raised by the library."""


class DegenerateDirection(ProbekitError):
    pass


class NotPrimitive(ProbekitError):
    pass


class NotDelzant(ProbekitError):
    pass


class DegeneratePolygon(ProbekitError):
    pass


class OutOfRange(ProbekitError):
    pass


class NotInward(ProbekitError):
    pass


class NodeOnBoundary(ProbekitError):
    pass


class CutCornerMissing(ProbekitError):
    pass


class CrossingCuts(ProbekitError):
    """Two nodes on one vertical line have cuts pointing at each other."""


class MutationBreaksConvexity(ProbekitError):
    pass


class InvalidSlide(ProbekitError):
    pass


class TradeBlocked(ProbekitError):
    pass


class SolveFailed(ProbekitError):
    def __init__(self, message, rank=None, augmented_rank=None, unknowns=None):
        super().__init__(message)
        self.rank = rank
        self.augmented_rank = augmented_rank
        self.unknowns = unknowns


class InvalidProbe(ProbekitError):
    pass


class NeedsWindow(ProbekitError):
    pass


class SpecError(ProbekitError):
    """Malformed polygon, report or combinatorics file."""
