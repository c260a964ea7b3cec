class DualCubeError(Exception):
    pass


class PocViolation(DualCubeError):
    """The requested order is not a poc-set order."""


class NotFilterBase(DualCubeError):
    pass


class NotMinimal(DualCubeError):
    pass


class BudgetExceeded(DualCubeError):
    """Enumeration stopped early; the partial graph is attached as ``graph``."""

    def __init__(self, message, graph=None):
        super().__init__(message)
        self.graph = graph


class GenerationFailed(DualCubeError):
    pass


class InvalidArrangement(DualCubeError):
    pass


class NotGeneric(DualCubeError):
    pass


class XNotInK(DualCubeError):
    pass


class WindowTooSmall(DualCubeError):
    pass


class ZeroDirection(DualCubeError):
    pass


class DegenerateSegment(DualCubeError):
    pass


class FrontierClipped(DualCubeError):
    pass


class IncompleteGraph(DualCubeError):
    pass


class NoConsistentVertex(DualCubeError):
    pass


class CapExceeded(DualCubeError):
    pass


class UntrustedHeights(DualCubeError):
    pass


class MInPi(DualCubeError):
    pass


class EmptySide(DualCubeError):
    pass


class SchemaError(DualCubeError):
    pass
