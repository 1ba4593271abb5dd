from typing import Any, Dict, List, Optional, Sequence, Set


class PolygError(Exception):
    """Base class for every error raised by the solver, verifier and file readers."""


class InputError(PolygError):
    """Unparseable or invalid instance/solution data."""


class UnsolvableInstance(PolygError):
    """Fewer than three points, or all points collinear."""


class ContractViolation(PolygError, ValueError):
    pass


class VerificationError(PolygError):
    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class GreedyFailure(PolygError):
    """Raised when unconnected points remain but no heap holds a valid insertion."""

    def __init__(self, polygon: Any, unconnected: Set[int], message: str = ""):
        self.polygon = polygon
        self.unconnected = set(unconnected)
        super().__init__(message or f"greedy failed with {len(self.unconnected)} unconnected point(s)")


class SolveFailure(PolygError):
    def __init__(self, message: str, attempts: Sequence[Dict[str, Any]] = ()):
        super().__init__(message)
        self.attempts: List[Dict[str, Any]] = list(attempts)


class MergeFailure(PolygError):
    def __init__(self, message: str, components: Sequence[Sequence[Any]] = ()):
        super().__init__(message)
        self.components = [list(c) for c in components]
