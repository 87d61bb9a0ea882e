"""Error hierarchy shared by the services.

Each error carries the exit code the CLI reports for it, the way an HTTP error
carries its status code.
"""

from typing import List, Optional


class AchieveError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidInput(AchieveError):
    pass


class MixedDimension(AchieveError):
    pass


class DimensionMismatch(AchieveError):
    pass


class UnsupportedDimension(AchieveError):
    pass


class ResolutionCap(AchieveError):
    pass


class LatticeOverflow(AchieveError):
    pass


class NotABasis(AchieveError):
    pass


class InvalidStep(AchieveError):
    pass


class NotALoop(AchieveError):
    pass


class NotProper(AchieveError):
    pass


class ConstructionInvariantViolated(AchieveError):
    pass


class InvalidDecomposition(AchieveError):
    def __init__(self, detail: str, violations: Optional[List[str]] = None):
        super().__init__(detail)
        self.violations = list(violations or [])


class BudgetExceeded(AchieveError):
    exit_code = 3


class NodeLimit(AchieveError):
    exit_code = 3

    def __init__(self, detail: str, nodes: int = 0):
        super().__init__(detail)
        self.nodes = nodes
