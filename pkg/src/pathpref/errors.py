"""Exception types shared across the package."""


class PathprefError(Exception):
    """Base class for all package-specific errors."""


class NegativeCombinedCostError(PathprefError):
    """An edge's traverse time plus constraint weights went negative."""

    def __init__(self, edge_id, combined_cost, constraint_ids):
        self.edge_id = edge_id
        self.combined_cost = combined_cost
        self.constraint_ids = tuple(constraint_ids)
        super().__init__(
            f"combined cost of edge {edge_id} is {combined_cost} < 0 "
            f"(constraints on edge: {sorted(self.constraint_ids)})"
        )


class PlanningError(PathprefError):
    """Planner could not produce a path (e.g. goal unreachable)."""


class EnumerationLimitError(PathprefError):
    """Path enumeration aborted: instance too large."""


class DegenerateHalfspaceError(PathprefError):
    """Both paths have identical features and time; the pair carries no information."""


class ScenarioFormatError(PathprefError):
    """A scenario document violates the file schema."""


class ScenarioBuildError(PathprefError):
    """Scenario generation produced an unusable instance."""


class CalibrationError(PathprefError):
    """Rationality-coefficient calibration cannot reach the target accuracy."""


class ProtocolError(PathprefError):
    """Session operation invoked out of order (e.g. feedback without a pending query)."""


class BudgetExhaustedError(ProtocolError):
    """The session's iteration budget is spent; no further feedback is accepted."""
