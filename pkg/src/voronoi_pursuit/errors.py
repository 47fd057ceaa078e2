"""Exception types shared across the package."""


class PursuitError(Exception):
    """Base class for all errors raised by voronoi_pursuit."""


class GeometryError(PursuitError, ValueError):
    """Invalid or degenerate planar geometry."""


class DegeneratePolygon(GeometryError):
    pass


class UnboundedCell(GeometryError):
    """The half-plane intersection is not bounded.

    For the evader cell this means the evader is not strictly inside the
    convex hull of the pursuers.
    """


class EmptyIntersection(GeometryError):
    pass


class CollocatedAgents(GeometryError):
    pass


class SingularGeometry(PursuitError, ArithmeticError):
    """The 2x2 system for a pursuer command is (numerically) singular."""

    def __init__(self, message, pursuer_index=None):
        super().__init__(message)
        self.pursuer_index = pursuer_index


class AlreadyCaptured(PursuitError):
    """The capture-time bound is non-positive: capture condition already met."""


class ScenarioError(PursuitError, ValueError):
    """A scenario failed validation. ``problems`` lists field-level messages."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class TimeseriesError(PursuitError, ValueError):
    """A timeseries file could not be parsed. ``row`` is 1-based, counting the header."""

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)
