"""Multi-pursuer capture of a single evader by shrinking the evader's Voronoi cell."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlreadyCaptured,
    CollocatedAgents,
    DegeneratePolygon,
    EmptyIntersection,
    GeometryError,
    PursuitError,
    ScenarioError,
    SingularGeometry,
    TimeseriesError,
    UnboundedCell,
)
from .geometry2d import ConvexPolygon, HalfPlane, Point2  # noqa: E402
from .voronoi import ProximityCell, evader_cell  # noqa: E402
from .control import all_pursuer_commands, capture_time_bound  # noqa: E402
from .estimation import FilterSettings, NoiseModel  # noqa: E402
from .simulator import Scenario, SimOutcome, SimRecord, Status, run  # noqa: E402

__all__ = [
    "AlreadyCaptured", "CollocatedAgents", "DegeneratePolygon", "EmptyIntersection", "GeometryError",
    "PursuitError", "ScenarioError", "SingularGeometry", "TimeseriesError", "UnboundedCell",
    "ConvexPolygon", "HalfPlane", "Point2", "ProximityCell", "evader_cell",
    "all_pursuer_commands", "capture_time_bound", "FilterSettings", "NoiseModel",
    "Scenario", "SimOutcome", "SimRecord", "Status", "run", "__version__",
]
