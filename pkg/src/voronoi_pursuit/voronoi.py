"""The evader's proximity (Voronoi) cell and its active-edge bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import CollocatedAgents, GeometryError
from .geometry2d import (
    ConvexPolygon,
    HalfPlane,
    Point2,
    boundary_distances,
    clip_halfplanes,
    point,
)

COLLOCATION_TOL = 1e-9  # m


@dataclass(frozen=True)
class ActiveEdge:
    """Cell edge shared with one pursuer.

    ``endpoint_a`` -> ``endpoint_b`` is a clockwise edge of the cell, so the
    two indices are adjacent in the vertex cycle.
    """

    pursuer_index: int
    endpoint_a: int
    endpoint_b: int


@dataclass(frozen=True)
class ProximityCell:
    polygon: ConvexPolygon
    active: tuple  # tuple[ActiveEdge, ...], active[i] owns edge i

    @property
    def vertices(self) -> tuple:
        return self.polygon.vertices

    @property
    def active_pursuers(self) -> tuple:
        return tuple(e.pursuer_index for e in self.active)

    def edge_points(self, edge: ActiveEdge) -> tuple[Point2, Point2]:
        v = self.polygon.vertices
        return v[edge.endpoint_a], v[edge.endpoint_b]


def bisector_halfplane(evader, pursuer) -> HalfPlane:
    """Points at least as close to ``evader`` as to ``pursuer``."""
    nx, ny = pursuer[0] - evader[0], pursuer[1] - evader[1]
    mx, my = 0.5 * (pursuer[0] + evader[0]), 0.5 * (pursuer[1] + evader[1])
    return HalfPlane.from_normal((nx, ny), nx * mx + ny * my)


def _rotate_start(verts, tags, origin):
    # start at the vertex with the largest polar angle about the evader, ties -> nearer first
    def key(i):
        x, y = verts[i][0] - origin[0], verts[i][1] - origin[1]
        return (math.atan2(y, x), -math.hypot(x, y))

    start = max(range(len(verts)), key=key)
    return verts[start:] + verts[:start], tags[start:] + tags[:start]


def evader_cell(evader, pursuers: Sequence) -> ProximityCell:
    """Voronoi cell of ``evader`` among ``pursuers``, with its active pursuers."""
    evader = point(evader)
    pursuers = [point(p) for p in pursuers]
    if len(pursuers) < 3:
        raise GeometryError(f"need at least 3 pursuers, got {len(pursuers)}")
    for j, p in enumerate(pursuers):
        if math.hypot(p.x - evader.x, p.y - evader.y) <= COLLOCATION_TOL:
            raise CollocatedAgents(f"pursuer {j} is collocated with the evader")
    planes = [bisector_halfplane(evader, p) for p in pursuers]
    verts, tags = clip_halfplanes(planes, evader)
    verts, tags = _rotate_start(verts, tags, evader)
    n = len(verts)
    if len(set(tags)) != n:
        # a single bisector cannot own two edges of a convex cell
        raise GeometryError("cell edge attribution is inconsistent")
    active = tuple(ActiveEdge(tags[i], i, (i + 1) % n) for i in range(n))
    return ProximityCell(ConvexPolygon(tuple(verts)), active)


def mirror_check(cell: ProximityCell, evader, pursuers: Sequence) -> float:
    """Largest distance between a pursuer and the evader reflected across their shared edge."""
    worst = 0.0
    for edge in cell.active:
        a, b = cell.edge_points(edge)
        dx, dy = b[0] - a[0], b[1] - a[1]
        ll = dx * dx + dy * dy
        t = ((evader[0] - a[0]) * dx + (evader[1] - a[1]) * dy) / ll
        fx, fy = a[0] + t * dx, a[1] + t * dy
        rx, ry = 2 * fx - evader[0], 2 * fy - evader[1]
        p = pursuers[edge.pursuer_index]
        worst = max(worst, math.hypot(rx - p[0], ry - p[1]))
    return worst


def min_evader_boundary_distance(cell: ProximityCell, evader) -> float:
    d = min(boundary_distances(cell.polygon, evader))
    if d < 0.0:
        raise GeometryError("evader lies outside its cell")
    return d
