"""Planar geometry on small convex polygons.

Everything here works on plain Python floats; the polygons involved have a
handful of vertices and the per-call overhead of numpy would dominate.
Polygons are always stored clockwise, and areas are reported as positive
numbers (the raw shoelace sum of a clockwise polygon is negative).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import DegeneratePolygon, EmptyIntersection, GeometryError, UnboundedCell

MERGE_TOL = 1e-9  # m, vertices closer than this are merged
CROSS_TOL = 1e-12  # m^2, |cross| below this marks a degenerate corner
UNIT_TOL = 1e-12
DEFAULT_BOX_HALF_WIDTH = 1e6  # m


class Point2(NamedTuple):
    x: float
    y: float


def point(xy) -> Point2:
    """Coerce a length-2 sequence into a finite :class:`Point2`."""
    x, y = float(xy[0]), float(xy[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate ({x}, {y})")
    return Point2(x, y)


@dataclass(frozen=True)
class HalfPlane:
    """The closed half-plane ``{p : normal . p <= offset}``."""

    normal: Point2
    offset: float

    def __post_init__(self):
        nx, ny = self.normal
        if abs(math.hypot(nx, ny) - 1.0) > UNIT_TOL:
            raise GeometryError(f"half-plane normal {self.normal} is not unit length")
        if not math.isfinite(self.offset):
            raise GeometryError("half-plane offset must be finite")

    @classmethod
    def from_normal(cls, normal, offset: float) -> "HalfPlane":
        """Build a half-plane from an arbitrary-length normal, rescaling the offset."""
        nx, ny = float(normal[0]), float(normal[1])
        norm = math.hypot(nx, ny)
        if norm == 0.0:
            raise GeometryError("half-plane normal is zero")
        return cls(Point2(nx / norm, ny / norm), float(offset) / norm)

    def evaluate(self, p) -> float:
        """Signed violation: negative inside, zero on the line, positive outside."""
        return self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon with clockwise vertex order."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise DegeneratePolygon(f"polygon needs at least 3 vertices, got {n}")
        for i in range(n):
            a, b, c = verts[i], verts[(i + 1) % n], verts[(i + 2) % n]
            if math.hypot(b[0] - a[0], b[1] - a[1]) < MERGE_TOL:
                raise DegeneratePolygon(f"vertices {i} and {(i + 1) % n} coincide")
            cr = _cross(a, b, c)
            if cr > -CROSS_TOL:
                if abs(cr) <= CROSS_TOL:
                    raise DegeneratePolygon(f"collinear corner at vertex {(i + 1) % n}")
                raise DegeneratePolygon(
                    f"corner at vertex {(i + 1) % n} is not clockwise-convex (cross={cr:.3g})"
                )

    @classmethod
    def from_points(cls, points: Iterable) -> "ConvexPolygon":
        """Build a polygon from convex-position points given in any order."""
        return cls(tuple(clockwise_order(points)))

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def halfplanes(self) -> list[HalfPlane]:
        """Edge half-planes whose intersection is this polygon."""
        planes = []
        for a, b in self.edges():
            # clockwise: the interior lies to the right of a->b, outward normal is the left normal
            nx, ny = -(b[1] - a[1]), b[0] - a[0]
            planes.append(HalfPlane.from_normal((nx, ny), nx * a[0] + ny * a[1]))
        return planes


def clockwise_order(points: Iterable) -> list[Point2]:
    pts = [point(p) for p in points]
    if not pts:
        return pts
    cx = sum(p.x for p in pts) / len(pts)
    cy = sum(p.y for p in pts) / len(pts)
    return sorted(pts, key=lambda p: -math.atan2(p.y - cy, p.x - cx))


def convex_hull(points: Iterable) -> list[Point2]:
    """Clockwise convex hull (monotone chain); collinear points are dropped."""
    pts = sorted(set(point(p) for p in points))
    if len(pts) < 3:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) >= 0.0:
                out.pop()
            out.append(p)
        return out

    # cross >= 0 pops left turns, so each chain turns right: clockwise overall
    lower, upper = half(pts), half(reversed(pts))
    return lower[:-1] + upper[:-1]


def signed_area(vertices: Sequence) -> float:
    """Raw shoelace sum; negative for clockwise vertex order."""
    n = len(vertices)
    s = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def shoelace_area(poly: ConvexPolygon) -> float:
    return -signed_area(poly.vertices)


def area_rate(poly: ConvexPolygon, vertex_velocities: Sequence) -> float:
    """Time derivative of :func:`shoelace_area` when vertex ``i`` moves with velocity ``i``."""
    verts = poly.vertices
    n = len(verts)
    if len(vertex_velocities) != n:
        raise GeometryError(f"expected {n} vertex velocities, got {len(vertex_velocities)}")
    s = 0.0
    for i in range(n):
        xp, yp = verts[i - 1]
        xn, yn = verts[(i + 1) % n]
        vx, vy = vertex_velocities[i]
        s += (yn - yp) * vx + (xp - xn) * vy
    # derivative of the signed sum is s/2; flip sign for clockwise
    return -0.5 * s


def centroid(poly: ConvexPolygon) -> Point2:
    verts = poly.vertices
    n = len(verts)
    a = cx = cy = 0.0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        c = x0 * y1 - x1 * y0
        a += c
        cx += (x0 + x1) * c
        cy += (y0 + y1) * c
    if abs(a) < 2 * CROSS_TOL:
        raise DegeneratePolygon("zero-area polygon has no centroid")
    return Point2(cx / (3.0 * a), cy / (3.0 * a))


def boundary_distances(poly: ConvexPolygon, p) -> list[float]:
    """Signed perpendicular distance from ``p`` to every edge line, positive inside."""
    out = []
    for a, b in poly.edges():
        dx, dy = b[0] - a[0], b[1] - a[1]
        # right-hand side of a->b is inside for clockwise order
        out.append(((p[0] - a[0]) * dy - (p[1] - a[1]) * dx) / math.hypot(dx, dy))
    return out


def contains(poly: ConvexPolygon, p, tol: float = 0.0) -> bool:
    return min(boundary_distances(poly, p)) >= -tol


def _merge_close(verts, tags):
    changed = True
    while changed and len(verts) > 1:
        changed = False
        n = len(verts)
        for i in range(n):
            j = (i + 1) % n
            if math.hypot(verts[j][0] - verts[i][0], verts[j][1] - verts[i][1]) < MERGE_TOL:
                # edge i collapses; vertex j is absorbed into i
                del verts[j]
                del tags[i]
                changed = True
                break
    changed = True
    while changed and len(verts) > 3:
        changed = False
        n = len(verts)
        for i in range(n):
            h, j = (i - 1) % n, (i + 1) % n
            if abs(_cross(verts[h], verts[i], verts[j])) <= CROSS_TOL:
                del verts[i]
                del tags[i]
                changed = True
                break
    return verts, tags


def clip_halfplanes(planes: Sequence[HalfPlane], seed, half_width: float = DEFAULT_BOX_HALF_WIDTH):
    """Intersect half-planes by clipping a large box centred on ``seed``.

    Returns ``(vertices, sources)`` where ``vertices`` is clockwise and
    ``sources[i]`` is the index into ``planes`` of the half-plane carrying the
    edge from ``vertices[i]`` to ``vertices[i + 1]``. Box edges carry negative
    sources; if any survives the intersection is unbounded.
    """
    sx, sy = seed
    for k, hp in enumerate(planes):
        if hp.evaluate(seed) >= 0.0:
            raise GeometryError(f"seed does not strictly satisfy half-plane {k}")
    w = half_width
    verts = [(sx - w, sy - w), (sx - w, sy + w), (sx + w, sy + w), (sx + w, sy - w)]
    tags = [-1, -2, -3, -4]
    for k, hp in enumerate(planes):
        nx, ny = hp.normal
        off = hp.offset
        d = [nx * x + ny * y - off for x, y in verts]
        new_v, new_t = [], []
        n = len(verts)
        for i in range(n):
            j = (i + 1) % n
            da, db = d[i], d[j]
            a = verts[i]
            if da < 0.0:
                new_v.append(a)
                new_t.append(tags[i])
                if db > 0.0:
                    s = da / (da - db)
                    b = verts[j]
                    new_v.append((a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])))
                    new_t.append(k)
            elif da == 0.0:
                new_v.append(a)
                new_t.append(k if db > 0.0 else tags[i])
            elif db < 0.0:
                s = da / (da - db)
                b = verts[j]
                new_v.append((a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])))
                new_t.append(tags[i])
        verts, tags = _merge_close(new_v, new_t)
        if len(verts) < 3:
            raise EmptyIntersection("half-plane intersection is empty or degenerate")
    if any(t < 0 for t in tags):
        raise UnboundedCell("half-plane intersection is unbounded")
    return _refine(verts, tags, planes), tags


def _refine(verts, tags, planes):
    # clipping against the huge box costs ~1e6 * eps of absolute accuracy; re-solve
    # every vertex as the meeting point of the two lines carrying its edges
    out = []
    n = len(verts)
    for i in range(n):
        (a1, b1), c1 = planes[tags[i - 1]].normal, planes[tags[i - 1]].offset
        (a2, b2), c2 = planes[tags[i]].normal, planes[tags[i]].offset
        det = a1 * b2 - a2 * b1
        x, y = verts[i]
        if abs(det) > 1e-9:
            nx, ny = (c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det
            if math.hypot(nx - x, ny - y) < 1e-6 * (1.0 + math.hypot(x, y)):
                x, y = nx, ny
        out.append(Point2(x, y))
    return out


def halfplane_intersection(planes: Sequence[HalfPlane], seed) -> ConvexPolygon:
    verts, _ = clip_halfplanes(planes, point(seed))
    return ConvexPolygon(tuple(verts))


def chebyshev_center(poly: ConvexPolygon) -> tuple[Point2, float]:
    """Centre and radius of the largest circle inside ``poly``.

    Solves ``max r  s.t.  n_i . c + r <= b_i`` by enumerating vertices of the
    feasible region (triples of active edge constraints); the optimum of a
    bounded LP in three unknowns sits on one of them.
    """
    rows = []
    for hp in poly.halfplanes():
        rows.append((hp.normal[0], hp.normal[1], hp.offset))
    scale = max(max(abs(v.x), abs(v.y)) for v in poly.vertices) + 1.0
    best = None
    for i, j, k in itertools.combinations(range(len(rows)), 3):
        (a1, b1, c1), (a2, b2, c2), (a3, b3, c3) = rows[i], rows[j], rows[k]
        det = a1 * (b2 - b3) - b1 * (a2 - a3) + (a2 * b3 - a3 * b2)
        if abs(det) < 1e-12:
            continue
        x = (c1 * (b2 - b3) - b1 * (c2 - c3) + (c2 * b3 - c3 * b2)) / det
        y = (a1 * (c2 - c3) - c1 * (a2 - a3) + (a2 * c3 - a3 * c2)) / det
        r = (a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2) + c1 * (a2 * b3 - a3 * b2)) / det
        if r <= 0.0:
            continue
        if all(a * x + b * y + r <= c + 1e-9 * scale for a, b, c in rows):
            if best is None or r > best[2]:
                best = (x, y, r)
    if best is None:
        raise DegeneratePolygon("no interior circle found")
    return Point2(best[0], best[1]), best[2]


def regular_polygon_inscribed_radius(area: float, sides: int) -> float:
    """Inradius of the regular ``sides``-gon with the given area."""
    if sides < 3:
        raise GeometryError(f"a polygon needs at least 3 sides, got {sides}")
    if not area > 0:
        raise GeometryError(f"area must be positive, got {area}")
    return math.sqrt(area / (sides * math.tan(math.pi / sides)))
