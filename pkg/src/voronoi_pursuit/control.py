"""Pursuer velocity commands that drive the evader cell toward its centroid.

Each cell vertex is steered toward the cell centroid at rate ``K``, which
makes the cell area obey ``dA/dt = -2 K A`` whatever the evader does. A
pursuer sharing an edge with the evader cell is then given the velocity that
moves the two endpoints of that edge as required; pursuers with no shared
edge hold still.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AlreadyCaptured, GeometryError, SingularGeometry
from .geometry2d import Point2, centroid, chebyshev_center
from .voronoi import ProximityCell

log = logging.getLogger(__name__)

SINGULAR_DET_TOL = 1e-9  # m^2


@dataclass(frozen=True)
class PursuerCommand:
    pursuer_index: int
    velocity: Point2


def _check_gain(gain: float) -> float:
    gain = float(gain)
    if not gain > 0 or not math.isfinite(gain):
        raise ValueError(f"gain K must be a positive finite number, got {gain}")
    return gain


def vertex_velocities(cell, gain: float) -> list[Point2]:
    """``K (centroid - q)`` for every vertex ``q`` of the cell."""
    gain = _check_gain(gain)
    poly = cell.polygon if isinstance(cell, ProximityCell) else cell
    cx, cy = centroid(poly)
    return [Point2(gain * (cx - qx), gain * (cy - qy)) for qx, qy in poly.vertices]


def pursuer_velocity(pursuer, evader, evader_velocity, q1, q2, q1_dot, q2_dot) -> Point2:
    """Velocity that keeps ``pursuer`` equidistant with the evader from both edge endpoints.

    Solves ``A u = B [q1_dot; q2_dot] + C evader_velocity`` where the rows of
    ``A`` are ``(pursuer - q_k)``, ``B`` is block-diagonal in
    ``(pursuer - evader)`` and the rows of ``C`` are ``(evader - q_k)``.
    """
    px, py = pursuer
    ex, ey = evader
    a11, a12 = px - q1[0], py - q1[1]
    a21, a22 = px - q2[0], py - q2[1]
    det = a11 * a22 - a12 * a21
    if abs(det) < SINGULAR_DET_TOL:
        raise SingularGeometry(f"pursuer system is singular (det={det:.3g})")
    dx, dy = px - ex, py - ey
    vx, vy = evader_velocity
    r1 = dx * q1_dot[0] + dy * q1_dot[1] + (ex - q1[0]) * vx + (ey - q1[1]) * vy
    r2 = dx * q2_dot[0] + dy * q2_dot[1] + (ex - q2[0]) * vx + (ey - q2[1]) * vy
    return Point2((a22 * r1 - a12 * r2) / det, (a11 * r2 - a21 * r1) / det)


def all_pursuer_commands(
    cell: ProximityCell,
    evader,
    pursuers: Sequence,
    evader_velocity,
    gain: float,
    speed_limit: Optional[float] = None,
) -> list[PursuerCommand]:
    """One command per pursuer; pursuers without a shared edge get zero velocity.

    ``speed_limit`` clips command magnitudes. It breaks the area-decay
    guarantee and is off by default.
    """
    qdot = vertex_velocities(cell, gain)
    verts = cell.polygon.vertices
    vel = [Point2(0.0, 0.0)] * len(pursuers)
    for edge in cell.active:
        i, j = edge.endpoint_a, edge.endpoint_b
        try:
            u = pursuer_velocity(
                pursuers[edge.pursuer_index], evader, evader_velocity,
                verts[i], verts[j], qdot[i], qdot[j],
            )
        except SingularGeometry as exc:
            raise SingularGeometry(str(exc), edge.pursuer_index) from None
        if speed_limit is not None:
            s = math.hypot(u.x, u.y)
            if s > speed_limit:
                u = Point2(u.x * speed_limit / s, u.y * speed_limit / s)
        vel[edge.pursuer_index] = u
    return [PursuerCommand(k, v) for k, v in enumerate(vel)]


def capture_time_bound(initial_area: float, sides: int, gain: float, capture_radius: float) -> float:
    """Worst-case capture time assuming a regular cell with the evader at its Chebyshev centre.

    Raises :class:`AlreadyCaptured` when the bound is not positive.
    """
    gain = _check_gain(gain)
    if not initial_area > 0:
        raise ValueError(f"initial area must be positive, got {initial_area}")
    if sides < 3:
        raise ValueError(f"need at least 3 sides, got {sides}")
    if not capture_radius > 0:
        raise ValueError(f"capture radius must be positive, got {capture_radius}")
    ratio = sides * capture_radius**2 * math.tan(math.pi / sides) / (4.0 * initial_area)
    if ratio >= 1.0:
        raise AlreadyCaptured(
            f"capture radius {capture_radius} already covers twice the regular-cell inradius"
        )
    return -math.log(ratio) / (2.0 * gain)


# -- evader policies --------------------------------------------------------


@dataclass(frozen=True)
class ConstantVelocity:
    velocity: tuple = (0.0, 0.0)
    name = "constant_velocity"
    needs_cell = False

    def __call__(self, t, evader, cell=None) -> Point2:
        return Point2(float(self.velocity[0]), float(self.velocity[1]))


@dataclass(frozen=True)
class Sinusoid:
    """Per axis ``amplitude * sin(frequency * t + phase) + bias``.

    ``Sinusoid((-2.5, -2.5), 0.06, (0, pi/2))`` gives
    ``(-2.5 sin 0.06t, -2.5 cos 0.06t)``.
    """

    amplitude: tuple
    frequency: float
    phase: tuple = (0.0, 0.0)
    bias: tuple = (0.0, 0.0)
    name = "sinusoid"
    needs_cell = False

    def __call__(self, t, evader, cell=None) -> Point2:
        w = self.frequency * t
        return Point2(
            self.amplitude[0] * math.sin(w + self.phase[0]) + self.bias[0],
            self.amplitude[1] * math.sin(w + self.phase[1]) + self.bias[1],
        )


@dataclass(frozen=True)
class MoveToCentroid:
    gain: float = 0.2
    name = "move_to_centroid"
    needs_cell = True

    def __call__(self, t, evader, cell=None) -> Point2:
        if cell is None:
            raise GeometryError("move_to_centroid needs the evader cell")
        cx, cy = centroid(cell.polygon)
        return Point2(self.gain * (cx - evader[0]), self.gain * (cy - evader[1]))


@dataclass(frozen=True)
class MoveToChebyshev:
    gain: float = 0.2
    name = "move_to_chebyshev"
    needs_cell = True

    def __call__(self, t, evader, cell=None) -> Point2:
        if cell is None:
            raise GeometryError("move_to_chebyshev needs the evader cell")
        (cx, cy), _ = chebyshev_center(cell.polygon)
        return Point2(self.gain * (cx - evader[0]), self.gain * (cy - evader[1]))


@dataclass(frozen=True)
class Custom:
    """Velocity schedule linearly interpolated in time, held constant past either end.

    Pass ``function`` instead of a table to supply velocities programmatically;
    it is called as ``function(t, evader, cell)``.
    """

    times: tuple = ()
    velocities: tuple = ()
    function: Optional[Callable] = field(default=None, compare=False)
    name = "custom"

    @property
    def needs_cell(self) -> bool:
        return self.function is not None

    def __post_init__(self):
        if self.function is None:
            if len(self.times) == 0 or len(self.times) != len(self.velocities):
                raise ValueError("custom schedule needs matching, non-empty times and velocities")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("custom schedule times must be strictly increasing")

    def __call__(self, t, evader, cell=None) -> Point2:
        if self.function is not None:
            vx, vy = self.function(t, evader, cell)
            return Point2(float(vx), float(vy))
        v = np.asarray(self.velocities, dtype=float)
        return Point2(
            float(np.interp(t, self.times, v[:, 0])),
            float(np.interp(t, self.times, v[:, 1])),
        )


EVADER_POLICIES = {
    cls.name: cls for cls in (ConstantVelocity, Sinusoid, MoveToCentroid, MoveToChebyshev, Custom)
}


def evader_velocity(policy, t: float, evader, cell: Optional[ProximityCell] = None) -> Point2:
    v = policy(t, evader, cell)
    if not (math.isfinite(v[0]) and math.isfinite(v[1])):
        raise ValueError(f"evader policy {policy!r} produced a non-finite velocity at t={t}")
    return v
