"""Fixed-step simulation of single-integrator pursuers closing on an evader."""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .control import (
    ConstantVelocity,
    all_pursuer_commands,
    capture_time_bound,
    evader_velocity,
)
from .errors import (
    AlreadyCaptured,
    GeometryError,
    ScenarioError,
    SingularGeometry,
    UnboundedCell,
)
from .estimation import (
    FilterSettings,
    NoiseModel,
    add_measurement_noise,
    kf_init,
    kf_step,
    white_jerk_q,
)
from .geometry2d import Point2, boundary_distances, convex_hull, point, shoelace_area
from .voronoi import COLLOCATION_TOL, evader_cell

log = logging.getLogger(__name__)

INTEGRATORS = ("euler", "rk4")


class Status(str, enum.Enum):
    CAPTURED = "captured"
    TIMED_OUT = "timed_out"
    EVADER_ESCAPED_HULL = "evader_escaped_hull"
    SINGULAR_GEOMETRY = "singular_geometry"


@dataclass(frozen=True)
class Scenario:
    pursuers: tuple
    evader: Point2
    gain: float = 0.05
    capture_radius: float = 0.2
    evader_policy: object = ConstantVelocity()
    dt: float = 1e-3
    max_time: Optional[float] = None  # None -> twice the capture-time bound
    noise: Optional[NoiseModel] = None
    filter: Optional[FilterSettings] = None
    integrator: str = "euler"
    speed_limit: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(point(p) for p in self.pursuers))
        object.__setattr__(self, "evader", point(self.evader))

    def problems(self) -> list[str]:
        """Field-level validation messages; empty when the scenario is runnable."""
        out = []
        if not self.dt > 0:
            out.append(f"dt: must be > 0 (got {self.dt})")
        if self.max_time is not None and not self.max_time > 0:
            out.append(f"max_time: must be > 0 (got {self.max_time})")
        if not self.capture_radius > 0:
            out.append(f"capture_radius: must be > 0 (got {self.capture_radius})")
        if not self.gain > 0:
            out.append(f"gain: must be > 0 (got {self.gain})")
        if self.speed_limit is not None and not self.speed_limit > 0:
            out.append(f"speed_limit: must be > 0 (got {self.speed_limit})")
        if self.integrator not in INTEGRATORS:
            out.append(f"integrator: must be one of {INTEGRATORS} (got {self.integrator!r})")
        if self.integrator == "rk4" and self.filter is not None:
            out.append("integrator: rk4 is not supported with the evader filter")
        if self.noise is not None and self.noise.position_noise_sigma > 0 and self.filter is None:
            out.append("noise: measurement noise requires a filter section")
        if len(self.pursuers) < 3:
            out.append(f"pursuers: need at least 3 (got {len(self.pursuers)})")
            return out
        agents = [self.evader, *self.pursuers]
        for (i, a), (j, b) in itertools.combinations(enumerate(agents), 2):
            if math.hypot(a.x - b.x, a.y - b.y) <= COLLOCATION_TOL:
                who = lambda k: "evader" if k == 0 else f"pursuers[{k - 1}]"
                out.append(f"{who(i)} and {who(j)} are collocated")
        if not out:
            try:
                evader_cell(self.evader, self.pursuers)
            except UnboundedCell:
                out.append("evader: must lie strictly inside the convex hull of the pursuers")
            except GeometryError as exc:
                out.append(f"evader: initial cell is invalid ({exc})")
        return out

    def validate(self) -> "Scenario":
        probs = self.problems()
        if probs:
            raise ScenarioError(probs)
        return self


@dataclass(slots=True)
class SimRecord:
    t: float
    evader_pos: Point2
    evader_vel: Point2
    pursuer_pos: tuple
    pursuer_vel: tuple
    vertices: tuple
    area: float
    min_distance: float
    active_set: tuple
    evader_estimate: Optional[Point2] = None

    @property
    def pursuer_speed(self) -> tuple:
        return tuple(math.hypot(vx, vy) for vx, vy in self.pursuer_vel)


@dataclass
class SimOutcome:
    status: Status
    records: list = field(default_factory=list)
    capture_time: Optional[float] = None
    capturing_pursuer: Optional[int] = None
    bound_t_c_u: float = math.nan
    initial_area: float = math.nan
    initial_active: int = 0
    message: str = ""
    clamped_steps: int = 0  # steps where the filtered estimate was pulled back inside the hull
    bound_exceeded: bool = False  # capture (or the end of the run) came after bound_t_c_u
    hull_excursion_steps: int = 0  # filter runs: steps with the true evader outside the hull


def integrate_step(positions, velocities, dt: float) -> list[Point2]:
    """Explicit Euler: ``x + v dt`` for every agent."""
    return [Point2(x + vx * dt, y + vy * dt) for (x, y), (vx, vy) in zip(positions, velocities)]


def decay_residual(records, gain: float) -> float:
    """Largest deviation of the logged cell area from ``A(0) exp(-2 K t)``, relative to ``A(0)``."""
    if not records:
        return 0.0
    a0 = records[0].area
    t0 = records[0].t
    return max(abs(r.area - a0 * math.exp(-2.0 * gain * (r.t - t0))) for r in records) / a0


def _closest(evader, pursuers):
    best, who = math.inf, -1
    for k, (px, py) in enumerate(pursuers):
        d = math.hypot(px - evader[0], py - evader[1])
        if d < best:
            best, who = d, k
    return best, who


_PULL_FACTORS = (0.999, 0.995, 0.99, 0.98, 0.95, 0.9, 0.8, 0.5, 0.0)


def _pull_inside_hull(estimate, pursuers):
    """Shrink ``estimate`` toward the pursuers' mean until its cell is bounded."""
    n = len(pursuers)
    cx = sum(p[0] for p in pursuers) / n
    cy = sum(p[1] for p in pursuers) / n
    for lam in _PULL_FACTORS:
        e = Point2(cx + lam * (estimate[0] - cx), cy + lam * (estimate[1] - cy))
        try:
            return e, evader_cell(e, pursuers)
        except UnboundedCell:
            continue
    raise UnboundedCell("pursuers enclose no area")


def inside_hull(p, pursuers) -> bool:
    """Whether ``p`` lies strictly inside the convex hull of ``pursuers``."""
    hull = convex_hull(pursuers)
    if len(hull) < 3:
        return False
    # clockwise hull, so boundary_distances is positive inside
    return min(boundary_distances(_HullView(hull), p)) > 0.0


class _HullView:
    """Minimal polygon stand-in for boundary_distances (skips ConvexPolygon validation)."""

    def __init__(self, vertices):
        self.vertices = vertices

    def edges(self):
        v = self.vertices
        return zip(v, v[1:] + v[:1])


def _derivatives(sc: Scenario, t, evader, pursuers):
    """Evader and pursuer velocities at a (true-state) configuration."""
    cell = evader_cell(evader, pursuers)
    ue = evader_velocity(sc.evader_policy, t, evader, cell)
    cmds = all_pursuer_commands(cell, evader, pursuers, ue, sc.gain, sc.speed_limit)
    return cell, ue, [c.velocity for c in cmds]


def _rk4_step(sc: Scenario, t, evader, pursuers, k1):
    dt = sc.dt
    ue1, up1 = k1

    def shifted(scale, ue, up):
        e = Point2(evader.x + scale * ue.x, evader.y + scale * ue.y)
        return e, integrate_step(pursuers, up, scale)

    e2, p2 = shifted(0.5 * dt, ue1, up1)
    _, ue2, up2 = _derivatives(sc, t + 0.5 * dt, e2, p2)
    e3, p3 = shifted(0.5 * dt, ue2, up2)
    _, ue3, up3 = _derivatives(sc, t + 0.5 * dt, e3, p3)
    e4, p4 = shifted(dt, ue3, up3)
    _, ue4, up4 = _derivatives(sc, t + dt, e4, p4)

    def combine(a, b, c, d):
        return Point2((a.x + 2 * b.x + 2 * c.x + d.x) / 6, (a.y + 2 * b.y + 2 * c.y + d.y) / 6)

    ue = combine(ue1, ue2, ue3, ue4)
    up = [combine(*v) for v in zip(up1, up2, up3, up4)]
    return integrate_step([evader], [ue], dt)[0], integrate_step(pursuers, up, dt)


def run(scenario: Scenario) -> SimOutcome:
    """Simulate until capture, timeout, or a geometric failure.

    Without a filter the controller sees the true evader state. With one, the
    controller works from the filtered position and velocity: the logged cell
    is the one built around the estimate (the cell the pursuers are shaping),
    and the true cell is only built when the evader's own policy needs it. An
    estimate that lands outside the pursuers' hull is pulled back toward
    their mean until its cell is bounded (counted in ``clamped_steps``); the
    run only ends as escaped when no pull-back works. The controller never
    needs the true cell in this mode, so a true evader briefly grazing outside
    the hull does not stop the run; such steps are counted in
    ``hull_excursion_steps``.
    """
    sc = scenario.validate()
    if sc.speed_limit is not None:
        log.warning("speed limit %.3g m/s set: area decay is no longer guaranteed", sc.speed_limit)

    cell0 = evader_cell(sc.evader, sc.pursuers)
    a0 = shoelace_area(cell0.polygon)
    m0 = len(cell0.active)
    try:
        bound = capture_time_bound(a0, m0, sc.gain, sc.capture_radius)
    except AlreadyCaptured:
        bound = 0.0
    max_time = sc.max_time if sc.max_time is not None else (2.0 * bound if bound > 0 else 1.0 / sc.gain)
    out = SimOutcome(Status.TIMED_OUT, bound_t_c_u=bound, initial_area=a0, initial_active=m0)

    fset = sc.filter
    if fset is not None:
        noise = sc.noise or NoiseModel()
        sigma = fset.measurement_sigma if fset.measurement_sigma is not None else noise.position_noise_sigma
        meas_var = max(sigma, fset.min_measurement_sigma) ** 2
        q = white_jerk_q(sc.dt, fset.jerk_sigma)
        policy_needs_cell = getattr(sc.evader_policy, "needs_cell", True)
        fstate = None

    evader, pursuers = sc.evader, list(sc.pursuers)
    records = out.records
    k = 0
    while True:
        t = k * sc.dt
        estimate = None
        try:
            if fset is None:
                cell = evader_cell(evader, pursuers)
                ue = evader_velocity(sc.evader_policy, t, evader, cell)
                up = [c.velocity for c in all_pursuer_commands(
                    cell, evader, pursuers, ue, sc.gain, sc.speed_limit)]
            else:
                true_cell = evader_cell(evader, pursuers) if policy_needs_cell else None
                if not policy_needs_cell and not inside_hull(evader, pursuers):
                    out.hull_excursion_steps += 1
                ue = evader_velocity(sc.evader_policy, t, evader, true_cell)
                z = add_measurement_noise(evader, noise, k)
                if fstate is None:
                    fstate = kf_init(z, fset.init_position_var, fset.init_velocity_var, fset.init_acceleration_var)
                else:
                    fstate = kf_step(fstate, z, sc.dt, q, meas_var)
                estimate = fstate.position
                try:
                    cell = evader_cell(estimate, pursuers)
                except UnboundedCell:
                    # the evader is inside the hull, so its estimate should be too
                    estimate, cell = _pull_inside_hull(estimate, pursuers)
                    out.clamped_steps += 1
                up = [c.velocity for c in all_pursuer_commands(
                    cell, estimate, pursuers, fstate.velocity, sc.gain, sc.speed_limit)]
        except UnboundedCell as exc:
            out.status, out.message = Status.EVADER_ESCAPED_HULL, f"t={t:.6g}: {exc}"
            break
        except (SingularGeometry, GeometryError) as exc:
            # collocation, a collapsed cell or a degenerate pursuer system
            out.status, out.message = Status.SINGULAR_GEOMETRY, f"t={t:.6g}: {exc}"
            log.warning("run stopped on degenerate geometry: %s", out.message)
            break
        dmin, who = _closest(evader, pursuers)
        records.append(
            SimRecord(
                t, evader, ue, tuple(pursuers), tuple(up), cell.vertices,
                shoelace_area(cell.polygon), dmin, cell.active_pursuers, estimate,
            )
        )
        if dmin <= sc.capture_radius:
            out.status, out.capture_time, out.capturing_pursuer = Status.CAPTURED, t, who
            break
        if t >= max_time:
            out.message = f"no capture by t={t:.6g}"
            break
        if sc.integrator == "rk4":
            try:
                evader, pursuers = _rk4_step(sc, t, evader, pursuers, (ue, up))
            except UnboundedCell as exc:
                out.status, out.message = Status.EVADER_ESCAPED_HULL, f"t={t:.6g}: {exc}"
                break
            except (SingularGeometry, GeometryError) as exc:
                out.status, out.message = Status.SINGULAR_GEOMETRY, f"t={t:.6g}: {exc}"
                log.warning("run stopped on degenerate geometry: %s", out.message)
                break
        else:
            evader = Point2(evader.x + ue.x * sc.dt, evader.y + ue.y * sc.dt)
            pursuers = integrate_step(pursuers, up, sc.dt)
        k += 1
    end = out.capture_time if out.status is Status.CAPTURED else records[-1].t if records else 0.0
    if bound > 0 and end > bound:
        out.bound_exceeded = True
        log.warning("run went past the capture-time bound (%.3f s > %.3f s)", end, bound)
    return out
