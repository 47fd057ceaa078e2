import math

import numpy as np
import pytest

from conftest import EVADER, PURSUERS, random_configuration
from voronoi_pursuit.control import (
    EVADER_POLICIES,
    ConstantVelocity,
    Custom,
    MoveToCentroid,
    MoveToChebyshev,
    Sinusoid,
    all_pursuer_commands,
    capture_time_bound,
    evader_velocity,
    pursuer_velocity,
    vertex_velocities,
)
from voronoi_pursuit.errors import AlreadyCaptured, GeometryError, SingularGeometry
from voronoi_pursuit.geometry2d import area_rate, centroid, chebyshev_center, shoelace_area
from voronoi_pursuit.voronoi import evader_cell


def _configs(rng, n):
    out = []
    while len(out) < n:
        cfg = random_configuration(rng)
        if cfg is not None:
            out.append(cfg)
    return out


def test_vertex_policy_gives_exponential_area_rate(rng):
    for e, p, cell in _configs(rng, 200):
        k = rng.uniform(0.01, 1.0)
        a = shoelace_area(cell.polygon)
        assert area_rate(cell.polygon, vertex_velocities(cell, k)) == pytest.approx(-2 * k * a, rel=1e-9)


def test_commands_keep_edge_endpoints_equidistant(rng):
    for e, p, cell in _configs(rng, 200):
        ue = rng.normal(scale=3.0, size=2)
        qdot = vertex_velocities(cell, 0.05)
        cmds = all_pursuer_commands(cell, e, p, ue, 0.05)
        for edge in cell.active:
            u = np.array(cmds[edge.pursuer_index].velocity)
            pi = np.array(p[edge.pursuer_index])
            for k in (edge.endpoint_a, edge.endpoint_b):
                q = np.array(cell.vertices[k])
                lhs = (pi - q) @ u
                rhs = (pi - e) @ np.array(qdot[k]) + (e - q) @ ue
                scale = np.linalg.norm(pi - q) * np.linalg.norm(u) + abs(rhs) + 1e-12
                assert abs(lhs - rhs) / scale < 1e-9


def _matched_vertex_motion(cell0, cell1, h):
    v0 = np.array(cell0.vertices)
    v1 = np.array(cell1.vertices)
    assert len(v0) == len(v1)
    out = []
    for q in v0:
        j = np.argmin(np.linalg.norm(v1 - q, axis=1))
        out.append((v1[j] - q) / h)
    return np.array(out)


def test_moving_agents_moves_vertices_toward_centroid(rng):
    # end-to-end: integrate a tiny step and rebuild the cell from scratch
    for e, p, cell in _configs(rng, 30):
        k = 0.05
        ue = rng.normal(scale=2.0, size=2)
        up = np.array([c.velocity for c in all_pursuer_commands(cell, e, p, ue, k)])
        h = 1e-6
        plus = evader_cell(e + h * ue, p + h * up)
        minus = evader_cell(e - h * ue, p - h * up)
        fd = (_matched_vertex_motion(cell, plus, h) - _matched_vertex_motion(cell, minus, h)) / 2
        want = np.array(vertex_velocities(cell, k))
        assert np.allclose(fd, want, atol=1e-4 * (1 + np.abs(want).max()))


def test_redundant_pursuer_commanded_zero():
    pursuers = [(3, 0), (-3, 3), (-3, -3), (30, 0)]
    cell = evader_cell((0, 0), pursuers)
    cmds = all_pursuer_commands(cell, (0, 0), pursuers, (0.5, 0.1), 0.05)
    assert cmds[3].velocity == (0.0, 0.0)
    assert all(math.hypot(*c.velocity) > 0 for c in cmds[:3])


def test_speed_limit_clips():
    cell = evader_cell(EVADER, PURSUERS)
    cmds = all_pursuer_commands(cell, EVADER, PURSUERS, (-1.8, -2.5), 0.05, speed_limit=1.0)
    assert max(math.hypot(*c.velocity) for c in cmds) <= 1.0 + 1e-12


def test_singular_pursuer_system():
    with pytest.raises(SingularGeometry):
        pursuer_velocity((0, 0), (0, 1), (0, 0), (1, 0), (2, 0), (0, 0), (0, 0))


def test_stationary_evader_in_regular_cell_pursuers_close_in():
    # three pursuers on a circle: commands point straight at the evader
    ang = np.pi / 2 - 2 * np.pi * np.arange(3) / 3
    p = np.c_[np.cos(ang), np.sin(ang)] * 10
    cell = evader_cell((0, 0), p)
    for c in all_pursuer_commands(cell, (0, 0), p, (0, 0), 0.1):
        pos = p[c.pursuer_index]
        v = np.array(c.velocity)
        assert pos[0] * v[1] - pos[1] * v[0] == pytest.approx(0.0, abs=1e-9)
        assert pos @ v < 0


class TestBound:
    def test_published_value(self):
        assert capture_time_bound(13370, 3, 0.05, 0.2) == pytest.approx(124.58, abs=0.01)

    def test_doubling_gain_halves_bound(self):
        a = capture_time_bound(5000, 4, 0.05, 0.2)
        assert capture_time_bound(5000, 4, 0.1, 0.2) == pytest.approx(a / 2, rel=1e-12)

    def test_closed_form_inverse(self):
        # after t_bound the regular-cell inradius has shrunk to r_c / 2
        a0, m, k, rc = 800.0, 5, 0.2, 0.3
        t = capture_time_bound(a0, m, k, rc)
        a = a0 * math.exp(-2 * k * t)
        assert math.sqrt(a / (m * math.tan(math.pi / m))) == pytest.approx(rc / 2, rel=1e-12)

    def test_already_captured(self):
        with pytest.raises(AlreadyCaptured):
            capture_time_bound(0.01, 3, 0.05, 0.2)

    @pytest.mark.parametrize("args", [(0, 3, 0.05, 0.2), (1, 2, 0.05, 0.2), (1, 3, 0, 0.2), (1, 3, 0.05, -1)])
    def test_bad_arguments(self, args):
        with pytest.raises(ValueError):
            capture_time_bound(*args)


class TestPolicies:
    def test_registry(self):
        assert set(EVADER_POLICIES) == {
            "constant_velocity", "sinusoid", "move_to_centroid", "move_to_chebyshev", "custom",
        }

    def test_sinusoid_matches_closed_form(self):
        pol = Sinusoid((-2.5, -2.5), 0.06, (0.0, math.pi / 2))
        for t in (0.0, 3.7, 20.0):
            v = pol(t, None)
            assert v == pytest.approx((-2.5 * math.sin(0.06 * t), -2.5 * math.cos(0.06 * t)))
        pol = Sinusoid((3.89, -3.89), 0.7, bias=(-2.12, -2.12))
        assert pol(1.0, None) == pytest.approx((3.89 * math.sin(0.7) - 2.12, -3.89 * math.sin(0.7) - 2.12))

    def test_cell_policies(self):
        cell = evader_cell(EVADER, PURSUERS)
        c = centroid(cell.polygon)
        v = MoveToCentroid(0.2)(0, EVADER, cell)
        assert v == pytest.approx((0.2 * (c.x - EVADER[0]), 0.2 * (c.y - EVADER[1])))
        cb, _ = chebyshev_center(cell.polygon)
        v = MoveToChebyshev()(0, EVADER, cell)
        assert v == pytest.approx((0.2 * (cb.x - EVADER[0]), 0.2 * (cb.y - EVADER[1])))
        with pytest.raises(GeometryError):
            MoveToCentroid()(0, EVADER, None)

    def test_custom_schedule(self):
        pol = Custom(times=(0.0, 10.0), velocities=((0.0, 0.0), (1.0, -2.0)))
        assert pol(5.0, None) == pytest.approx((0.5, -1.0))
        assert pol(-1.0, None) == (0.0, 0.0)
        assert pol(99.0, None) == pytest.approx((1.0, -2.0))
        assert not pol.needs_cell
        with pytest.raises(ValueError):
            Custom(times=(1.0, 0.0), velocities=((0, 0), (1, 1)))

    def test_custom_function_and_nonfinite(self):
        pol = Custom(function=lambda t, e, cell: (t, 1.0))
        assert pol.needs_cell and pol(2.0, None) == (2.0, 1.0)
        with pytest.raises(ValueError):
            evader_velocity(Custom(function=lambda t, e, c: (math.nan, 0.0)), 0.0, (0, 0))

    def test_constant_velocity(self):
        assert ConstantVelocity((-1.8, -2.5))(12.0, None) == (-1.8, -2.5)
