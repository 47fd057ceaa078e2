"""Acceptance criteria 1-9, each at its stated tolerance.

Every test appends one ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary; ``python tests/test_acceptance.py`` prints the same lines.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, EVADER, PURSUERS, random_configuration  # noqa: E402
from voronoi_pursuit import scenario_file  # noqa: E402
from voronoi_pursuit.control import all_pursuer_commands, capture_time_bound, vertex_velocities  # noqa: E402
from voronoi_pursuit.estimation import NoiseModel, kf_init, kf_step, white_jerk_q  # noqa: E402
from voronoi_pursuit.geometry2d import area_rate, shoelace_area  # noqa: E402
from voronoi_pursuit.simulator import Status, decay_residual, run  # noqa: E402
from voronoi_pursuit.voronoi import evader_cell  # noqa: E402

A0_PUBLISHED = 13370.0
BOUND_PUBLISHED = 124.58
CASE1_T = 18.823
CASE2_T = 23.546
POLICY1_T = 114.67
POLICY2_T = 118.3
CASE3_SEEDS = range(20)


def report(n, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def load(name, overrides=None):
    return scenario_file.load(scenario_file.resolve_path(name), overrides)[0]


_runs = {}


def timed_run(name, overrides=None):
    key = (name, tuple(overrides or ()))
    if key not in _runs:
        t0 = time.perf_counter()
        out = run(load(name, overrides))
        _runs[key] = (out, time.perf_counter() - t0)
    return _runs[key]


def longest_run_below(values, threshold, dt):
    best = cur = 0
    for v in values:
        cur = cur + 1 if v < threshold else 0
        best = max(best, cur)
    return best * dt


def test_criterion_1_initial_geometry():
    cell = evader_cell(EVADER, PURSUERS)
    area = shoelace_area(cell.polygon)
    m = len(cell.active)
    ok = m == 3 and abs(area - A0_PUBLISHED) <= 0.01 * A0_PUBLISHED
    assert report(1, ok, f"A_e(0)={area:.2f} m^2 (target {A0_PUBLISHED:g} +-1%), m={m}")


def test_criterion_2_capture_time_bound():
    b = capture_time_bound(13370, 3, 0.05, 0.2)
    assert report(2, abs(b - BOUND_PUBLISHED) <= 0.01, f"t_C^U={b:.4f} s (target {BOUND_PUBLISHED} +-0.01)")


def test_criterion_3_case1():
    out, secs = timed_run("case1")
    ev_speed = math.hypot(*out.records[0].evader_vel)
    speeds = np.array([r.pursuer_speed for r in out.records])
    slow = max(longest_run_below(speeds[:, i], ev_speed, 0.001) for i in range(speeds.shape[1]))
    ok = (
        out.status is Status.CAPTURED
        and abs(out.capture_time - CASE1_T) <= 0.05
        and slow >= 0.5 * out.capture_time
        and secs < 5
    )
    assert report(
        3, ok,
        f"t_c={out.capture_time} s (target {CASE1_T} +-0.05), slowest pursuer below "
        f"{ev_speed:.2f} m/s for {slow:.3f} s, runtime {secs:.1f} s",
    )


def test_criterion_4_case2():
    out, secs = timed_run("case2")
    ok = out.status is Status.CAPTURED and abs(out.capture_time - CASE2_T) <= 0.05 and secs < 10
    assert report(4, ok, f"t_c={out.capture_time} s (target {CASE2_T} +-0.05), runtime {secs:.1f} s")


def test_criterion_5_evasion_policies():
    p1, s1 = timed_run("policy1_centroid")
    p2, s2 = timed_run("policy2_chebyshev")
    ok = (
        p1.status is Status.CAPTURED and p2.status is Status.CAPTURED
        and abs(p1.capture_time - POLICY1_T) <= 1.0
        and abs(p2.capture_time - POLICY2_T) <= 1.0
        and p1.capture_time < BOUND_PUBLISHED and p2.capture_time < BOUND_PUBLISHED
        and s1 < 60 and s2 < 60
    )
    assert report(
        5, ok,
        f"centroid t_c={p1.capture_time} s (target {POLICY1_T} +-1), chebyshev t_c={p2.capture_time} s "
        f"(target {POLICY2_T} +-1), bound {BOUND_PUBLISHED}; runtimes {s1:.1f}/{s2:.1f} s",
    )


def test_criterion_6_exponential_decay():
    residuals = {}
    for name in ("case1", "case2", "policy1_centroid", "policy2_chebyshev"):
        out, _ = timed_run(name)
        residuals[name] = decay_residual(out.records, 0.05)
    sweep = {}
    for dt in (0.01, 0.001, 0.0001):
        out, _ = timed_run("case1", [f"dt={dt}"])
        sweep[dt] = decay_residual(out.records, 0.05)
    monotone = sweep[0.01] > sweep[0.001] > sweep[0.0001]
    ok = all(r < 0.01 for r in residuals.values()) and monotone
    detail = ", ".join(f"{k}={v:.2e}" for k, v in residuals.items())
    detail += "; case1 dt sweep " + " > ".join(f"{v:.2e}" for v in sweep.values())
    assert report(6, ok, detail)


def test_criterion_7_noisy_filter_in_loop():
    t0 = time.perf_counter()
    clean, _ = timed_run("case3", ["noise.sigma=0.0"])
    base = load("case3")
    sigma = base.noise.position_noise_sigma
    outcomes = []
    for seed in CASE3_SEEDS:
        out = run(load("case3", [f"noise.seed={seed}"]))
        outcomes.append((seed, out))
    secs = time.perf_counter() - t0
    captured = [o for _, o in outcomes if o.status is Status.CAPTURED]
    t_ref = clean.capture_time
    in_band = all(0.5 * t_ref <= o.capture_time <= 2 * t_ref for o in captured)
    clean_resid = decay_residual(clean.records, 0.05)
    failed = [f"seed {s}: {o.status.value}" for s, o in outcomes if o.status is not Status.CAPTURED]
    ok = (
        clean.status is Status.CAPTURED
        and len(captured) == len(outcomes)
        and in_band
        and clean_resid < 0.02
        and secs < 120
    )
    times = [o.capture_time for o in captured]
    assert report(
        7, ok,
        f"sigma={sigma:.4f} m, captured {len(captured)}/{len(outcomes)}"
        + (f" ({'; '.join(failed)})" if failed else "")
        + (f", t_c in [{min(times):.3f}, {max(times):.3f}] s" if times else "")
        + f" vs noise-free {t_ref} s, noise-free residual {clean_resid:.2e}, runtime {secs:.0f} s",
    )


def test_criterion_8_instantaneous_identities():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    worst_rate = worst_cmd = worst_eq = worst_grid = 0.0
    n = 0
    grid_checked = 0
    while n < 1000:
        cfg = random_configuration(rng)
        if cfg is None:
            continue
        e, p, cell = cfg
        n += 1
        k = rng.uniform(0.01, 1.0)
        area = shoelace_area(cell.polygon)
        qdot = vertex_velocities(cell, k)
        worst_rate = max(worst_rate, abs(area_rate(cell.polygon, qdot) + 2 * k * area) / (2 * k * area))
        ue = rng.normal(scale=3.0, size=2)
        cmds = all_pursuer_commands(cell, e, p, ue, k)
        for edge in cell.active:
            u = np.array(cmds[edge.pursuer_index].velocity)
            pi = np.array(p[edge.pursuer_index])
            for j in (edge.endpoint_a, edge.endpoint_b):
                q = np.array(cell.vertices[j])
                lhs = (pi - q) @ u
                rhs = (pi - e) @ np.array(qdot[j]) + (e - q) @ ue
                scale = np.linalg.norm(pi - q) * np.linalg.norm(u) + abs(rhs) + 1e-12
                worst_cmd = max(worst_cmd, abs(lhs - rhs) / scale)
                worst_eq = max(worst_eq, abs(np.linalg.norm(q - e) - np.linalg.norm(q - pi)))
        if grid_checked < 100:
            # brute-force grid Voronoi; tolerance is one grid cell along the perimeter
            xs = [v.x for v in cell.vertices]
            ys = [v.y for v in cell.vertices]
            gx = np.linspace(min(xs) - 1, max(xs) + 1, 500)
            gy = np.linspace(min(ys) - 1, max(ys) + 1, 500)
            X, Y = np.meshgrid(gx, gy)
            de = (X - e[0]) ** 2 + (Y - e[1]) ** 2
            mine = np.ones_like(X, dtype=bool)
            for q in p:
                mine &= de < (X - q[0]) ** 2 + (Y - q[1]) ** 2
            h2 = (gx[1] - gx[0]) * (gy[1] - gy[0])
            perim = sum(math.dist(a, b) for a, b in cell.polygon.edges())
            worst_grid = max(worst_grid, abs(mine.sum() * h2 - area) / (perim * math.sqrt(h2)))
            grid_checked += 1
    secs = time.perf_counter() - t0
    ok = worst_rate < 1e-9 and worst_cmd < 1e-9 and worst_eq < 1e-6 and worst_grid <= 1.0 and secs < 30
    assert report(
        8, ok,
        f"{n} cells: area-rate rel err {worst_rate:.1e}, command residual {worst_cmd:.1e}, "
        f"equidistance {worst_eq:.1e} m, grid area err {worst_grid:.2f} perimeter-cells "
        f"({grid_checked} cells), runtime {secs:.1f} s",
    )


def test_criterion_9_kalman_filter():
    t0 = time.perf_counter()
    dt = 0.01

    def truth(t):
        return np.array([3.0 + 1.5 * t - 0.4 * t * t, -2.0 - 0.7 * t + 0.9 * t * t])

    state = kf_init(truth(0.0))
    q = white_jerk_q(dt, 5.0)
    for k in range(1, 1001):
        state = kf_step(state, truth(k * dt), dt, q, 1e-3**2)
    err = float(np.hypot(*(np.array(state.position) - truth(1000 * dt))))

    rng = np.random.default_rng(9)
    noise = NoiseModel(1.5, 9)
    state = kf_init((0.0, 0.0))
    q = white_jerk_q(0.001, 5.0)
    worst_asym = 0.0
    min_eig = math.inf
    for k in range(10_000):
        z = (rng.normal(), rng.normal())
        state = kf_step(state, z, 0.001, q, noise.position_noise_sigma**2)
        p = state.covariance
        worst_asym = max(worst_asym, float(np.abs(p - p.T).max()))
        if k % 100 == 0 or k == 9999:
            min_eig = min(min_eig, float(np.linalg.eigvalsh(p).min() / np.abs(p).max()))
    secs = time.perf_counter() - t0
    ok = err < 1e-6 and worst_asym == 0.0 and min_eig >= -1e-12
    assert report(
        9, ok,
        f"quadratic tracking error {err:.1e} m after 1000 steps, covariance asymmetry {worst_asym:.1e}, "
        f"min relative eigenvalue {min_eig:.1e} over 1e4 steps, runtime {secs:.1f} s",
    )


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    for line in ACCEPTANCE_LINES:
        print(line)
