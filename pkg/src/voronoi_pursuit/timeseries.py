"""Run artifacts on disk: the per-step timeseries CSV and the JSON summary.

Timeseries columns, in order (``N`` pursuers, ``i = 0..N-1``):

``t, evader_x, evader_y, evader_vx, evader_vy, estimate_x, estimate_y,
area, min_distance, active_set, cell_vertices,`` then for every pursuer
``p{i}_x, p{i}_y, p{i}_vx, p{i}_vy, p{i}_speed``.

``estimate_*`` are empty without a filter. ``active_set`` is pursuer indices
joined by ``;`` in edge order. ``cell_vertices`` is ``x y`` pairs joined by
``;`` in clockwise order. Floats are written with 17 significant digits, so
reloading reproduces the in-memory values exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from pathlib import Path

from .errors import TimeseriesError
from .geometry2d import Point2
from .simulator import SimOutcome, SimRecord, decay_residual

BASE_COLUMNS = [
    "t", "evader_x", "evader_y", "evader_vx", "evader_vy", "estimate_x", "estimate_y",
    "area", "min_distance", "active_set", "cell_vertices",
]
PURSUER_FIELDS = ["x", "y", "vx", "vy", "speed"]
_PURSUER_COL = re.compile(r"p(\d+)_(x|y|vx|vy|speed)$")


def fmt(x: float) -> str:
    return format(x, ".17g")


def columns(n_pursuers: int) -> list[str]:
    return BASE_COLUMNS + [f"p{i}_{f}" for i in range(n_pursuers) for f in PURSUER_FIELDS]


def atomic_write(path, data, mode="w"):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **({"encoding": "utf-8", "newline": ""} if "b" not in mode else {})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path


def timeseries_text(records) -> str:
    if not records:
        raise TimeseriesError("no records to write")
    n = len(records[0].pursuer_pos)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns(n))
    for r in records:
        est = ("", "") if r.evader_estimate is None else (fmt(r.evader_estimate[0]), fmt(r.evader_estimate[1]))
        row = [
            fmt(r.t), fmt(r.evader_pos[0]), fmt(r.evader_pos[1]), fmt(r.evader_vel[0]), fmt(r.evader_vel[1]),
            *est, fmt(r.area), fmt(r.min_distance),
            ";".join(str(i) for i in r.active_set),
            ";".join(f"{fmt(x)} {fmt(y)}" for x, y in r.vertices),
        ]
        for (px, py), (vx, vy) in zip(r.pursuer_pos, r.pursuer_vel):
            row += [fmt(px), fmt(py), fmt(vx), fmt(vy), fmt(math.hypot(vx, vy))]
        w.writerow(row)
    return buf.getvalue()


def write_timeseries(path, records) -> Path:
    return atomic_write(path, timeseries_text(records))


def _float(text, row, col):
    try:
        v = float(text)
    except ValueError:
        raise TimeseriesError(f"column {col!r}: not a number ({text!r})", row) from None
    if not math.isfinite(v):
        raise TimeseriesError(f"column {col!r}: non-finite value", row)
    return v


def read_timeseries(path) -> list[SimRecord]:
    """Parse a timeseries file back into records. Errors name the offending row."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TimeseriesError("file is empty (no header)", 1)
        n = 0
        for col in header[len(BASE_COLUMNS):]:
            m = _PURSUER_COL.match(col)
            if m:
                n = max(n, int(m.group(1)) + 1)
        if header != columns(n) or n < 1:
            raise TimeseriesError(f"unexpected header; expected {', '.join(columns(max(n, 3)))}", 1)
        idx = {c: i for i, c in enumerate(header)}
        records = []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise TimeseriesError(f"expected {len(header)} fields, got {len(row)}", rowno)

            def g(col):
                return _float(row[idx[col]], rowno, col)

            if row[idx["estimate_x"]] == "" and row[idx["estimate_y"]] == "":
                est = None
            else:
                est = Point2(g("estimate_x"), g("estimate_y"))
            try:
                active = tuple(int(s) for s in row[idx["active_set"]].split(";") if s != "")
                verts = []
                for pair in row[idx["cell_vertices"]].split(";"):
                    xs, ys = pair.split(" ")
                    verts.append(Point2(_float(xs, rowno, "cell_vertices"), _float(ys, rowno, "cell_vertices")))
            except ValueError:
                raise TimeseriesError("malformed active_set or cell_vertices", rowno) from None
            pos = tuple(Point2(g(f"p{i}_x"), g(f"p{i}_y")) for i in range(n))
            vel = tuple(Point2(g(f"p{i}_vx"), g(f"p{i}_vy")) for i in range(n))
            records.append(
                SimRecord(
                    g("t"), Point2(g("evader_x"), g("evader_y")), Point2(g("evader_vx"), g("evader_vy")),
                    pos, vel, tuple(verts), g("area"), g("min_distance"), active, est,
                )
            )
    if not records:
        raise TimeseriesError("timeseries has a header but no data rows", 2)
    return records


def summary_dict(scenario, outcome: SimOutcome, runtime_s: float | None = None) -> dict:
    recs = outcome.records
    out = {
        "scenario": scenario.name,
        "status": outcome.status.value,
        "capture_time": outcome.capture_time,
        "capturing_pursuer": outcome.capturing_pursuer,
        "bound_t_c_u": outcome.bound_t_c_u,
        "bound_exceeded": outcome.bound_exceeded,
        "initial_area": outcome.initial_area,
        "initial_active": outcome.initial_active,
        "decay_residual": decay_residual(recs, scenario.gain) if recs else None,
        "final_time": recs[-1].t if recs else None,
        "final_min_distance": recs[-1].min_distance if recs else None,
        "steps": len(recs),
        "gain": scenario.gain,
        "capture_radius": scenario.capture_radius,
        "dt": scenario.dt,
        "clamped_steps": outcome.clamped_steps,
        "hull_excursion_steps": outcome.hull_excursion_steps,
        "message": outcome.message,
    }
    if runtime_s is not None:
        out["runtime_s"] = runtime_s
    return out


def write_summary(path, summary: dict) -> Path:
    return atomic_write(path, json.dumps(summary, indent=2, allow_nan=False) + "\n")
