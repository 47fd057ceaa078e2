"""SVG figures for a finished run, drawn with matplotlib's object API (no pyplot state)."""

from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.colors import LinearSegmentedColormap, to_rgb
from matplotlib.figure import Figure

from .errors import TimeseriesError
from .timeseries import atomic_write

FIGSIZE = (6.4, 4.8)
AGENT_COLOURS = ["tab:red", "tab:blue", "tab:green", "tab:purple", "tab:orange", "tab:brown", "tab:olive"]
EVADER_COLOUR = "black"
PLOT_NAMES = ("trajectories", "area", "min_distance", "speeds")


def area_overlay(t, initial_area: float, gain: float):
    """Analytic evader-area curve ``A(0) exp(-2 K t)``."""
    return initial_area * np.exp(-2.0 * gain * np.asarray(t, dtype=float))


def _fading_line(ax, xy, colour, label):
    """Trajectory whose colour darkens with time, from a pale tint to the full colour."""
    xy = np.asarray(xy, dtype=float)
    if len(xy) < 2:
        ax.plot(xy[:, 0], xy[:, 1], ".", color=colour, label=label)
        return
    rgb = np.array(to_rgb(colour))
    cmap = LinearSegmentedColormap.from_list(label, [0.25 * rgb + 0.75, 0.6 * rgb])
    # thin out long runs; a few thousand segments look identical and keep the SVG small
    stride = max(1, len(xy) // 2000)
    pts = xy[::stride]
    if not np.array_equal(pts[-1], xy[-1]):
        pts = np.vstack([pts, xy[-1]])
    segs = np.stack([pts[:-1], pts[1:]], axis=1)
    lc = LineCollection(segs, cmap=cmap, linewidths=1.6)
    lc.set_array(np.linspace(0.0, 1.0, len(segs)))
    ax.add_collection(lc)
    ax.plot([], [], color=0.6 * rgb, lw=1.6, label=label)  # legend proxy in the end colour


def trajectories_figure(records) -> Figure:
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ev = np.array([r.evader_pos for r in records])
    pos = np.array([r.pursuer_pos for r in records])  # (steps, N, 2)
    for i in range(pos.shape[1]):
        c = AGENT_COLOURS[i % len(AGENT_COLOURS)]
        _fading_line(ax, pos[:, i], c, f"Pursuer {i + 1}")
        ax.plot(*pos[0, i], "o", color=c, ms=5)
        ax.plot(*pos[-1, i], "*", color=c, ms=9)
    _fading_line(ax, ev, EVADER_COLOUR, "Evader")
    ax.plot(*ev[0], "s", color=EVADER_COLOUR, ms=6, label="Evader start")
    ax.plot(*ev[-1], "*", color=EVADER_COLOUR, ms=10, label="Evader end")
    verts = records[0].vertices
    if verts:
        poly = np.array(list(verts) + [verts[0]])
        ax.plot(poly[:, 0], poly[:, 1], "--", color="goldenrod", lw=1, label="Evader cell, t=0")
    ax.autoscale_view()
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("Agent trajectories")
    ax.legend(fontsize=7, loc="best")
    ax.grid(True, alpha=0.3)
    return fig


def area_figure(records, gain: float | None) -> Figure:
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    t = np.array([r.t for r in records])
    a = np.array([r.area for r in records])
    ax.plot(t, a, color="tab:blue", lw=1.8, label="logged $A_e$")
    if gain is not None:
        t0 = t[0]
        ax.plot(t, area_overlay(t - t0, a[0], gain), "--", color="black", lw=1,
                label=rf"$A_e(0)\,e^{{-2Kt}}$, K={gain:g}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel(r"evader cell area [m$^2$]")
    ax.set_title("Evader cell area")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def min_distance_figure(records, capture_radius: float | None) -> Figure:
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    t = np.array([r.t for r in records])
    d = np.array([r.min_distance for r in records])
    ax.plot(t, d, color="tab:red", lw=1.8, label="closest pursuer")
    if capture_radius is not None:
        ax.axhline(capture_radius, color="black", ls=":", lw=1, label=f"$r_c$ = {capture_radius:g} m")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("separation [m]")
    ax.set_title("Evader to closest pursuer")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def speeds_figure(records) -> Figure:
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    t = np.array([r.t for r in records])
    vel = np.array([r.pursuer_vel for r in records])
    speed = np.hypot(vel[..., 0], vel[..., 1])
    for i in range(speed.shape[1]):
        ax.plot(t, speed[:, i], color=AGENT_COLOURS[i % len(AGENT_COLOURS)], lw=1.4, label=f"Pursuer {i + 1}")
    ev = np.array([r.evader_vel for r in records])
    ax.plot(t, np.hypot(ev[:, 0], ev[:, 1]), "--", color=EVADER_COLOUR, lw=1, label="Evader")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("speed [m/s]")
    ax.set_title("Speed profiles")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def _svg_bytes(fig: Figure) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", bbox_inches="tight")
    return buf.getvalue()


def render_all(records, out_dir, gain=None, capture_radius=None) -> list[Path]:
    """Write the four SVG panels. All are rendered before any file is written."""
    if not records:
        raise TimeseriesError("no records to plot")
    for r in records:
        if not math.isfinite(r.area):
            raise TimeseriesError(f"non-finite area at t={r.t}")
    figs = {
        "trajectories": trajectories_figure(records),
        "area": area_figure(records, gain),
        "min_distance": min_distance_figure(records, capture_radius),
        "speeds": speeds_figure(records),
    }
    payload = {name: _svg_bytes(fig) for name, fig in figs.items()}
    out_dir = Path(out_dir)
    return [atomic_write(out_dir / f"{name}.svg", data, mode="wb") for name, data in payload.items()]
