"""Command-line front end: ``voronoi-pursuit run|bound|plot|batch|list``.

Exit codes: 0 captured, 2 timed out, 3 evader escaped the hull, 4 singular
geometry, 64 usage error, 65 bad input data (scenario or timeseries).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__, plots, scenario_file, timeseries
from .control import capture_time_bound
from .errors import AlreadyCaptured, PursuitError, ScenarioError, TimeseriesError
from .geometry2d import shoelace_area
from .simulator import Status, run
from .voronoi import evader_cell

log = logging.getLogger("voronoi_pursuit")

OUTPUT_ROOT_ENV = "VORONOI_PURSUIT_OUTPUT"
DEFAULT_OUTPUT_ROOT = "runs"

EXIT_OK = 0
EXIT_TIMED_OUT = 2
EXIT_ESCAPED = 3
EXIT_SINGULAR = 4
EXIT_USAGE = 64
EXIT_DATAERR = 65

STATUS_EXIT = {
    Status.CAPTURED: EXIT_OK,
    Status.TIMED_OUT: EXIT_TIMED_OUT,
    Status.EVADER_ESCAPED_HULL: EXIT_ESCAPED,
    Status.SINGULAR_GEOMETRY: EXIT_SINGULAR,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with "timed out"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV) or DEFAULT_OUTPUT_ROOT)


def _load(path_arg, overrides):
    try:
        path = scenario_file.resolve_path(path_arg)
    except FileNotFoundError as exc:
        raise ScenarioError([str(exc)]) from None
    return path, *scenario_file.load(path, overrides)


def run_scenario(path_arg, out_dir=None, overrides=None, plots_flag=None, quiet=False) -> int:
    """Load, simulate and write artifacts. Returns the process exit code."""
    path, scenario, options = _load(path_arg, overrides)
    out_dir = Path(out_dir) if out_dir is not None else output_root() / path.stem
    t0 = time.perf_counter()
    outcome = run(scenario)
    elapsed = time.perf_counter() - t0
    summary = timeseries.summary_dict(scenario, outcome, elapsed)

    # render everything before touching the output directory's final names
    ts_text = timeseries.timeseries_text(outcome.records)
    timeseries.atomic_write(out_dir / "timeseries.csv", ts_text)
    timeseries.atomic_write(out_dir / "scenario.yaml", scenario_file.dumps(scenario, options))
    timeseries.write_summary(out_dir / "summary.json", summary)
    want_plots = options.plots if plots_flag is None else plots_flag
    if want_plots:
        plots.render_all(outcome.records, out_dir, scenario.gain, scenario.capture_radius)

    if not quiet:
        _print_summary(summary, out_dir)
    return STATUS_EXIT[outcome.status]


def _print_summary(s, out_dir):
    print(f"scenario        {s['scenario']}")
    print(f"status          {s['status']}")
    if s["capture_time"] is not None:
        print(f"capture time    {s['capture_time']:.3f} s (pursuer {s['capturing_pursuer'] + 1})")
    print(f"bound t_C^U     {s['bound_t_c_u']:.2f} s")
    print(f"initial area    {s['initial_area']:.2f} m^2 (m = {s['initial_active']})")
    if s["decay_residual"] is not None:
        print(f"decay residual  {s['decay_residual']:.3g}")
    if s["message"]:
        print(f"note            {s['message']}")
    print(f"output          {out_dir}")


def cmd_run(args) -> int:
    return run_scenario(args.scenario, args.output, args.set, plots_flag=args.plots)


def cmd_bound(args) -> int:
    _, scenario, _ = _load(args.scenario, args.set)
    cell = evader_cell(scenario.evader, scenario.pursuers)
    area = shoelace_area(cell.polygon)
    m = len(cell.active)
    print(f"initial area    {area:.2f} m^2")
    print(f"active pursuers {m} {list(cell.active_pursuers)}")
    try:
        bound = capture_time_bound(area, m, scenario.gain, scenario.capture_radius)
    except AlreadyCaptured as exc:
        print(f"bound t_C^U     already captured ({exc})")
        return EXIT_OK
    print(f"bound t_C^U     {bound:.2f} s")
    return EXIT_OK


def cmd_plot(args) -> int:
    ts = Path(args.timeseries)
    if not ts.exists():
        raise TimeseriesError(f"no such file: {ts}")
    records = timeseries.read_timeseries(ts)
    gain, rc = args.gain, args.capture_radius
    sibling = ts.with_name("summary.json")
    if sibling.exists() and (gain is None or rc is None):
        try:
            meta = json.loads(sibling.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            meta = {}
        gain = meta.get("gain") if gain is None else gain
        rc = meta.get("capture_radius") if rc is None else rc
    if gain is None:
        log.warning("gain unknown (no summary.json, no --gain): area plot has no analytic overlay")
    out = Path(args.output) if args.output else ts.parent
    for p in plots.render_all(records, out, gain, rc):
        print(p)
    return EXIT_OK


def _batch_one(path, out_dir, overrides):
    logging.basicConfig(level=logging.WARNING)
    try:
        return str(path), run_scenario(path, out_dir, overrides, quiet=True), ""
    except (PursuitError, OSError) as exc:
        return str(path), EXIT_DATAERR, str(exc)


def cmd_batch(args) -> int:
    root = Path(args.output) if args.output else output_root()
    names = args.scenarios or scenario_file.shipped_scenarios()
    stems = [Path(n).stem for n in names]
    if len(set(stems)) != len(stems):
        raise UsageError("batch scenario names must have distinct stems (they name the output directories)")
    worst = EXIT_OK
    with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
        futs = [pool.submit(_batch_one, n, root / s, args.set) for n, s in zip(names, stems)]
        for fut in futs:
            name, code, err = fut.result()
            print(f"{name}\texit={code}\t{err}".rstrip())
            worst = max(worst, code)
    return worst


def cmd_list(args) -> int:
    for name in scenario_file.shipped_scenarios():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="voronoi-pursuit", description="Voronoi-cell pursuit of a single evader by multiple pursuers.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def overrides(sp):
        sp.add_argument("--set", "--override", dest="set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a scenario key (dotted paths allowed, value parsed as YAML); repeatable")

    r = sub.add_parser("run", help="simulate a scenario and write timeseries, summary and plots")
    r.add_argument("scenario", help="scenario YAML file or shipped scenario name (see 'list')")
    r.add_argument("-o", "--output", help=f"output directory (default ${OUTPUT_ROOT_ENV}/<name> or ./{DEFAULT_OUTPUT_ROOT}/<name>)")
    r.add_argument("--plots", dest="plots", action="store_true", default=None, help="force SVG plots on")
    r.add_argument("--no-plots", dest="plots", action="store_false", help="skip SVG plots")
    overrides(r)
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bound", help="print initial cell area, active pursuers and the capture-time bound")
    b.add_argument("scenario")
    overrides(b)
    b.set_defaults(func=cmd_bound)

    pl = sub.add_parser("plot", help="render SVG plots from a timeseries CSV")
    pl.add_argument("timeseries")
    pl.add_argument("-o", "--output", help="output directory (default: next to the timeseries)")
    pl.add_argument("--gain", type=float, help="K for the analytic area overlay (default: from summary.json)")
    pl.add_argument("--capture-radius", type=float, help="r_c line (default: from summary.json)")
    pl.set_defaults(func=cmd_plot)

    bt = sub.add_parser("batch", help="run several scenarios concurrently, one output directory each")
    bt.add_argument("scenarios", nargs="*", help="scenario files or names (default: all shipped)")
    bt.add_argument("-o", "--output", help="output root")
    bt.add_argument("-j", "--jobs", type=int, default=None, help="worker processes")
    overrides(bt)
    bt.set_defaults(func=cmd_batch)

    ls = sub.add_parser("list", help="list shipped scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print("invalid scenario:", file=sys.stderr)
        for prob in exc.problems:
            print(f"  {prob}", file=sys.stderr)
        return EXIT_DATAERR
    except (TimeseriesError, PursuitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
