"""YAML scenario files: load, validate, override and dump.

A scenario file is a mapping with these keys (only ``pursuers`` and
``evader`` are required)::

    name: case1
    pursuers: [[-80.65, 44.48], [63.63, -70.02], [63.51, 31.92]]   # m
    evader: [0.7438, 18.92]                                         # m
    gain: 0.05             # K, 1/s
    capture_radius: 0.2    # m
    dt: 0.001              # s
    max_time: null         # s; null -> twice the capture-time bound
    integrator: euler      # or rk4 (not with a filter)
    speed_limit: null      # m/s; clips pursuer commands, off by default
    evader_policy:
      name: constant_velocity      # see EVADER_POLICIES
      velocity: [-1.8, -2.5]
    noise:                 # optional position measurement noise
      sigma: 1.4953        # m, per axis
      seed: 0
    filter:                # optional; presence puts the Kalman filter in the loop
      jerk_sigma: 5.0
      init_position_var: 1.0
      init_velocity_var: 25.0
      init_acceleration_var: 1.0
      measurement_sigma: null
      min_measurement_sigma: 0.001
    output:
      plots: true

Every problem found is reported, each prefixed by its dotted key path.
"""

from __future__ import annotations

import copy
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .control import EVADER_POLICIES, ConstantVelocity, Custom
from .errors import ScenarioError
from .estimation import FilterSettings, NoiseModel
from .simulator import Scenario

SHIPPED_DIR = Path(__file__).with_name("scenarios")

_TOP_KEYS = {
    "name", "pursuers", "evader", "gain", "capture_radius", "dt", "max_time",
    "integrator", "speed_limit", "evader_policy", "noise", "filter", "output",
}
_NOISE_KEYS = {"sigma": "position_noise_sigma", "seed": "rng_seed"}
_FILTER_KEYS = {f.name for f in dataclasses.fields(FilterSettings)}
_OUTPUT_KEYS = {"plots"}


@dataclass(frozen=True)
class OutputOptions:
    plots: bool = True


def shipped_scenarios() -> list[str]:
    return sorted(p.stem for p in SHIPPED_DIR.glob("*.yaml"))


def resolve_path(name_or_path) -> Path:
    """A path as given, or the shipped scenario of that name (``case1``)."""
    p = Path(name_or_path)
    if p.exists():
        return p
    shipped = SHIPPED_DIR / f"{p.stem}.yaml"
    if p.suffix in ("", ".yaml") and p.parent == Path(".") and shipped.exists():
        return shipped
    raise FileNotFoundError(f"no such scenario file: {name_or_path}")


# -- parsing ----------------------------------------------------------------


class _Collector:
    def __init__(self):
        self.problems = []

    def add(self, key, msg):
        self.problems.append(f"{key}: {msg}")

    def number(self, data, key, path, default=None, optional=False):
        if key not in data:
            return default
        v = data[key]
        if v is None and optional:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.add(path, f"expected a finite number, got {v!r}")
            return default
        return float(v)

    def integer(self, data, key, path, default=0):
        v = data.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            self.add(path, f"expected an integer, got {v!r}")
            return default
        return v

    def pair(self, v, path):
        if (
            not isinstance(v, (list, tuple))
            or len(v) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) and math.isfinite(c) for c in v)
        ):
            self.add(path, f"expected [x, y] with finite numbers, got {v!r}")
            return None
        return (float(v[0]), float(v[1]))

    def mapping(self, data, key, path):
        v = data.get(key)
        if v is None:
            return None
        if not isinstance(v, dict):
            self.add(path, f"expected a mapping, got {type(v).__name__}")
            return None
        return v

    def unknown(self, data, allowed, prefix):
        for k in data:
            if k not in allowed:
                self.add(f"{prefix}{k}", f"unknown key (allowed: {', '.join(sorted(allowed))})")


def _parse_policy(raw, c: _Collector):
    if raw is None:
        return ConstantVelocity()
    if not isinstance(raw, dict):
        c.add("evader_policy", "expected a mapping with a 'name' key")
        return None
    name = raw.get("name")
    cls = EVADER_POLICIES.get(name)
    if cls is None:
        c.add("evader_policy.name", f"unknown policy {name!r} (choose from {', '.join(EVADER_POLICIES)})")
        return None
    params = {k: v for k, v in raw.items() if k != "name"}
    fields = {f.name: f for f in dataclasses.fields(cls) if f.name != "function"}
    c.unknown(params, fields, "evader_policy.")
    kwargs = {}
    for key, value in params.items():
        if key not in fields:
            continue
        path = f"evader_policy.{key}"
        if cls is Custom and key == "velocities":
            if not isinstance(value, list):
                c.add(path, "expected a list of [vx, vy]")
                continue
            rows = [c.pair(v, f"{path}[{i}]") for i, v in enumerate(value)]
            kwargs[key] = tuple(rows)
        elif cls is Custom and key == "times":
            if not isinstance(value, list):
                c.add(path, "expected a list of times")
                continue
            kwargs[key] = tuple(c.number({0: t}, 0, f"{path}[{i}]") for i, t in enumerate(value))
        elif fields[key].type in ("tuple", tuple):
            kwargs[key] = c.pair(value, path)
        else:
            kwargs[key] = c.number(params, key, path)
    if any(v is None for v in kwargs.values()) or any(
        v is None for val in kwargs.values() if isinstance(val, tuple) for v in val
    ):
        return None
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        c.add("evader_policy", str(exc))
        return None


def scenario_from_dict(data: dict) -> tuple[Scenario, OutputOptions]:
    """Build and validate a scenario; raises :class:`ScenarioError` listing every problem."""
    c = _Collector()
    if not isinstance(data, dict):
        raise ScenarioError(["<root>: expected a mapping"])
    c.unknown(data, _TOP_KEYS, "")

    pursuers = []
    raw_p = data.get("pursuers")
    if not isinstance(raw_p, list):
        c.add("pursuers", "required list of [x, y] positions")
    else:
        pursuers = [c.pair(p, f"pursuers[{i}]") for i, p in enumerate(raw_p)]
    if "evader" not in data:
        c.add("evader", "required [x, y] position")
        evader = None
    else:
        evader = c.pair(data["evader"], "evader")

    kw: dict[str, Any] = {}
    for key in ("gain", "capture_radius", "dt"):
        v = c.number(data, key, key)
        if v is not None:
            kw[key] = v
    for key in ("max_time", "speed_limit"):
        if key in data:
            kw[key] = c.number(data, key, key, optional=True)
    if "integrator" in data:
        kw["integrator"] = str(data["integrator"])
    name = data.get("name", "")
    kw["name"] = "" if name is None else str(name)

    kw["evader_policy"] = _parse_policy(data.get("evader_policy"), c)

    noise = c.mapping(data, "noise", "noise")
    if noise is not None:
        c.unknown(noise, _NOISE_KEYS, "noise.")
        sigma = c.number(noise, "sigma", "noise.sigma", default=0.0)
        seed = c.integer(noise, "seed", "noise.seed")
        if sigma is not None and sigma < 0:
            c.add("noise.sigma", f"must be >= 0 (got {sigma})")
        else:
            kw["noise"] = NoiseModel(sigma, seed)

    filt = c.mapping(data, "filter", "filter")
    if filt is not None:
        c.unknown(filt, _FILTER_KEYS, "filter.")
        fk = {}
        for key in _FILTER_KEYS:
            v = c.number(filt, key, f"filter.{key}", optional=key == "measurement_sigma")
            if key in filt:
                fk[key] = v
        for key, v in fk.items():
            if v is not None and not v > 0:
                c.add(f"filter.{key}", f"must be > 0 (got {v})")
        kw["filter"] = FilterSettings(**fk)

    out = c.mapping(data, "output", "output")
    options = OutputOptions()
    if out is not None:
        c.unknown(out, _OUTPUT_KEYS, "output.")
        if "plots" in out:
            if not isinstance(out["plots"], bool):
                c.add("output.plots", f"expected true/false, got {out['plots']!r}")
            else:
                options = OutputOptions(plots=out["plots"])

    if c.problems or evader is None or any(p is None for p in pursuers) or kw["evader_policy"] is None:
        raise ScenarioError(c.problems or ["scenario is incomplete"])
    scenario = Scenario(tuple(pursuers), evader, **kw)
    problems = scenario.problems()
    if problems:
        raise ScenarioError(problems)
    return scenario, options


# -- overrides ----------------------------------------------------------------


def apply_overrides(data: dict, overrides) -> dict:
    """Return a copy of ``data`` with ``key.sub=value`` overrides applied.

    Values are parsed as YAML, so ``dt=0.01``, ``evader=[1, 2]`` and
    ``noise.seed=3`` all do the obvious thing; ``filter=null`` removes a section.
    """
    out = copy.deepcopy(data)
    for item in overrides or ():
        key, sep, text = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ScenarioError([f"override {item!r}: expected key=value"])
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ScenarioError([f"override {key}: cannot parse value ({exc})"]) from None
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = node[part] = {}
            if not isinstance(nxt, dict):
                raise ScenarioError([f"override {key}: {part} is not a mapping"])
            node = nxt
        node[parts[-1]] = value
    return out


# -- file I/O ---------------------------------------------------------------


def read_dict(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ScenarioError([f"{path}: not valid YAML ({exc})"]) from None
    if not isinstance(data, dict):
        raise ScenarioError([f"{path}: expected a mapping at the top level"])
    return data


def load(path, overrides=None) -> tuple[Scenario, OutputOptions]:
    data = apply_overrides(read_dict(path), overrides)
    if not data.get("name"):
        data["name"] = Path(path).stem
    return scenario_from_dict(data)


def _policy_to_dict(policy) -> dict:
    if isinstance(policy, Custom) and policy.function is not None:
        raise ScenarioError(["evader_policy: a custom policy with a Python function cannot be serialised"])
    out = {"name": policy.name}
    for f in dataclasses.fields(policy):
        if f.name == "function":
            continue
        v = getattr(policy, f.name)
        if isinstance(v, tuple):
            v = [list(x) if isinstance(x, tuple) else x for x in v]
        out[f.name] = v
    return out


def scenario_to_dict(scenario: Scenario, options: OutputOptions | None = None) -> dict:
    sc = scenario
    data = {
        "name": sc.name,
        "pursuers": [[p.x, p.y] for p in sc.pursuers],
        "evader": [sc.evader.x, sc.evader.y],
        "gain": sc.gain,
        "capture_radius": sc.capture_radius,
        "dt": sc.dt,
        "max_time": sc.max_time,
        "integrator": sc.integrator,
        "speed_limit": sc.speed_limit,
        "evader_policy": _policy_to_dict(sc.evader_policy),
    }
    if sc.noise is not None:
        data["noise"] = {"sigma": sc.noise.position_noise_sigma, "seed": sc.noise.rng_seed}
    if sc.filter is not None:
        data["filter"] = dataclasses.asdict(sc.filter)
    if options is not None:
        data["output"] = dataclasses.asdict(options)
    return data


def dumps(scenario: Scenario, options: OutputOptions | None = None) -> str:
    return yaml.safe_dump(scenario_to_dict(scenario, options), sort_keys=False, default_flow_style=None)
