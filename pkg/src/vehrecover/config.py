"""Run configuration: a flat, sectioned key-value (INI) document.

Sections are ``[vehicle] [scenario] [sim] [steering] [force] [thresholds]``
plus the optional ``[tune]`` and ``[output]``. Unknown sections and keys are
errors. Omitted optional keys take the defaults of the corresponding
dataclasses; :func:`render` writes every value back out, defaults included.

In ``[tune]``, each key naming a tunable parameter declares it free with
bounds ``lo, hi``; key order is the poll order of the search.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .control import FORCE_FIELDS, STEERING_FIELDS, ForceParams, SteeringParams, cruise_force
from .dynamics import Model, VehicleParams
from .scenario import ScenarioSpec, Thresholds, named_case
from .sim import SimConfig
from .tuner import TUNABLE, ObjectiveWeights, TuneSpec

FORMAT_VERSION = "vehrecover-1"

SECTIONS = ("vehicle", "scenario", "sim", "steering", "force", "thresholds", "tune", "output")
SCENARIO_KEYS = ("case",) + tuple(f.name for f in dataclasses.fields(ScenarioSpec))
WEIGHT_KEYS = ("w_y", "w_psi", "w_time")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    vehicle: VehicleParams
    scenario: ScenarioSpec
    sim: SimConfig
    steering: SteeringParams
    force: ForceParams
    thresholds: Thresholds = Thresholds()
    tune: TuneSpec | None = None
    case: str | None = None
    f_initial_auto: bool = False   # f_initial is the cruise force, recomputed on change
    out_dir: str = "out"
    format_version: str = FORMAT_VERSION

    def with_model(self, model) -> "RunConfig":
        return self._refresh(replace(self, sim=replace(self.sim, model=Model(model))))

    def with_controls(self, steering: SteeringParams, force: ForceParams) -> "RunConfig":
        auto = self.f_initial_auto and force.f_initial == self.force.f_initial
        return replace(self, steering=steering, force=force, f_initial_auto=auto)

    def _refresh(self, cfg: "RunConfig") -> "RunConfig":
        if not cfg.f_initial_auto:
            return cfg
        f0 = cruise_force(cfg.scenario.vx0, cfg.vehicle, cfg.sim.model)
        return replace(cfg, force=replace(cfg.force, f_initial=f0))


def _number(section, key, raw, kind=float):
    try:
        if kind is int:
            v = float(raw)
            if v != int(v):
                raise ValueError
            return int(v)
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected {'an integer' if kind is int else 'a number'}, "
                          f"got {raw!r}") from None


def _build(section, cls, kwargs):
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[{section}] invalid: {exc}") from None


def _check_keys(section, items, allowed):
    for key in items:
        if key not in allowed:
            raise ConfigError(f"[{section}] unknown key {key!r}; allowed: {', '.join(allowed)}")


def _required(section, items, keys):
    missing = [k for k in keys if k not in items]
    if missing:
        raise ConfigError(f"[{section}] missing required key(s): {', '.join(missing)}")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   empty_lines_in_values=False)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{sec}]; allowed: {', '.join(SECTIONS)}")
    sec = {name: dict(cp[name]) if cp.has_section(name) else {} for name in SECTIONS}

    # vehicle
    vfields = tuple(f.name for f in dataclasses.fields(VehicleParams))
    _check_keys("vehicle", sec["vehicle"], vfields)
    vehicle = _build("vehicle", VehicleParams,
                     {k: _number("vehicle", k, v) for k, v in sec["vehicle"].items()})

    # scenario
    items = sec["scenario"]
    _check_keys("scenario", items, SCENARIO_KEYS)
    case = items.get("case")
    kw = {}
    if case is not None:
        try:
            kw = dataclasses.asdict(named_case(case))
        except ValueError as exc:
            raise ConfigError(f"[scenario] case: {exc}") from None
    for k, v in items.items():
        if k == "case":
            continue
        kw[k] = v if k == "label" else _number("scenario", k, v)
    scenario = _build("scenario", ScenarioSpec, kw)

    # sim
    items = sec["sim"]
    _check_keys("sim", items, ("dt", "horizon", "model", "record_stride"))
    kw = {}
    for k, v in items.items():
        if k == "model":
            if v not in [m.value for m in Model]:
                raise ConfigError(f"[sim] model: expected one of "
                                  f"{', '.join(m.value for m in Model)}, got {v!r}")
            kw[k] = Model(v)
        else:
            kw[k] = _number("sim", k, v, int if k == "record_stride" else float)
    sim = _build("sim", SimConfig, kw)

    # controls
    _check_keys("steering", sec["steering"], STEERING_FIELDS)
    _required("steering", sec["steering"], STEERING_FIELDS)
    steering = _build("steering", SteeringParams,
                      {k: _number("steering", k, v) for k, v in sec["steering"].items()})
    _check_keys("force", sec["force"], FORCE_FIELDS)
    _required("force", sec["force"], FORCE_FIELDS[1:])
    kw = {k: _number("force", k, v) for k, v in sec["force"].items()}
    auto = "f_initial" not in kw
    if auto:
        kw["f_initial"] = cruise_force(scenario.vx0, vehicle, sim.model)
    force = _build("force", ForceParams, kw)

    # thresholds
    _check_keys("thresholds", sec["thresholds"], ("y_tol", "psi_tol", "hold"))
    thresholds = _build("thresholds", Thresholds,
                        {k: _number("thresholds", k, v) for k, v in sec["thresholds"].items()})

    # tune
    tune = None
    if cp.has_section("tune"):
        items = sec["tune"]
        _check_keys("tune", items, TUNABLE + WEIGHT_KEYS + ("budget",))
        bounds, weights, budget = {}, {}, {}
        for k, v in items.items():
            if k in TUNABLE:
                parts = [p.strip() for p in v.replace(",", " ").split()]
                if len(parts) != 2:
                    raise ConfigError(f"[tune] {k}: expected bounds 'lo, hi', got {v!r}")
                bounds[k] = tuple(_number("tune", k, p) for p in parts)
            elif k == "budget":
                budget["budget"] = _number("tune", k, v, int)
            else:
                weights[k] = _number("tune", k, v)
        w = _build("tune", ObjectiveWeights, weights)
        tune = _build("tune", TuneSpec, dict(bounds=bounds, weights=w, **budget))

    # output
    items = sec["output"]
    _check_keys("output", items, ("dir", "format"))
    fmt = items.get("format", FORMAT_VERSION)
    if fmt != FORMAT_VERSION:
        raise ConfigError(f"[output] format: unsupported version {fmt!r}, expected {FORMAT_VERSION!r}")

    return RunConfig(vehicle, scenario, sim, steering, force, thresholds, tune,
                     case, auto, items.get("dir", "out"), fmt)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Model):
        return v.value
    return str(v)


def render(cfg: RunConfig) -> str:
    """Full config text, every default written out; ``parse_config`` inverts it."""
    lines = []

    def section(name, pairs):
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {_fmt(v)}" for k, v in pairs)
        lines.append("")

    section("vehicle", dataclasses.asdict(cfg.vehicle).items())
    pairs = [("case", cfg.case)] if cfg.case else []
    section("scenario", pairs + list(dataclasses.asdict(cfg.scenario).items()))
    section("sim", [("dt", cfg.sim.dt), ("horizon", cfg.sim.horizon),
                    ("model", cfg.sim.model), ("record_stride", cfg.sim.record_stride)])
    section("steering", [(k, getattr(cfg.steering, k)) for k in STEERING_FIELDS])
    fkeys = FORCE_FIELDS[1:] if cfg.f_initial_auto else FORCE_FIELDS
    section("force", [(k, getattr(cfg.force, k)) for k in fkeys])
    section("thresholds", dataclasses.asdict(cfg.thresholds).items())
    if cfg.tune is not None:
        pairs = [(k, f"{_fmt(float(lo))}, {_fmt(float(hi))}") for k, (lo, hi) in cfg.tune.bounds.items()]
        pairs += list(dataclasses.asdict(cfg.tune.weights).items())
        pairs.append(("budget", cfg.tune.budget))
        section("tune", pairs)
    section("output", [("dir", cfg.out_dir), ("format", cfg.format_version)])
    return "\n".join(lines)


def bundled_configs() -> list:
    root = resources.files("vehrecover") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_config(name_or_path: str) -> RunConfig:
    """Load a config file, or a bundled config by name (e.g. ``case1_generalized``)."""
    path = Path(name_or_path)
    if path.is_file():
        return parse_config(path.read_text(), str(path))
    res = resources.files("vehrecover") / "configs" / f"{name_or_path}.ini"
    if res.is_file():
        return parse_config(res.read_text(), f"{name_or_path}.ini")
    raise ConfigError(f"no config file {name_or_path!r} and no bundled config of that name "
                      f"(bundled: {', '.join(bundled_configs())})")
