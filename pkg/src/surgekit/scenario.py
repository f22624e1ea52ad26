"""Scenario files: plain-text run configuration for the CLI.

Format: one ``key = value`` per line, ``#`` starts a full-line comment,
``[section]`` headers prefix the keys below them, and dotted keys
(``disturbance.target = 0.35``) work without a section header.  Unknown
keys are hard errors so typos cannot silently fall back to defaults.
An empty file is the all-defaults scenario named ``default``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources

from .compressor import CompressorMap, throttle_from_flow
from .errors import DomainError, ScenarioError
from .loop import ControllerConfig, DisturbanceProfile, ValveModel
from .odesim import LOOP_DT, PLANT_DT

KINDS = ("map", "stability", "simulate", "limit-cycle", "tune",
         "closedloop", "averaging")

CONTROLLER_KINDS = ("fixed-pd", "fixed-pid", "adaptive")
TUNE_RULES = ("P", "PI", "PID")

#: per-kind (dt, t_end) defaults for the kinds that integrate
_TIME_DEFAULTS = {
    "simulate": (PLANT_DT, 50.0),
    "limit-cycle": (PLANT_DT, 100.0),
    "closedloop": (LOOP_DT, 50.0),
}

_FLOAT, _INT, _STR, _BOOL = "float", "int", "str", "bool"

#: every key a scenario file may set
KNOWN_KEYS = {
    "run.name": _STR, "run.kind": _STR, "run.dt": _FLOAT,
    "run.t_end": _FLOAT, "run.decimation": _INT,
    "controller.kind": _STR, "controller.kp": _FLOAT,
    "controller.ki": _FLOAT, "controller.kd": _FLOAT,
    "controller.k1": _FLOAT, "controller.k2": _FLOAT,
    "controller.k3": _FLOAT, "controller.gamma": _FLOAT,
    "controller.reference": _FLOAT,
    "disturbance.target": _FLOAT, "disturbance.tau": _FLOAT,
    "disturbance.initial": _FLOAT,
    "valve.tau": _FLOAT, "valve.out_min": _FLOAT, "valve.out_max": _FLOAT,
    "map.psi0": _FLOAT, "map.h": _FLOAT, "map.slope": _FLOAT,
    "map.offset": _FLOAT, "map.c0": _FLOAT, "map.c1": _FLOAT,
    "map.c2": _FLOAT, "map.c3": _FLOAT,
    "map.domain_lo": _FLOAT, "map.domain_hi": _FLOAT,
    "plant.phi0": _FLOAT, "plant.psi0": _FLOAT, "plant.flow": _FLOAT,
    "plant.g": _FLOAT, "plant.perturb_phi": _FLOAT,
    "plant.perturb_psi": _FLOAT,
    "observe.enabled": _BOOL,
    "stability.lo": _FLOAT, "stability.hi": _FLOAT, "stability.n": _INT,
    "cycle.settle_fraction": _FLOAT, "cycle.tol": _FLOAT,
    "averaging.k1_lo": _FLOAT, "averaging.k1_hi": _FLOAT,
    "averaging.k2_lo": _FLOAT, "averaging.k2_hi": _FLOAT,
    "averaging.n": _INT, "averaging.k3": _FLOAT,
    "averaging.gamma": _FLOAT, "averaging.r": _FLOAT,
    "tune.L": _FLOAT, "tune.T": _FLOAT, "tune.rule": _STR,
}


@dataclass
class Scenario:
    """Validated configuration for one CLI run."""

    name: str = "default"
    kind: str = "closedloop"
    dt: float | None = None
    t_end: float | None = None
    decimation: int = 1
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    disturbance: DisturbanceProfile = field(default_factory=DisturbanceProfile)
    valve: ValveModel = field(default_factory=ValveModel)
    cmap: CompressorMap = field(default_factory=CompressorMap)
    observe: bool = False
    phi0: float | None = None
    psi0: float | None = None
    flow: float | None = None
    g: float | None = None
    perturb_phi: float = 0.01
    perturb_psi: float = 0.01
    stab_lo: float = 0.1
    stab_hi: float = 0.79
    stab_n: int = 1000
    settle_fraction: float = 0.5
    cycle_tol: float = 0.01
    avg_k1_lo: float = 0.1
    avg_k1_hi: float = 50.0
    avg_k2_lo: float = 0.1
    avg_k2_hi: float = 50.0
    avg_n: int = 10
    avg_k3: float = 0.7
    avg_gamma: float = 1.0
    avg_r: float = 0.55
    tune_L: float | None = None
    tune_T: float | None = None
    tune_rule: str = "PID"

    def resolved_dt(self) -> float:
        if self.dt is not None:
            return self.dt
        return _TIME_DEFAULTS.get(self.kind, (LOOP_DT,))[0]

    def resolved_t_end(self) -> float:
        if self.t_end is not None:
            return self.t_end
        return _TIME_DEFAULTS.get(self.kind, (None, 50.0))[1]

    def throttle(self) -> float:
        """Throttle parameter of a plant run (from plant.g or plant.flow)."""
        if self.g is not None:
            return self.g
        return throttle_from_flow(self.cmap, self.flow)


def _parse_value(key: str, raw: str, lineno: int):
    want = KNOWN_KEYS[key]
    try:
        if want == _FLOAT:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError("not finite")
            return v
        if want == _INT:
            return int(raw)
        if want == _BOOL:
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError("not a boolean")
        return raw
    except ValueError as err:
        raise ScenarioError(
            f"line {lineno}: bad value for {key}: {raw!r} ({err})") from err


def _parse_lines(lines) -> dict:
    values = {}
    section = ""
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text.startswith("[") and text.endswith("]"):
            section = text[1:-1].strip()
            if not section:
                raise ScenarioError(f"line {lineno}: empty section header")
            continue
        if "=" not in text:
            raise ScenarioError(
                f"line {lineno}: expected 'key = value', got {text!r}")
        key, _, raw = text.partition("=")
        key = key.strip()
        raw = raw.strip()
        full = f"{section}.{key}" if section else key
        if full not in KNOWN_KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {full!r}")
        if full in values:
            raise ScenarioError(f"line {lineno}: duplicate key {full!r}")
        values[full] = _parse_value(full, raw, lineno)
    return values


def _build(values: dict, default_name: str) -> Scenario:
    def take(key, default=None):
        return values.pop(key, default)

    sc = Scenario(name=take("run.name", default_name))
    sc.kind = take("run.kind", sc.kind)
    if sc.kind not in KINDS:
        raise ScenarioError(f"run.kind: must be one of {KINDS}, got {sc.kind!r}")
    sc.dt = take("run.dt", sc.dt)
    sc.t_end = take("run.t_end", sc.t_end)
    sc.decimation = take("run.decimation", sc.decimation)
    if sc.decimation < 1:
        raise ScenarioError(f"run.decimation: must be >= 1, got {sc.decimation}")

    try:
        sc.controller = ControllerConfig(
            kind=take("controller.kind", "adaptive"),
            kp=take("controller.kp", 10.0), ki=take("controller.ki", 24.0),
            kd=take("controller.kd", 1.0), k1=take("controller.k1", 10.0),
            k2=take("controller.k2", 10.0), k3=take("controller.k3", 0.7),
            gamma=take("controller.gamma", 1.0),
            reference=take("controller.reference", 0.55))
    except DomainError as err:
        raise ScenarioError(f"controller: {err}") from err
    try:
        sc.disturbance = DisturbanceProfile(
            target=take("disturbance.target", 0.35),
            tau=take("disturbance.tau", 1.0),
            initial=take("disturbance.initial", 0.50))
    except DomainError as err:
        raise ScenarioError(f"disturbance: {err}") from err
    try:
        sc.valve = ValveModel(tau=take("valve.tau", 2.0),
                              out_min=take("valve.out_min", 0.05),
                              out_max=take("valve.out_max", 0.25))
    except DomainError as err:
        raise ScenarioError(f"valve: {err}") from err
    try:
        sc.cmap = CompressorMap(
            psi0=take("map.psi0", 0.352), h=take("map.h", 0.18),
            slope=take("map.slope", 4.0), offset=take("map.offset", -1.0),
            cubic=(take("map.c0", 1.0), take("map.c1", 1.5),
                   take("map.c2", 0.0), take("map.c3", -0.5)),
            domain_lo=take("map.domain_lo", 0.0),
            domain_hi=take("map.domain_hi", 0.8))
    except DomainError as err:
        raise ScenarioError(f"map: {err}") from err

    sc.observe = take("observe.enabled", False)
    for attr, key in (("phi0", "plant.phi0"), ("psi0", "plant.psi0"),
                      ("flow", "plant.flow"), ("g", "plant.g"),
                      ("perturb_phi", "plant.perturb_phi"),
                      ("perturb_psi", "plant.perturb_psi"),
                      ("stab_lo", "stability.lo"), ("stab_hi", "stability.hi"),
                      ("stab_n", "stability.n"),
                      ("settle_fraction", "cycle.settle_fraction"),
                      ("cycle_tol", "cycle.tol"),
                      ("avg_k1_lo", "averaging.k1_lo"),
                      ("avg_k1_hi", "averaging.k1_hi"),
                      ("avg_k2_lo", "averaging.k2_lo"),
                      ("avg_k2_hi", "averaging.k2_hi"),
                      ("avg_n", "averaging.n"), ("avg_k3", "averaging.k3"),
                      ("avg_gamma", "averaging.gamma"),
                      ("avg_r", "averaging.r"),
                      ("tune_L", "tune.L"), ("tune_T", "tune.T"),
                      ("tune_rule", "tune.rule")):
        if key in values:
            setattr(sc, attr, values.pop(key))
    assert not values, f"unconsumed keys: {values}"
    validate(sc)
    return sc


def validate(sc: Scenario) -> None:
    """Reject precondition violations before any integration starts."""
    if sc.dt is not None and not sc.dt > 0.0:
        raise ScenarioError(f"run.dt: must be > 0, got {sc.dt}")
    if sc.t_end is not None and not sc.t_end > 0.0:
        raise ScenarioError(f"run.t_end: must be > 0, got {sc.t_end}")
    if sc.decimation < 1:
        raise ScenarioError(
            f"run.decimation: must be >= 1, got {sc.decimation}")

    if sc.kind in ("simulate", "limit-cycle"):
        if sc.flow is None and sc.g is None:
            raise ScenarioError(
                f"plant.flow or plant.g: required for kind={sc.kind}")
        if sc.flow is not None and not (
                sc.cmap.domain_lo < sc.flow < sc.cmap.domain_hi):
            raise ScenarioError(
                f"plant.flow: must lie in ({sc.cmap.domain_lo}, "
                f"{sc.cmap.domain_hi}), got {sc.flow}")
        if sc.g is not None and not sc.g > 0.0:
            raise ScenarioError(f"plant.g: must be > 0, got {sc.g}")
        if sc.psi0 is not None and not sc.psi0 > 0.0:
            raise ScenarioError(f"plant.psi0: must be > 0, got {sc.psi0}")
        if (sc.phi0 is None) != (sc.psi0 is None):
            raise ScenarioError(
                "plant.phi0 and plant.psi0 must be given together")
    if sc.kind == "limit-cycle":
        if not 0.0 < sc.settle_fraction < 1.0:
            raise ScenarioError(
                f"cycle.settle_fraction: must be in (0, 1), "
                f"got {sc.settle_fraction}")
        if not sc.cycle_tol > 0.0:
            raise ScenarioError(f"cycle.tol: must be > 0, got {sc.cycle_tol}")
    if sc.kind == "stability":
        if not (sc.cmap.domain_lo < sc.stab_lo < sc.stab_hi
                < sc.cmap.domain_hi):
            raise ScenarioError(
                f"stability.lo/hi: need {sc.cmap.domain_lo} < lo < hi < "
                f"{sc.cmap.domain_hi}, got ({sc.stab_lo}, {sc.stab_hi})")
        if sc.stab_n < 2:
            raise ScenarioError(f"stability.n: must be >= 2, got {sc.stab_n}")
    if sc.kind == "tune":
        if sc.tune_L is None or sc.tune_T is None:
            raise ScenarioError("tune.L and tune.T: required for kind=tune")
        if not (sc.tune_L > 0.0 and sc.tune_T > 0.0):
            raise ScenarioError(
                f"tune.L/tune.T: must be > 0, got ({sc.tune_L}, {sc.tune_T})")
        if sc.tune_rule not in TUNE_RULES:
            raise ScenarioError(
                f"tune.rule: must be one of {TUNE_RULES}, got {sc.tune_rule!r}")
    if sc.kind == "averaging":
        if not (0.0 <= sc.avg_k1_lo <= sc.avg_k1_hi
                and 0.0 <= sc.avg_k2_lo <= sc.avg_k2_hi):
            raise ScenarioError("averaging.k*_lo/hi: bounds must be ordered "
                                "and nonnegative")
        if sc.avg_n < 2:
            raise ScenarioError(f"averaging.n: must be >= 2, got {sc.avg_n}")
        if not sc.avg_gamma > 0.0:
            raise ScenarioError(
                f"averaging.gamma: must be > 0, got {sc.avg_gamma}")
        if sc.avg_k3 < 0.0:
            raise ScenarioError(f"averaging.k3: must be >= 0, got {sc.avg_k3}")


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file."""
    path = os.fspath(path)
    default_name = os.path.splitext(os.path.basename(path))[0] or "default"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except FileNotFoundError as err:
        raise ScenarioError(f"scenario file not found: {path}") from err
    if not any(line.strip() and not line.strip().startswith("#")
               for line in lines):
        default_name = "default"
    return _build(_parse_lines(lines), default_name)


def shipped_scenarios() -> dict[str, object]:
    """Name -> resource path of the scenario files installed with the package."""
    root = resources.files(__package__) / "scenarios"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".scn"):
            out[entry.name[:-4]] = entry
    return out


def resolve_scenario(name_or_path: str) -> Scenario:
    """Load a scenario by file path or shipped catalog name."""
    if os.path.exists(name_or_path):
        return load_scenario(name_or_path)
    catalog = shipped_scenarios()
    name = name_or_path[:-4] if name_or_path.endswith(".scn") else name_or_path
    if name in catalog:
        with resources.as_file(catalog[name]) as real:
            return load_scenario(real)
    raise ScenarioError(
        f"no scenario file or catalog entry named {name_or_path!r}; "
        f"shipped: {', '.join(sorted(catalog))}")
