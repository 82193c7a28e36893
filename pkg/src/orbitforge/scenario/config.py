"""YAML scenario configuration.

Two document shapes are accepted and normalized to the same result: each
section either as a plain mapping, or as a list of single-key mappings::

    simulation:
      - simulation_time: 1000.0
      - time_step: 1.0

Lengths in the orbit block are in km and angles in degrees; the
:class:`OrbitConfig.elements` property gives SI values.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from ..astro.constants import D2R, MU_EARTH
from ..astro.elements import ClassicElements, elem2rv
from ..astro.inertia import InertiaError, check_inertia
from ..ephem import SUPPORTED_BODIES, EphemerisError, EpochSpec
from ..fsw import FswMode

TIME_UNITS = {"sec": 1.0, "s": 1.0, "seconds": 1.0, "min": 60.0, "minutes": 60.0}

_ALIASES = {
    "simulation": {"simulation_process_name": "process_name",
                   "simulation_task_name": "task_name"},
}


@dataclass
class ConfigIssue:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, issues: list[ConfigIssue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


@dataclass
class SimulationConfig:
    process_name: str = "simulation_process"
    task_name: str = "simulation_task"
    simulation_time: float = 1000.0  # s
    time_step: float = 1.0  # s
    fsw_time_step: Optional[float] = None
    num_data_points: Optional[int] = None


@dataclass
class SpacecraftConfig:
    mass: float = 750.0
    # basic preset inertia is the default; the attitude preset ships 900/800/600
    inertia: list[float] = field(default_factory=lambda: [900.0, 0.0, 0.0,
                                                          0.0, 800.0, 0.0,
                                                          0.0, 0.0, 700.0])
    name: str = "bsk_sat"
    sigma_BN: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    omega_BN_B: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    r_CN_N_init: Optional[list[float]] = None
    v_CN_N_init: Optional[list[float]] = None

    @property
    def I_sc(self) -> np.ndarray:
        return np.array(self.inertia, dtype=float).reshape(3, 3)


@dataclass
class OrbitConfig:
    a_km: float = 7000.0
    e: float = 0.0001
    i_deg: float = 33.3
    raan_deg: float = 48.2
    argp_deg: float = 347.8
    f_deg: float = 85.3

    @property
    def elements(self) -> ClassicElements:
        return ClassicElements(a=self.a_km * 1000.0, e=self.e, i=self.i_deg * D2R,
                               Omega=self.raan_deg * D2R, omega=self.argp_deg * D2R,
                               f=self.f_deg * D2R)


@dataclass
class GravityConfig:
    bodies: list[str] = field(default_factory=lambda: ["earth"])
    central: str = "earth"
    use_j2: bool = False


@dataclass
class ControlConfig:
    K: float = 3.5
    Ki: float = -1.0
    P: float = 30.0
    integral_limit: float = -0.2


@dataclass
class ScenarioConfig:
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    spacecraft: SpacecraftConfig = field(default_factory=SpacecraftConfig)
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    gravity: GravityConfig = field(default_factory=GravityConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    mode: Optional[str] = None
    epoch: str = "2000 Jan 1 11:59:28.000 (UTC)"
    warnings: list[str] = field(default_factory=list, compare=False)

    def to_dict(self) -> dict:
        out = {}
        for key in ("simulation", "spacecraft", "orbit", "gravity", "control"):
            out[key] = {k: v for k, v in asdict(getattr(self, key)).items() if v is not None}
        if self.mode is not None:
            out["mode"] = self.mode
        out["epoch"] = self.epoch
        return out

    def copy(self) -> "ScenarioConfig":
        return copy.deepcopy(self)

    def initial_translational_state(self) -> tuple[np.ndarray, np.ndarray]:
        """Initial r, v: explicit overrides win, else the orbit elements."""
        sc = self.spacecraft
        if sc.r_CN_N_init is not None and sc.v_CN_N_init is not None:
            return np.array(sc.r_CN_N_init, float), np.array(sc.v_CN_N_init, float)
        r, v = elem2rv(MU_EARTH, self.orbit.elements)
        if sc.r_CN_N_init is not None:
            r = np.array(sc.r_CN_N_init, float)
        if sc.v_CN_N_init is not None:
            v = np.array(sc.v_CN_N_init, float)
        return r, v


# parsing


class _Loader:
    def __init__(self):
        self.issues: list[ConfigIssue] = []
        self.warnings: list[str] = []

    def error(self, path, msg):
        self.issues.append(ConfigIssue(path, msg))

    def section(self, doc: dict, name: str) -> Optional[dict]:
        raw = doc.get(name)
        if raw is None:
            return None
        if isinstance(raw, list):
            merged = {}
            for idx, item in enumerate(raw):
                if not isinstance(item, dict) or len(item) != 1:
                    self.error(f"{name}[{idx}]", "expected a single-key mapping")
                    continue
                (k, v), = item.items()
                if k in merged:
                    self.error(f"{name}.{k}", "duplicate key")
                merged[k] = v
            raw = merged
        if not isinstance(raw, dict):
            self.error(name, "expected a mapping or a list of single-key mappings")
            return None
        aliases = _ALIASES.get(name, {})
        return {aliases.get(k, k): v for k, v in raw.items()}

    def number(self, sec: dict, name: str, key: str, default=None, required=False):
        path = f"{name}.{key}"
        if key not in sec:
            if required:
                self.error(path, "missing required key")
            return default
        val = sec[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            self.error(path, f"expected a finite number, got {val!r}")
            return default
        return float(val)

    def vector(self, sec: dict, name: str, key: str, n: int, default=None):
        path = f"{name}.{key}"
        if key not in sec or sec[key] is None:
            return default
        val = sec[key]
        if isinstance(val, list) and val and all(isinstance(r, list) for r in val):
            val = [x for row in val for x in row]
        if (not isinstance(val, list) or len(val) != n
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in val)):
            self.error(path, f"expected a list of {n} numbers")
            return default
        return [float(x) for x in val]

    def unknown(self, sec: dict, name: str, known):
        for k in sec:
            if k not in known:
                self.warnings.append(f"{name}.{k}: unknown key ignored")


_SIM_KEYS = {"process_name", "task_name", "simulation_time", "simulation_time_unit",
             "time_step", "fsw_time_step", "num_data_points"}


def _parse_simulation(ld: _Loader, doc) -> SimulationConfig:
    sec = ld.section(doc, "simulation")
    if sec is None:
        ld.error("simulation", "missing required section")
        return SimulationConfig()
    ld.unknown(sec, "simulation", _SIM_KEYS)
    unit = str(sec.get("simulation_time_unit", "sec"))
    scale = TIME_UNITS.get(unit)
    if scale is None:
        ld.error("simulation.simulation_time_unit",
                 f"unsupported unit {unit!r}; use sec or min")
        scale = 1.0
    cfg = SimulationConfig()
    cfg.process_name = str(sec.get("process_name", cfg.process_name))
    cfg.task_name = str(sec.get("task_name", cfg.task_name))
    t_final = ld.number(sec, "simulation", "simulation_time", required=True)
    dt = ld.number(sec, "simulation", "time_step", required=True)
    if dt is not None:
        cfg.time_step = dt
        if dt <= 0:
            ld.error("simulation.time_step", f"must be > 0, got {dt:g}")
    if t_final is not None:
        cfg.simulation_time = t_final * scale
        if dt is not None and dt > 0 and cfg.simulation_time < dt:
            ld.error("simulation.simulation_time",
                     f"must be >= time_step ({cfg.simulation_time:g} < {dt:g})")
    fsw_dt = ld.number(sec, "simulation", "fsw_time_step")
    if fsw_dt is not None and fsw_dt <= 0:
        ld.error("simulation.fsw_time_step", f"must be > 0, got {fsw_dt:g}")
    cfg.fsw_time_step = fsw_dt
    if "num_data_points" in sec:
        n = sec["num_data_points"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            ld.error("simulation.num_data_points", f"expected an integer >= 2, got {n!r}")
        else:
            cfg.num_data_points = n
    return cfg


def _parse_spacecraft(ld: _Loader, doc) -> SpacecraftConfig:
    sec = ld.section(doc, "spacecraft")
    cfg = SpacecraftConfig()
    if sec is None:
        ld.error("spacecraft", "missing required section")
        return cfg
    ld.unknown(sec, "spacecraft", {f for f in SpacecraftConfig.__dataclass_fields__})
    mass = ld.number(sec, "spacecraft", "mass", required=True)
    if mass is not None:
        cfg.mass = mass
        if mass <= 0:
            ld.error("spacecraft.mass", f"must be > 0, got {mass:g}")
    if "inertia" not in sec:
        ld.error("spacecraft.inertia", "missing required key")
    inertia = ld.vector(sec, "spacecraft", "inertia", 9)
    if inertia is not None:
        cfg.inertia = inertia
        try:
            check = check_inertia(inertia)
            if not check:
                ld.error("spacecraft.inertia", check.message)
        except InertiaError as exc:
            ld.error("spacecraft.inertia", str(exc))
    cfg.name = str(sec.get("name", cfg.name))
    cfg.sigma_BN = ld.vector(sec, "spacecraft", "sigma_BN", 3, cfg.sigma_BN)
    cfg.omega_BN_B = ld.vector(sec, "spacecraft", "omega_BN_B", 3, cfg.omega_BN_B)
    cfg.r_CN_N_init = ld.vector(sec, "spacecraft", "r_CN_N_init", 3)
    cfg.v_CN_N_init = ld.vector(sec, "spacecraft", "v_CN_N_init", 3)
    return cfg


def _parse_orbit(ld: _Loader, doc) -> OrbitConfig:
    sec = ld.section(doc, "orbit")
    cfg = OrbitConfig()
    if sec is None:
        return cfg
    keys = list(OrbitConfig.__dataclass_fields__)
    ld.unknown(sec, "orbit", keys)
    for key in keys:
        val = ld.number(sec, "orbit", key, getattr(cfg, key))
        setattr(cfg, key, val)
    if cfg.a_km <= 0:
        ld.error("orbit.a_km", f"must be > 0, got {cfg.a_km:g}")
    if not 0.0 <= cfg.e < 1.0:
        ld.error("orbit.e", f"only elliptic orbits supported (0 <= e < 1), got {cfg.e:g}")
    return cfg


def _parse_gravity(ld: _Loader, doc) -> GravityConfig:
    sec = ld.section(doc, "gravity")
    cfg = GravityConfig()
    if sec is None:
        return cfg
    ld.unknown(sec, "gravity", {"bodies", "central", "use_j2"})
    bodies = sec.get("bodies", cfg.bodies)
    if not isinstance(bodies, list) or not all(isinstance(b, str) for b in bodies):
        ld.error("gravity.bodies", "expected a list of body names")
        bodies = cfg.bodies
    cfg.bodies = [b.lower() for b in bodies]
    for b in cfg.bodies:
        if b not in SUPPORTED_BODIES:
            ld.error("gravity.bodies", f"unsupported body {b!r}; supported: {', '.join(SUPPORTED_BODIES)}")
    cfg.central = str(sec.get("central", cfg.central)).lower()
    if cfg.central not in cfg.bodies:
        ld.error("gravity.central", f"central body {cfg.central!r} not in bodies")
    elif cfg.central != "earth":
        ld.error("gravity.central", "only an Earth-centered frame is supported")
    use_j2 = sec.get("use_j2", cfg.use_j2)
    if not isinstance(use_j2, bool):
        ld.error("gravity.use_j2", f"expected true/false, got {use_j2!r}")
    else:
        cfg.use_j2 = use_j2
    return cfg


def _parse_control(ld: _Loader, doc) -> ControlConfig:
    sec = ld.section(doc, "control")
    cfg = ControlConfig()
    if sec is None:
        return cfg
    keys = list(ControlConfig.__dataclass_fields__)
    ld.unknown(sec, "control", keys)
    for key in keys:
        setattr(cfg, key, ld.number(sec, "control", key, getattr(cfg, key)))
    for key in ("K", "P"):
        if getattr(cfg, key) <= 0:
            ld.error(f"control.{key}", "must be > 0")
    return cfg


def config_from_mapping(doc: Any) -> ScenarioConfig:
    ld = _Loader()
    if not isinstance(doc, dict):
        raise ConfigError([ConfigIssue("<root>", "expected a mapping at the top level")])
    for key in doc:
        if key not in ("simulation", "spacecraft", "orbit", "gravity", "control", "mode", "epoch"):
            ld.warnings.append(f"{key}: unknown key ignored")
    cfg = ScenarioConfig(
        simulation=_parse_simulation(ld, doc),
        spacecraft=_parse_spacecraft(ld, doc),
        orbit=_parse_orbit(ld, doc),
        gravity=_parse_gravity(ld, doc),
        control=_parse_control(ld, doc),
    )
    if doc.get("mode") is not None:
        try:
            cfg.mode = FswMode.parse(doc["mode"]).value
        except ValueError as exc:
            ld.error("mode", str(exc))
    if "epoch" in doc:
        try:
            cfg.epoch = EpochSpec.parse(str(doc["epoch"])).utc_string
        except EphemerisError as exc:
            ld.error("epoch", str(exc))
    if ld.issues:
        raise ConfigError(ld.issues)
    cfg.warnings = ld.warnings
    return cfg


def load_config(text: str) -> ScenarioConfig:
    """Parse and validate a YAML scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError([ConfigIssue("<yaml>", f"parse error at {where}: {exc.problem}")]) from None
    except yaml.YAMLError as exc:
        raise ConfigError([ConfigIssue("<yaml>", f"parse error: {exc}")]) from None
    return config_from_mapping(doc)


def load_config_file(path) -> ScenarioConfig:
    return load_config(Path(path).read_text())


def dump_config(cfg: ScenarioConfig) -> str:
    """Emit a config as a mapping-shaped YAML document."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


# dotted parameter paths


def get_parameter(cfg: ScenarioConfig, path: str):
    node: Any = cfg
    for part in path.split("."):
        if not hasattr(node, part) or part.startswith("_"):
            raise KeyError(f"unknown parameter path {path!r}")
        node = getattr(node, part)
    if node is None and path in ("spacecraft.r_CN_N_init", "spacecraft.v_CN_N_init"):
        r, v = cfg.initial_translational_state()
        node = (r if path.endswith("r_CN_N_init") else v).tolist()
    return copy.deepcopy(node)


def with_parameter(cfg: ScenarioConfig, path: str, value) -> ScenarioConfig:
    """Return a validated copy of ``cfg`` with the dotted ``path`` set to ``value``."""
    get_parameter(cfg, path)
    doc = cfg.to_dict()
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    if isinstance(value, np.ndarray):
        value = value.tolist()
    elif isinstance(value, np.generic):
        value = value.item()
    node[parts[-1]] = value
    return config_from_mapping(doc)
