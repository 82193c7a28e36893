"""Scenario assembly: dynamics and FSW model registration, initial
conditions, logging and output extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..astro.attitude import mrp_switch
from ..astro.constants import MU_EARTH
from ..astro.elements import rv2elem
from ..dynamics import DynamicsModel
from ..ephem import EpochSpec, create_body
from ..fsw import ControlGains, FswMode, FswModel
from ..kernel import SimContainer, nano2sec, sec2nano
from ..messaging import Recorder, sampling_time
from .config import ScenarioConfig

KINDS = ("basicOrbit", "earthOrbit", "sunEarth", "attitudeControl")

SERIES_KEYS = ("r_BN_N", "v_BN_N", "sigma_BN", "omega_BN_B",
               "sigma_BR", "omega_BR_B", "cmd_torque", "elements")


class ScenarioError(ValueError):
    pass


@dataclass
class OutputBundle:
    """Named time series pulled from recorders after a run."""

    kind: str
    times: np.ndarray  # int64 ns
    series: dict[str, np.ndarray] = field(default_factory=dict)
    bodies: dict[str, np.ndarray] = field(default_factory=dict)
    modes: Optional[list[str]] = None

    @property
    def t_s(self) -> np.ndarray:
        return self.times / 1e9

    def __getitem__(self, key):
        return self.series[key]

    def __contains__(self, key):
        return key in self.series

    def __len__(self):
        return len(self.times)


class ScenarioInstance:
    """A built scenario: container, dynamics model, optional FSW model, recorders."""

    def __init__(self, config: ScenarioConfig, kind: str):
        if kind not in KINDS:
            raise ScenarioError(f"unknown scenario kind {kind!r}; expected one of {', '.join(KINDS)}")
        self.config = config
        self.kind = kind
        self.sim = SimContainer()
        self.dynamics_model: Optional[DynamicsModel] = None
        self.fsw_model: Optional[FswModel] = None
        self.recorders: dict[str, Recorder] = {}
        self.executed = False

        sim_cfg = config.simulation
        self.dt = sec2nano(sim_cfg.time_step)
        self.stop = sec2nano(sim_cfg.simulation_time)
        self.sampling = (sampling_time(self.stop, self.dt, sim_cfg.num_data_points)
                         if sim_cfg.num_data_points else 0)

        self.set_dynamics_model()
        if kind == "attitudeControl":
            self.set_fsw_model()
        self.configure_initial_conditions()
        self.log_outputs()

    # model registration

    def _gravity_bodies(self):
        cfg = self.config.gravity
        if self.kind == "basicOrbit":
            return [], []
        if self.kind == "earthOrbit":
            names = ["earth"]
        elif self.kind == "sunEarth":
            names = ["sun", "earth"]
        else:
            names = list(cfg.bodies)
            if "earth" not in names:
                names.append("earth")
        bodies = []
        for name in names:
            body = create_body(name)
            body.is_central = name == cfg.central
            body.use_j2 = body.is_central and cfg.use_j2
            bodies.append(body)
        ephem = names if self.kind in ("sunEarth", "attitudeControl") else []
        return bodies, ephem

    def set_dynamics_model(self) -> None:
        bodies, ephem = self._gravity_bodies()
        fsw = self.kind == "attitudeControl"
        names = {}
        if not fsw:
            names = dict(process_name=self.config.simulation.process_name,
                         task_name=self.config.simulation.task_name)
        self.dynamics_model = DynamicsModel(
            self.sim, self.dt, gravity=bodies, ephemeris_bodies=ephem,
            epoch=EpochSpec.parse(self.config.epoch), with_effector=fsw, with_nav=fsw,
            sc_tag=self.config.spacecraft.name, **names)

    def set_fsw_model(self) -> None:
        c = self.config.control
        gains = ControlGains(K=c.K, Ki=c.Ki, P=c.P, integral_limit=c.integral_limit)
        fsw_dt = self.config.simulation.fsw_time_step or self.config.simulation.time_step
        self.fsw_model = FswModel(self.sim, self.dynamics_model, sec2nano(fsw_dt), gains)
        if self.config.mode is not None:
            self.fsw_model.set_mode(self.config.mode)

    # scenario hooks

    def configure_initial_conditions(self) -> None:
        sc_cfg = self.config.spacecraft
        hub = self.dynamics_model.spacecraft
        hub.mass = sc_cfg.mass
        hub.I_sc = sc_cfg.I_sc
        if self.fsw_model is not None:
            self.fsw_model.mrp_feedback.I_sc = hub.I_sc
        hub.sigma_BN_init = mrp_switch(np.array(sc_cfg.sigma_BN, dtype=float))
        hub.omega_BN_B_init = np.array(sc_cfg.omega_BN_B, dtype=float)
        if self.kind == "basicOrbit":
            hub.r_CN_N_init = np.array(sc_cfg.r_CN_N_init or [0.0, 0.0, 0.0], dtype=float)
            hub.v_CN_N_init = np.array(sc_cfg.v_CN_N_init or [0.0, 0.0, 0.0], dtype=float)
        else:
            hub.r_CN_N_init, hub.v_CN_N_init = self.config.initial_translational_state()

    def log_outputs(self) -> None:
        task = self.dynamics_model.task.name
        dyn = self.dynamics_model

        def attach(name, msg):
            rec = msg.recorder(self.sampling, tag=f"{name}Recorder")
            self.recorders[name] = rec
            self.sim.add_model_to_task(task, rec)

        attach("sc_state", dyn.spacecraft.sc_state_out_msg)
        if dyn.planet_ephemeris is not None:
            for body, msg in zip(dyn.planet_ephemeris.bodies,
                                 dyn.planet_ephemeris.planet_state_out_msgs):
                attach(f"planet_{body}", msg)
        if self.fsw_model is not None:
            attach("att_guid", self.fsw_model.attitude_guid_msg)
            attach("cmd_torque", self.fsw_model.cmd_torque_msg)
            attach("mode", self.fsw_model.mode_msg)

    def pull_outputs(self) -> OutputBundle:
        if not self.executed:
            raise ScenarioError("pull_outputs called before the scenario was executed")
        sc = self.recorders["sc_state"]
        bundle = OutputBundle(self.kind, sc.times())
        bundle.series["r_BN_N"] = sc.r_BN_N
        bundle.series["v_BN_N"] = sc.v_BN_N
        bundle.series["sigma_BN"] = sc.sigma_BN
        bundle.series["omega_BN_B"] = sc.omega_BN_B
        if self.fsw_model is not None:
            guid = self.recorders["att_guid"]
            bundle.series["sigma_BR"] = guid.sigma_BR
            bundle.series["omega_BR_B"] = guid.omega_BR_B
            bundle.series["cmd_torque"] = self.recorders["cmd_torque"].torque_B
            bundle.modes = [str(m) for m in self.recorders["mode"].mode]
        if self.dynamics_model.spacecraft.grav_bodies:
            bundle.series["elements"] = np.array([
                rv2elem(MU_EARTH, r, v).as_array()
                for r, v in zip(bundle.series["r_BN_N"], bundle.series["v_BN_N"])])
        if self.dynamics_model.planet_ephemeris is not None:
            for body in self.dynamics_model.planet_ephemeris.bodies:
                bundle.bodies[body] = self.recorders[f"planet_{body}"].r_N
        elif self.dynamics_model.spacecraft.grav_bodies:
            bundle.bodies["earth"] = np.zeros((len(bundle), 3))
        return bundle

    def show_execution_order(self) -> str:
        return self.sim.show_execution_order()

    @property
    def final_time_s(self) -> float:
        return nano2sec(self.sim.clock)


def build_scenario(config: ScenarioConfig, kind: str) -> ScenarioInstance:
    return ScenarioInstance(config, kind)


def run_scenario(instance: ScenarioInstance, mode=None, stop: Optional[int] = None) -> OutputBundle:
    """Set mode, initialize, configure stop time, execute, pull outputs."""
    if mode is not None:
        if instance.fsw_model is None:
            raise ScenarioError(f"mode {mode!r} requested but scenario '{instance.kind}' has no FSW model")
        instance.fsw_model.set_mode(FswMode.parse(mode))
    instance.sim.initialize_simulation()
    instance.sim.configure_stop_time(instance.stop if stop is None else int(stop))
    instance.sim.execute_simulation()
    instance.executed = True
    return instance.pull_outputs()
