"""Spacecraft hub, external torque effector and the reusable dynamics model."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .astro.gravity import GravityBody, gravity_accel
from .astro.attitude import attitude_kinematics, rigid_body_dynamics
from .astro.inertia import InertiaError, check_inertia
from .astro.integrate import rk4_step
from .ephem import DEFAULT_EPOCH, EpochSpec, EphemerisConverter, PlanetEphemeris, sun_state
from .kernel import SimContainer, SysModel, nano2sec
from .messaging import CmdTorqueMsg, InputPort, Message, SCStatesMsg

MRP_SLICE = slice(6, 9)


def _body_position(name: str, t: float) -> np.ndarray:
    if name == "earth":
        return np.zeros(3)
    if name == "sun":
        return sun_state(t)[0]
    raise ValueError(f"no analytic ephemeris for '{name}'")


class ExtForceTorque(SysModel):
    """Stages a commanded body torque for the hub's next integration step."""

    def __init__(self, tag: str = "extForceTorque"):
        super().__init__(tag)
        self.cmd_torque_in_msg = InputPort(CmdTorqueMsg)
        self.ext_torque_B = np.zeros(3)
        self.ext_force_N = np.zeros(3)
        self.torque_B = np.zeros(3)

    def reset(self, current_nanos):
        self.torque_B = np.array(self.ext_torque_B, dtype=float)

    def update(self, current_nanos):
        torque = np.array(self.ext_torque_B, dtype=float)
        if self.cmd_torque_in_msg.is_linked:
            torque = torque + self.cmd_torque_in_msg.read().torque_B
        self.torque_B = torque


class Spacecraft(SysModel):
    """Rigid spacecraft hub propagated with RK4 between task firings.

    At each update the state is integrated from the previous firing time to the
    current one with a single step, then published.
    """

    def __init__(self, tag: str = "bskSat"):
        super().__init__(tag)
        self.mass = 750.0
        self.I_sc = np.diag([900.0, 800.0, 700.0])
        self.r_CN_N_init = np.zeros(3)
        self.v_CN_N_init = np.zeros(3)
        self.sigma_BN_init = np.zeros(3)
        self.omega_BN_B_init = np.zeros(3)
        self.grav_bodies: list[GravityBody] = []
        self.body_position: Callable[[str, float], np.ndarray] = _body_position
        self.effectors: list[ExtForceTorque] = []
        self.sc_state_out_msg = Message(SCStatesMsg)
        self.state = np.zeros(12)
        self._t_prev = 0

    def add_effector(self, effector: ExtForceTorque) -> None:
        self.effectors.append(effector)

    def reset(self, current_nanos):
        check = check_inertia(self.I_sc)
        if not check:
            raise InertiaError(check.message)
        if self.mass <= 0:
            raise ValueError(f"hub mass must be positive, got {self.mass}")
        self.I_sc = np.asarray(self.I_sc, dtype=float).reshape(3, 3)
        self.state = np.concatenate([
            np.asarray(self.r_CN_N_init, dtype=float), np.asarray(self.v_CN_N_init, dtype=float),
            np.asarray(self.sigma_BN_init, dtype=float), np.asarray(self.omega_BN_B_init, dtype=float),
        ])
        self._t_prev = current_nanos
        self._publish(current_nanos)

    def _positions(self, t: float) -> dict[str, np.ndarray]:
        central = next(b for b in self.grav_bodies if b.is_central)
        r0 = self.body_position(central.name, t)
        return {b.name: self.body_position(b.name, t) - r0
                for b in self.grav_bodies if not b.is_central}

    def derivatives(self, t: float, x: np.ndarray) -> np.ndarray:
        r, v, sigma, omega = x[0:3], x[3:6], x[6:9], x[9:12]
        torque = np.zeros(3)
        force = np.zeros(3)
        for eff in self.effectors:
            torque = torque + eff.torque_B
            force = force + eff.ext_force_N
        acc = force / self.mass
        if self.grav_bodies:
            positions = self._positions(t) if len(self.grav_bodies) > 1 else None
            acc = acc + gravity_accel(self.grav_bodies, r, positions)
        return np.concatenate([
            v, acc, attitude_kinematics(sigma, omega),
            rigid_body_dynamics(self.I_sc, omega, torque),
        ])

    def update(self, current_nanos):
        if current_nanos > self._t_prev:
            self.state = rk4_step(self.derivatives, self.state, nano2sec(self._t_prev),
                                  nano2sec(current_nanos - self._t_prev), mrp=MRP_SLICE)
            self._t_prev = current_nanos
        self._publish(current_nanos)

    def _publish(self, t: int) -> None:
        x = self.state
        self.sc_state_out_msg.write(
            SCStatesMsg(x[0:3].copy(), x[3:6].copy(), x[6:9].copy(), x[9:12].copy()), t)


class DynamicsModel:
    """Dynamics process: hub, effector, ephemerides and navigation sensor.

    Module priorities inside the dynamics task: torque effector 300, hub 201,
    planet ephemeris 200, ephemeris converter 199, navigation 109.
    """

    def __init__(self, sim: SimContainer, rate: int, *, gravity: Sequence[GravityBody] = (),
                 ephemeris_bodies: Sequence[str] = (), epoch: EpochSpec = DEFAULT_EPOCH,
                 with_effector: bool = False, with_nav: bool = False,
                 sc_tag: str = "bskSat", process_name: str = "DynamicsProcess",
                 task_name: str = "DynamicsTask", process_priority: Optional[int] = None):
        from .fsw import SimpleNav

        self.sim = sim
        self.task_name = task_name
        self.process = sim.create_process(process_name, process_priority)
        self.task = sim.create_task(self.process, task_name, rate)

        self.spacecraft = Spacecraft(sc_tag)
        self.spacecraft.grav_bodies = list(gravity)
        self.ext_force_torque = ExtForceTorque() if with_effector else None
        self.planet_ephemeris = None
        self.earth_ephem = None
        self.simple_nav = None

        if self.ext_force_torque is not None:
            self.spacecraft.add_effector(self.ext_force_torque)
            sim.add_model_to_task(self.task_name, self.ext_force_torque, 300)
        sim.add_model_to_task(self.task_name, self.spacecraft, 201)
        if ephemeris_bodies:
            self.planet_ephemeris = PlanetEphemeris(ephemeris_bodies, epoch, zero_base="earth")
            self.earth_ephem = EphemerisConverter()
            self.earth_ephem.add_input_msg(
                self.planet_ephemeris.planet_state_out_msgs[self.planet_ephemeris.bodies.index("earth")])
            sim.add_model_to_task(self.task_name, self.planet_ephemeris, 200)
            sim.add_model_to_task(self.task_name, self.earth_ephem, 199)
        if with_nav:
            self.simple_nav = SimpleNav()
            self.simple_nav.sc_state_in_msg.subscribe_to(self.spacecraft.sc_state_out_msg)
            sim.add_model_to_task(self.task_name, self.simple_nav, 109)
