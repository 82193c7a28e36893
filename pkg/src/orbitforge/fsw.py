"""Flight software: navigation, pointing references, tracking error and MRP
feedback control, wired through gateway messages and switched by mode."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .astro.attitude import dcm_to_mrp, mrp_relative, mrp_to_dcm
from .kernel import SimContainer, SimulationError, SysModel, nano2sec
from .messaging import (AttGuidMsg, AttRefMsg, CmdTorqueMsg, EphemerisRecord, FswModeMsg,
                        Gateway, InputPort, Message, NavAttMsg, NavTransMsg, SCStatesMsg)


class ConfigurationError(SimulationError):
    pass


class FswMode(str, Enum):
    STANDBY = "standby"
    INERTIAL_POINT = "inertialPoint"
    HILL_POINT = "hillPoint"

    @classmethod
    def parse(cls, value) -> "FswMode":
        if isinstance(value, FswMode):
            return value
        for mode in cls:
            if mode.value == value:
                return mode
        raise ValueError(
            f"unknown mode {value!r}; valid modes: {', '.join(m.value for m in cls)}")


@dataclass
class ControlGains:
    K: float = 3.5
    Ki: float = -1.0
    P: float = 30.0
    integral_limit: float = 0.2

    def __post_init__(self):
        if self.K <= 0 or self.P <= 0:
            raise ValueError(f"gains K and P must be positive (K={self.K}, P={self.P})")
        # a negative limit (as produced by 2/Ki*0.1 with Ki<0) is read as a magnitude
        self.integral_limit = abs(self.integral_limit)

    @property
    def integral_enabled(self) -> bool:
        return self.Ki > 0


def _require(port: InputPort, tag: str, name: str) -> None:
    if not port.is_linked:
        raise ConfigurationError(f"{tag}: required input '{name}' is not linked")


# pure algorithm functions


def simple_nav_update(sc: SCStatesMsg, time: int = 0) -> tuple[NavTransMsg, NavAttMsg]:
    return (NavTransMsg(sc.r_BN_N.copy(), sc.v_BN_N.copy(), time),
            NavAttMsg(sc.sigma_BN.copy(), sc.omega_BN_B.copy()))


def hill_frame(r_rel, v_rel) -> np.ndarray:
    """DCM [HN] whose rows are the radial, along-track and orbit-normal axes."""
    r_rel = np.asarray(r_rel, dtype=float)
    v_rel = np.asarray(v_rel, dtype=float)
    r = np.linalg.norm(r_rel)
    h_vec = np.cross(r_rel, v_rel)
    h = np.linalg.norm(h_vec)
    if r == 0.0 or h <= 1e-12 * r * max(np.linalg.norm(v_rel), 1.0):
        raise ValueError("undefined Hill frame: position is zero or motion is radial")
    i_r = r_rel / r
    i_h = h_vec / h
    i_th = np.cross(i_h, i_r)
    return np.vstack([i_r, i_th, i_h])


def hill_point_reference(nav: NavTransMsg, planet: Optional[EphemerisRecord] = None) -> AttRefMsg:
    r_p = planet.r_N if planet is not None else np.zeros(3)
    v_p = planet.v_N if planet is not None else np.zeros(3)
    r_rel = nav.r_BN_N - r_p
    v_rel = nav.v_BN_N - v_p
    C = hill_frame(r_rel, v_rel)
    r2 = float(r_rel @ r_rel)
    omega = np.cross(r_rel, v_rel) / r2
    domega = -2.0 * float(r_rel @ v_rel) / r2 * omega
    return AttRefMsg(dcm_to_mrp(C), omega, domega)


def inertial_point_reference(sigma_R0N=None) -> AttRefMsg:
    sigma = np.zeros(3) if sigma_R0N is None else np.array(sigma_R0N, dtype=float)
    return AttRefMsg(sigma, np.zeros(3), np.zeros(3))


def attitude_tracking_error(nav: NavAttMsg, ref: AttRefMsg) -> AttGuidMsg:
    BN = mrp_to_dcm(nav.sigma_BN)
    sigma_BR = mrp_relative(nav.sigma_BN, ref.sigma_RN)
    omega_RN_B = BN @ ref.omega_RN_N
    domega_RN_B = BN @ ref.domega_RN_N
    return AttGuidMsg(sigma_BR, nav.omega_BN_B - omega_RN_B, omega_RN_B, domega_RN_B)


def mrp_feedback_control(guid: AttGuidMsg, gains: ControlGains, I_sc, z, dt: float,
                         time: Optional[float] = None) -> tuple[CmdTorqueMsg, np.ndarray]:
    """MRP feedback law with gyroscopic compensation.

    u = -K sigma - P (dw + Ki z) + w x I w, with the integral term present only
    for Ki > 0.  The integral state is clamped per axis to the limit magnitude.
    """
    parts = (guid.sigma_BR, guid.omega_BR_B, guid.omega_RN_B, guid.domega_RN_B)
    if not all(np.all(np.isfinite(p)) for p in parts):
        when = "" if time is None else f" at t={time:.9f} s"
        raise ValueError(f"non-finite attitude guidance{when}")
    I_sc = np.asarray(I_sc, dtype=float)
    sigma = guid.sigma_BR
    omega_BN = guid.omega_BR_B + guid.omega_RN_B
    if gains.integral_enabled:
        lim = gains.integral_limit
        z_new = np.clip(np.asarray(z, dtype=float) + gains.K * sigma * dt, -lim, lim)
        rate_term = guid.omega_BR_B + gains.Ki * z_new
    else:
        z_new = np.zeros(3)
        rate_term = guid.omega_BR_B
    u = -gains.K * sigma - gains.P * rate_term + np.cross(omega_BN, I_sc @ omega_BN)
    return CmdTorqueMsg(u), z_new


# modules


class SimpleNav(SysModel):
    """Truth pass-through navigation (noise off)."""

    def __init__(self, tag: str = "SimpleNavigation"):
        super().__init__(tag)
        self.sc_state_in_msg = InputPort(SCStatesMsg)
        self.trans_out_msg = Message(NavTransMsg)
        self.att_out_msg = Message(NavAttMsg)

    def reset(self, current_nanos):
        _require(self.sc_state_in_msg, self.ModelTag, "sc_state_in_msg")

    def update(self, current_nanos):
        trans, att = simple_nav_update(self.sc_state_in_msg.read(), current_nanos)
        self.trans_out_msg.write(trans, current_nanos)
        self.att_out_msg.write(att, current_nanos)


class HillPoint(SysModel):
    def __init__(self, tag: str = "hillPoint"):
        super().__init__(tag)
        self.trans_nav_in_msg = InputPort(NavTransMsg)
        self.cel_body_in_msg = InputPort(EphemerisRecord)
        self.att_ref_out_msg = Message(AttRefMsg)

    def reset(self, current_nanos):
        _require(self.trans_nav_in_msg, self.ModelTag, "trans_nav_in_msg")

    def update(self, current_nanos):
        planet = self.cel_body_in_msg.read() if self.cel_body_in_msg.is_linked else None
        self.att_ref_out_msg.write(
            hill_point_reference(self.trans_nav_in_msg.read(), planet), current_nanos)


class InertialPoint(SysModel):
    def __init__(self, tag: str = "inertialPoint"):
        super().__init__(tag)
        self.sigma_R0N = np.zeros(3)
        self.att_ref_out_msg = Message(AttRefMsg)

    def update(self, current_nanos):
        self.att_ref_out_msg.write(inertial_point_reference(self.sigma_R0N), current_nanos)


class AttTrackingError(SysModel):
    def __init__(self, tag: str = "attTrackingError"):
        super().__init__(tag)
        self.att_nav_in_msg = InputPort(NavAttMsg)
        self.att_ref_in_msg = InputPort(AttRefMsg)
        self.att_guid_out_msg = Message(AttGuidMsg)

    def reset(self, current_nanos):
        _require(self.att_nav_in_msg, self.ModelTag, "att_nav_in_msg")
        _require(self.att_ref_in_msg, self.ModelTag, "att_ref_in_msg")

    def update(self, current_nanos):
        self.att_guid_out_msg.write(
            attitude_tracking_error(self.att_nav_in_msg.read(), self.att_ref_in_msg.read()),
            current_nanos)


class MrpFeedback(SysModel):
    def __init__(self, gains: Optional[ControlGains] = None, tag: str = "mrpFeedback"):
        super().__init__(tag)
        self.gains = gains or ControlGains()
        self.I_sc = np.diag([900.0, 800.0, 600.0])
        self.guid_in_msg = InputPort(AttGuidMsg)
        self.cmd_torque_out_msg = Message(CmdTorqueMsg)
        self.z = np.zeros(3)
        self._prior: Optional[int] = None

    def reset(self, current_nanos):
        _require(self.guid_in_msg, self.ModelTag, "guid_in_msg")
        self.reset_integral()

    def reset_integral(self) -> None:
        self.z = np.zeros(3)
        self._prior = None

    def update(self, current_nanos):
        dt = 0.0 if self._prior is None else nano2sec(current_nanos - self._prior)
        cmd, self.z = mrp_feedback_control(self.guid_in_msg.read(), self.gains, self.I_sc,
                                           self.z, dt, time=nano2sec(current_nanos))
        self._prior = current_nanos
        self.cmd_torque_out_msg.write(cmd, current_nanos)


class FswModel:
    """Flight-software process with gateway messages and mode switching.

    All FSW tasks start disabled.  Setting :attr:`mode_request` takes effect at
    the start of the next simulation step through a container event.
    """

    process_name = "FSWProcess"
    tasks = ("inertialPointTask", "hillPointTask", "trackingErrorTask", "mrpFeedbackTask")

    def __init__(self, sim: SimContainer, dynamics, rate: int,
                 gains: Optional[ControlGains] = None, process_priority: Optional[int] = None):
        self.sim = sim
        self.process = sim.create_process(self.process_name, process_priority)
        for name in self.tasks:
            sim.create_task(self.process, name, rate, enabled=False)

        self.inertial_point = InertialPoint()
        self.hill_point = HillPoint()
        self.tracking_error = AttTrackingError()
        self.mrp_feedback = MrpFeedback(gains)
        self.mrp_feedback.I_sc = dynamics.spacecraft.I_sc

        sim.add_model_to_task("inertialPointTask", self.inertial_point, 10)
        sim.add_model_to_task("hillPointTask", self.hill_point, 10)
        sim.add_model_to_task("trackingErrorTask", self.tracking_error, 10)
        sim.add_model_to_task("mrpFeedbackTask", self.mrp_feedback, 10)

        self.setup_gateway_msgs(dynamics)

        self.hill_point.trans_nav_in_msg.subscribe_to(dynamics.simple_nav.trans_out_msg)
        if dynamics.earth_ephem is not None:
            self.hill_point.cel_body_in_msg.subscribe_to(dynamics.earth_ephem.ephem_out_msgs[0])
        self.tracking_error.att_nav_in_msg.subscribe_to(dynamics.simple_nav.att_out_msg)
        self.tracking_error.att_ref_in_msg.subscribe_to(self.attitude_ref_msg)
        self.mrp_feedback.guid_in_msg.subscribe_to(self.attitude_guid_msg)

        self.mode_msg = Message(FswModeMsg)
        self.mode_request: str = FswMode.STANDBY.value
        self.active_mode: Optional[FswMode] = None
        sim.create_event("fswModeRequest",
                         lambda: self.active_mode is None
                         or FswMode.parse(self.mode_request) is not self.active_mode,
                         self._apply_requested)
        sim.on_initialize.append(self._on_initialize)

    def setup_gateway_msgs(self, dynamics) -> None:
        self.cmd_torque_msg = Gateway(CmdTorqueMsg)
        self.attitude_ref_msg = Gateway(AttRefMsg)
        self.attitude_guid_msg = Gateway(AttGuidMsg)
        self.zero_gateway_msgs()
        dynamics.ext_force_torque.cmd_torque_in_msg.subscribe_to(self.cmd_torque_msg)

    def zero_gateway_msgs(self) -> None:
        for gw in (self.cmd_torque_msg, self.attitude_ref_msg, self.attitude_guid_msg):
            gw.retarget(None)

    def set_mode(self, mode_request) -> None:
        self.mode_request = FswMode.parse(mode_request).value

    def _on_initialize(self) -> None:
        self.active_mode = None
        self._enter(FswMode.STANDBY, 0)

    def _apply_requested(self) -> None:
        self._enter(FswMode.parse(self.mode_request), self.sim.clock)

    def _enter(self, mode: FswMode, time: int) -> None:
        for name in self.tasks:
            self.sim.disable_task(name)
        self.mrp_feedback.reset_integral()
        if mode is FswMode.STANDBY:
            self.zero_gateway_msgs()
        else:
            if mode is FswMode.HILL_POINT:
                guidance, source = "hillPointTask", self.hill_point
            else:
                guidance, source = "inertialPointTask", self.inertial_point
            for name in (guidance, "trackingErrorTask", "mrpFeedbackTask"):
                self.sim.enable_task(name)
            self.attitude_ref_msg.retarget(source.att_ref_out_msg)
            self.attitude_guid_msg.retarget(self.tracking_error.att_guid_out_msg)
            self.cmd_torque_msg.retarget(self.mrp_feedback.cmd_torque_out_msg)
        self.active_mode = mode
        self.mode_msg.write(FswModeMsg(mode.value), time)


def set_mode(scenario, mode_request) -> None:
    """Request a flight mode on a scenario (or an :class:`FswModel`)."""
    fsw = getattr(scenario, "fsw_model", scenario)
    if fsw is None:
        raise ValueError("scenario has no flight-software model")
    fsw.set_mode(mode_request)
