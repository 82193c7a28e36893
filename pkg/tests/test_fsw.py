import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitforge.astro import MU_EARTH, mrp_relative, mrp_to_dcm
from orbitforge.fsw import (ConfigurationError, ControlGains, FswMode, attitude_tracking_error,
                            hill_frame, hill_point_reference, inertial_point_reference,
                            mrp_feedback_control, set_mode)
from orbitforge.kernel import sec2nano
from orbitforge.messaging import AttGuidMsg, AttRefMsg, InputPort, NavAttMsg, NavTransMsg
from orbitforge.scenario import build_scenario, run_scenario, with_parameter

from conftest import short

I_HUB = np.diag([900.0, 800.0, 600.0])


def guid(sigma=(0, 0, 0), w_br=(0, 0, 0), w_rn=(0, 0, 0), dw_rn=(0, 0, 0)):
    return AttGuidMsg(*(np.array(x, dtype=float) for x in (sigma, w_br, w_rn, dw_rn)))


def test_gains_interpretation():
    g = ControlGains(K=3.5, Ki=-1.0, P=30.0, integral_limit=2.0 / -1.0 * 0.1)
    assert g.integral_limit == pytest.approx(0.2)
    assert not g.integral_enabled
    with pytest.raises(ValueError):
        ControlGains(K=0.0)


def test_control_equilibrium_exact():
    u, z = mrp_feedback_control(guid(), ControlGains(), I_HUB, np.zeros(3), 0.5)
    assert np.array_equal(u.torque_B, np.zeros(3))
    assert np.array_equal(z, np.zeros(3))


def test_control_proportional_term():
    u, _ = mrp_feedback_control(guid(sigma=(0.1, 0, 0)), ControlGains(), I_HUB, np.zeros(3), 0.5)
    np.testing.assert_allclose(u.torque_B, [-0.35, 0.0, 0.0], atol=1e-15)


def test_control_rejects_nonfinite_with_time():
    with pytest.raises(ValueError, match="t=12.5"):
        mrp_feedback_control(guid(sigma=(math.nan, 0, 0)), ControlGains(), I_HUB,
                             np.zeros(3), 0.5, time=12.5)


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3),
       st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
       st.floats(0.01, 10.0), st.floats(0.0, 5.0))
def test_integral_state_clamped(sigma, z0, dt, lim):
    g = ControlGains(K=3.5, Ki=0.5, P=30.0, integral_limit=lim)
    _, z = mrp_feedback_control(guid(sigma=sigma), g, I_HUB, np.array(z0), dt)
    assert np.all(np.abs(z) <= lim)


def test_integral_off_keeps_state_zero():
    _, z = mrp_feedback_control(guid(sigma=(0.3, 0.1, 0)), ControlGains(Ki=-1), I_HUB,
                                np.array([0.1, 0.1, 0.1]), 1.0)
    assert np.array_equal(z, np.zeros(3))


def test_hill_frame_axes():
    C = hill_frame([7e6, 0, 0], [0, 7.5e3, 0])
    np.testing.assert_allclose(C, np.eye(3))
    with pytest.raises(ValueError, match="undefined Hill frame"):
        hill_frame([7e6, 0, 0], [100.0, 0, 0])


def test_hill_reference_circular_rate():
    a = 7e6
    v = math.sqrt(MU_EARTH / a)
    ref = hill_point_reference(NavTransMsg(np.array([0, a, 0.0]), np.array([-v, 0, 0.0]), 0))
    assert np.linalg.norm(ref.omega_RN_N) == pytest.approx(math.sqrt(MU_EARTH / a ** 3), rel=1e-14)
    assert np.array_equal(ref.domega_RN_N, np.zeros(3))
    np.testing.assert_allclose(mrp_to_dcm(ref.sigma_RN) @ [0, 1, 0], [1, 0, 0], atol=1e-15)


def test_inertial_reference_and_tracking_composition():
    ref = inertial_point_reference([0.1, -0.2, 0.05])
    assert np.array_equal(ref.omega_RN_N, np.zeros(3))
    nav = NavAttMsg(np.array([0.3, 0.1, -0.2]), np.array([0.01, 0.02, 0.03]))
    g = attitude_tracking_error(nav, ref)
    np.testing.assert_allclose(g.sigma_BR, mrp_relative(nav.sigma_BN, ref.sigma_RN))
    np.testing.assert_allclose(g.omega_BR_B, nav.omega_BN_B)
    g0 = attitude_tracking_error(nav, inertial_point_reference())
    np.testing.assert_allclose(g0.sigma_BR, nav.sigma_BN)


def test_tracking_error_rotating_reference():
    nav = NavAttMsg(np.array([0.2, -0.1, 0.4]), np.array([0.0, 0.001, -0.002]))
    ref = hill_point_reference(NavTransMsg(np.array([7e6, 1e5, 2e5]), np.array([10.0, 7.5e3, 300.0]), 0))
    g = attitude_tracking_error(nav, ref)
    BN = mrp_to_dcm(nav.sigma_BN)
    np.testing.assert_allclose(g.omega_RN_B, BN @ ref.omega_RN_N)
    np.testing.assert_allclose(mrp_to_dcm(g.sigma_BR),
                               BN @ mrp_to_dcm(ref.sigma_RN).T, atol=1e-12)


def test_mode_parse():
    assert FswMode.parse("hillPoint") is FswMode.HILL_POINT
    with pytest.raises(ValueError, match="valid modes: standby, inertialPoint, hillPoint"):
        FswMode.parse("sunPoint")


def test_standby_commands_zero_torque(attitude_config):
    inst = build_scenario(short(attitude_config, 20.0), "attitudeControl")
    out = run_scenario(inst, mode="standby")
    assert set(out.modes) == {"standby"}
    assert np.array_equal(out["cmd_torque"], np.zeros_like(out["cmd_torque"]))
    sim = inst.sim
    assert not any(sim.tasks[n].enabled for n in inst.fsw_model.tasks)


def test_mode_switch_mid_run_resets_integral(attitude_config):
    cfg = with_ki(short(attitude_config, 30.0))
    inst = build_scenario(cfg, "attitudeControl")
    fsw = inst.fsw_model
    fsw.set_mode("inertialPoint")
    inst.sim.initialize_simulation()
    inst.sim.configure_stop_time(sec2nano(10.0))
    inst.sim.execute_simulation()
    assert np.any(fsw.mrp_feedback.z != 0.0)
    assert fsw.attitude_ref_msg.source is fsw.inertial_point.att_ref_out_msg
    set_mode(inst, "hillPoint")
    inst.sim.single_step_processes()
    assert fsw.active_mode is FswMode.HILL_POINT
    assert fsw.attitude_ref_msg.source is fsw.hill_point.att_ref_out_msg
    assert not inst.sim.tasks["inertialPointTask"].enabled
    # no integral carried across the transition
    assert np.array_equal(fsw.mrp_feedback.z, np.zeros(3))
    inst.sim.configure_stop_time(sec2nano(30.0))
    inst.sim.execute_simulation()
    assert fsw.mode_msg.read().mode == "hillPoint"


def with_ki(cfg):
    return with_parameter(cfg, "control.Ki", 0.01)


def test_zero_gateways_idempotent(attitude_config):
    inst = build_scenario(short(attitude_config, 5.0), "attitudeControl")
    fsw = inst.fsw_model
    fsw.zero_gateway_msgs()
    fsw.zero_gateway_msgs()
    port = inst.dynamics_model.ext_force_torque.cmd_torque_in_msg
    assert np.array_equal(port.read().torque_B, np.zeros(3))


def test_unlinked_tracking_input_fails_at_init(attitude_config):
    inst = build_scenario(short(attitude_config, 5.0), "attitudeControl")
    inst.fsw_model.tracking_error.att_ref_in_msg = InputPort(AttRefMsg)
    with pytest.raises(ConfigurationError, match="att_ref_in_msg"):
        inst.sim.initialize_simulation()
