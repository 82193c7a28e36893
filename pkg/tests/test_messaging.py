from dataclasses import dataclass, field

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitforge.kernel import SimContainer, SysModel, sec2nano
from orbitforge.messaging import (CmdTorqueMsg, Gateway, InputPort, Message, MessageLinkError,
                                  SCStatesMsg, sampling_time)


@dataclass
class Counter:
    value: float = 0.0
    vec: np.ndarray = field(default_factory=lambda: np.zeros(2))


class Producer(SysModel):
    def __init__(self):
        super().__init__("producer")
        self.out = Message(Counter)
        self.n = 0

    def update(self, t):
        self.n += 1
        self.out.write(Counter(float(self.n), np.array([self.n, -self.n], float)), t)


def test_unlinked_and_unwritten_read_zero():
    port = InputPort(CmdTorqueMsg)
    assert not port.is_linked
    assert np.array_equal(port.read().torque_B, np.zeros(3))
    msg = Message(CmdTorqueMsg)
    port.subscribe_to(msg)
    assert port.is_linked and not port.is_written
    assert np.array_equal(port.read().torque_B, np.zeros(3))
    msg.write(CmdTorqueMsg(np.array([1.0, 2.0, 3.0])), 7)
    assert port.read().torque_B.tolist() == [1.0, 2.0, 3.0]
    assert msg.write_time == 7 and msg.write_count == 1


def test_subscribe_kind_mismatch():
    port = InputPort(CmdTorqueMsg)
    with pytest.raises(MessageLinkError):
        port.subscribe_to(Message(SCStatesMsg))


def test_gateway_retarget_and_zero():
    gw = Gateway(CmdTorqueMsg)
    a, b = Message(CmdTorqueMsg), Message(CmdTorqueMsg)
    a.write(CmdTorqueMsg(np.ones(3)), 1)
    b.write(CmdTorqueMsg(2 * np.ones(3)), 2)
    port = InputPort(CmdTorqueMsg)
    port.subscribe_to(gw)
    gw.retarget(a)
    assert port.read().torque_B.tolist() == [1.0] * 3
    gw.retarget(b)
    assert port.read().torque_B.tolist() == [2.0] * 3
    gw.retarget(None)
    assert port.read().torque_B.tolist() == [0.0] * 3


def test_sampling_time_values():
    assert sampling_time(sec2nano(1000.0), sec2nano(1.0), 101) == sec2nano(10.0)
    # requested spacing finer than the step collapses to one ns
    assert sampling_time(sec2nano(1.0), sec2nano(1.0), 100) == 1
    with pytest.raises(ValueError):
        sampling_time(sec2nano(1.0), sec2nano(1.0), 1)


@given(st.integers(1, 2000), st.integers(1, 50), st.integers(2, 300))
def test_sampling_time_formula(t_steps, dt_ms, n):
    dt = dt_ms * 1_000_000
    T = t_steps * dt
    expect = max((T // (dt * (n - 1))) * dt, 1)
    assert sampling_time(T, dt, n) == expect


def _run_recorder(sampling, stop_s=100.0, dt_s=1.0):
    sim = SimContainer()
    sim.create_process("p")
    sim.create_task("p", "t", sec2nano(dt_s))
    prod = Producer()
    rec = prod.out.recorder(sampling)
    sim.add_model_to_task("t", rec)
    sim.add_model_to_task("t", prod)
    sim.initialize_simulation()
    sim.configure_stop_time(sec2nano(stop_s))
    sim.execute_simulation()
    return rec


def test_recorder_runs_after_producer_and_stacks_fields():
    rec = _run_recorder(0, stop_s=4.0)
    assert len(rec) == 5
    assert rec.value.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    assert rec.vec.shape == (5, 2)
    assert rec.times().dtype == np.int64
    with pytest.raises(AttributeError):
        rec.missing_field


@given(st.integers(2, 120))
def test_recorder_count_law(n):
    stop, dt = sec2nano(100.0), sec2nano(1.0)
    s = sampling_time(stop, dt, n)
    rec = _run_recorder(s)
    # a 1 ns clamp degenerates to one sample per step
    assert len(rec) == stop // max(s, dt) + 1
    if s > 1:
        assert len(rec) >= n
    if stop % ((n - 1) * dt) == 0:
        assert len(rec) == n


def test_recorder_sample_times_are_spaced():
    rec = _run_recorder(sec2nano(20.0))
    assert rec.times().tolist() == [sec2nano(t) for t in (0, 20, 40, 60, 80, 100)]
