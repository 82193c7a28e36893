"""Typed single-writer messages, input ports, gateways and recorders.

Payloads are plain dataclasses treated as immutable values: writers build a
fresh payload each update and readers never mutate what they receive.  The
zero value of a payload kind is whatever its no-argument constructor returns.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Generic, Optional, TypeVar

import numpy as np

from .kernel import SimulationError, SysModel

P = TypeVar("P")


def _zeros3():
    return np.zeros(3)


class MessageLinkError(SimulationError):
    pass


class Message(Generic[P]):
    """Single-writer payload slot with write metadata."""

    def __init__(self, payload_type: type[P]):
        self.payload_type = payload_type
        self._payload: P = payload_type()
        self._write_time = 0
        self._write_count = 0

    def write(self, payload: P, time: int = 0) -> None:
        if not isinstance(payload, self.payload_type):
            raise MessageLinkError(
                f"cannot write {type(payload).__name__} into {self.payload_type.__name__} message")
        self._payload = payload
        self._write_time = int(time)
        self._write_count += 1

    def read(self) -> P:
        return self._payload

    @property
    def payload(self) -> P:
        return self.read()

    @property
    def write_time(self) -> int:
        return self._write_time

    @property
    def write_count(self) -> int:
        return self._write_count

    @property
    def is_written(self) -> bool:
        return self.write_count > 0

    def recorder(self, sampling: int = 0, tag: Optional[str] = None) -> "Recorder[P]":
        return Recorder(self, sampling, tag)


class Gateway(Message[P]):
    """Retargetable forwarding slot.

    With a source set, reads and metadata come from the source; with no
    source the gateway holds a zero payload.
    """

    def __init__(self, payload_type: type[P]):
        super().__init__(payload_type)
        self.source: Optional[Message[P]] = None

    def retarget(self, source: Optional[Message[P]]) -> None:
        if source is not None and source.payload_type is not self.payload_type:
            raise MessageLinkError(
                f"gateway of {self.payload_type.__name__} cannot forward "
                f"{source.payload_type.__name__}")
        self.source = source
        if source is None:
            self._payload = self.payload_type()
            self._write_count = 0
            self._write_time = 0

    def read(self) -> P:
        return self.source.read() if self.source is not None else self._payload

    @property
    def write_time(self) -> int:
        return self.source.write_time if self.source is not None else self._write_time

    @property
    def write_count(self) -> int:
        return self.source.write_count if self.source is not None else self._write_count


def gateway_retarget(gateway: Gateway, source: Optional[Message]) -> None:
    gateway.retarget(source)


class InputPort(Generic[P]):
    """Reader side of a message link."""

    def __init__(self, payload_type: type[P]):
        self.payload_type = payload_type
        self.target: Optional[Message[P]] = None

    def subscribe_to(self, msg: Message[P]) -> None:
        if msg.payload_type is not self.payload_type:
            raise MessageLinkError(
                f"cannot subscribe {self.payload_type.__name__} input to "
                f"{msg.payload_type.__name__} message")
        self.target = msg

    def read(self) -> P:
        if self.target is None or not self.target.is_written:
            return self.payload_type()
        return self.target.read()

    @property
    def is_linked(self) -> bool:
        return self.target is not None

    @property
    def is_written(self) -> bool:
        return self.target is not None and self.target.is_written


def subscribe(port: InputPort, msg: Message) -> None:
    port.subscribe_to(msg)


def sampling_time(t_final: int, dt_sim: int, num_points: int) -> int:
    """Sampling period giving roughly ``num_points`` samples, floored to a
    multiple of the simulation step and never below 1 ns."""
    if num_points < 2:
        raise ValueError(f"need at least 2 data points, got {num_points}")
    if dt_sim < 1:
        raise ValueError("simulation step must be at least 1 ns")
    return max((t_final // (dt_sim * (num_points - 1))) * dt_sim, 1)


class Recorder(SysModel, Generic[P]):
    """Sampled history of a message, run as the last module of its task."""

    observer = True

    def __init__(self, msg: Message[P], sampling: int = 0, tag: Optional[str] = None):
        super().__init__(tag or f"{msg.payload_type.__name__}Recorder")
        if sampling < 0:
            raise ValueError("sampling period must be non-negative")
        self.msg = msg
        self.sampling = int(sampling)
        self._times: list[int] = []
        self._samples: list[P] = []

    def reset(self, current_nanos):
        self._times.clear()
        self._samples.clear()

    def update(self, current_nanos):
        self.record(current_nanos, self.msg.read())

    def record(self, time: int, payload: P) -> None:
        if self._times and time < self._times[-1] + max(self.sampling, 1):
            return
        self._times.append(int(time))
        self._samples.append(payload)

    def times(self) -> np.ndarray:
        return np.array(self._times, dtype=np.int64)

    @property
    def samples(self) -> list[P]:
        return list(self._samples)

    def __len__(self):
        return len(self._times)

    def __getattr__(self, name):
        # field access stacks one payload attribute across samples
        if name.startswith("_") or name in ("msg",):
            raise AttributeError(name)
        names = {f.name for f in fields(self.msg.payload_type)}
        if name not in names:
            raise AttributeError(name)
        return np.array([getattr(s, name) for s in self._samples])


# payload kinds shared across the dynamics and flight-software stacks


@dataclass
class SCStatesMsg:
    r_BN_N: np.ndarray = field(default_factory=_zeros3)
    v_BN_N: np.ndarray = field(default_factory=_zeros3)
    sigma_BN: np.ndarray = field(default_factory=_zeros3)
    omega_BN_B: np.ndarray = field(default_factory=_zeros3)


@dataclass
class EphemerisRecord:
    body: str = ""
    r_N: np.ndarray = field(default_factory=_zeros3)
    v_N: np.ndarray = field(default_factory=_zeros3)
    epoch_offset: int = 0


@dataclass
class NavTransMsg:
    r_BN_N: np.ndarray = field(default_factory=_zeros3)
    v_BN_N: np.ndarray = field(default_factory=_zeros3)
    time: int = 0


@dataclass
class NavAttMsg:
    sigma_BN: np.ndarray = field(default_factory=_zeros3)
    omega_BN_B: np.ndarray = field(default_factory=_zeros3)


@dataclass
class AttRefMsg:
    sigma_RN: np.ndarray = field(default_factory=_zeros3)
    omega_RN_N: np.ndarray = field(default_factory=_zeros3)
    domega_RN_N: np.ndarray = field(default_factory=_zeros3)


@dataclass
class AttGuidMsg:
    sigma_BR: np.ndarray = field(default_factory=_zeros3)
    omega_BR_B: np.ndarray = field(default_factory=_zeros3)
    omega_RN_B: np.ndarray = field(default_factory=_zeros3)
    domega_RN_B: np.ndarray = field(default_factory=_zeros3)


@dataclass
class CmdTorqueMsg:
    torque_B: np.ndarray = field(default_factory=_zeros3)


@dataclass
class FswModeMsg:
    mode: str = ""
