"""Analytic ephemerides: Earth at the origin, the Sun on a circular path.

Stands in for kernel-file ephemerides.  All states are Earth-centered once
recentered with ``zero_base``; the epoch string is kept as metadata only (no
leap-second handling).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Optional, Sequence

import numpy as np

from .astro.constants import (AU, J2_EARTH, JULIAN_YEAR, MU_EARTH, MU_SUN,
                              OBLIQUITY_J2000, REQ_EARTH, REQ_SUN)
from .astro.gravity import GravityBody
from .kernel import SysModel, nano2sec
from .messaging import EphemerisRecord, Message

SUPPORTED_BODIES = ("earth", "sun")

J2000 = datetime(2000, 1, 1, 12, 0, 0)
_EPOCH_RE = re.compile(r"^\s*(\d{4} \w{3} \d{1,2} \d{1,2}:\d{2}:\d{2}(?:\.\d+)?)\s*(?:\(UTC\))?\s*$")


class EphemerisError(ValueError):
    pass


@dataclass(frozen=True)
class EpochSpec:
    utc_string: str
    offset_seconds: float

    @classmethod
    def parse(cls, text: str) -> "EpochSpec":
        """Parse e.g. ``"2000 Jan 1 11:59:28.000 (UTC)"``."""
        m = _EPOCH_RE.match(text)
        if not m:
            raise EphemerisError(f"unrecognized epoch {text!r}; expected 'YYYY Mon D HH:MM:SS.sss (UTC)'")
        stamp = m.group(1)
        fmt = "%Y %b %d %H:%M:%S.%f" if "." in stamp else "%Y %b %d %H:%M:%S"
        try:
            when = datetime.strptime(stamp, fmt)
        except ValueError as exc:
            raise EphemerisError(f"unrecognized epoch {text!r}: {exc}") from None
        return cls(text, (when - J2000).total_seconds())


DEFAULT_EPOCH = EpochSpec.parse("2000 Jan 1 11:59:28.000 (UTC)")


def create_body(name: str) -> GravityBody:
    key = name.lower()
    if key == "earth":
        return GravityBody("earth", MU_EARTH, REQ_EARTH, J2_EARTH, is_central=True)
    if key == "sun":
        return GravityBody("sun", MU_SUN, REQ_SUN, 0.0)
    raise EphemerisError(f"unsupported body {name!r}; supported: {', '.join(SUPPORTED_BODIES)}")


def sun_state(t_seconds: float) -> tuple[np.ndarray, np.ndarray]:
    """Sun position/velocity relative to Earth on a 1 AU circle in the ecliptic.

    The ecliptic is tilted about the x axis by the J2000 obliquity; the Sun is
    on +x at t = 0.
    """
    w = 2.0 * math.pi / JULIAN_YEAR
    th = w * t_seconds
    ce, se = math.cos(OBLIQUITY_J2000), math.sin(OBLIQUITY_J2000)
    c, s = math.cos(th), math.sin(th)
    r = AU * np.array([c, s * ce, s * se])
    v = AU * w * np.array([-s, c * ce, c * se])
    return r, v


def ephemeris_state(body: str, epoch: EpochSpec, t: int) -> EphemerisRecord:
    key = body.lower()
    if key == "earth":
        r, v = np.zeros(3), np.zeros(3)
    elif key == "sun":
        r, v = sun_state(nano2sec(t))
    else:
        raise EphemerisError(f"unsupported body {body!r}; supported: {', '.join(SUPPORTED_BODIES)}")
    return EphemerisRecord(body=key, r_N=r, v_N=v, epoch_offset=int(t))


def zero_base_recenter(records: Sequence[EphemerisRecord], base: str) -> list[EphemerisRecord]:
    base_rec = next((r for r in records if r.body == base.lower()), None)
    if base_rec is None:
        raise EphemerisError(f"zero base {base!r} not among {[r.body for r in records]}")
    r0, v0 = base_rec.r_N, base_rec.v_N
    return [replace(r, r_N=r.r_N - r0, v_N=r.v_N - v0) for r in records]


class PlanetEphemeris(SysModel):
    """Publishes one planet-state message per body, recentered on ``zero_base``."""

    def __init__(self, bodies: Sequence[str], epoch: EpochSpec = DEFAULT_EPOCH,
                 zero_base: Optional[str] = "earth", tag: str = "planetEphemeris"):
        super().__init__(tag)
        for b in bodies:
            create_body(b)
        self.bodies = [b.lower() for b in bodies]
        self.epoch = epoch
        self.zero_base = zero_base
        self.planet_state_out_msgs = [Message(EphemerisRecord) for _ in self.bodies]

    def states(self, t: int) -> list[EphemerisRecord]:
        recs = [ephemeris_state(b, self.epoch, t) for b in self.bodies]
        if self.zero_base:
            recs = zero_base_recenter(recs, self.zero_base)
        return recs

    def update(self, current_nanos):
        for msg, rec in zip(self.planet_state_out_msgs, self.states(current_nanos)):
            msg.write(rec, current_nanos)


class EphemerisConverter(SysModel):
    """Re-publishes planet states as ephemeris messages for guidance modules."""

    def __init__(self, tag: str = "earthEphem"):
        super().__init__(tag)
        self._inputs: list[Message] = []
        self.ephem_out_msgs: list[Message] = []

    def add_input_msg(self, msg: Message) -> None:
        self._inputs.append(msg)
        self.ephem_out_msgs.append(Message(EphemerisRecord))

    def update(self, current_nanos):
        for src, out in zip(self._inputs, self.ephem_out_msgs):
            rec = src.read()
            out.write(replace(rec, epoch_offset=int(current_nanos)), current_nanos)
