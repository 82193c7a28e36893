"""Classical orbital elements and their conversion to/from inertial states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# below these the node line / periapsis direction is undefined
DEGENERATE_E = 1e-12
DEGENERATE_I = 1e-12


@dataclass
class ClassicElements:
    a: float = 0.0
    e: float = 0.0
    i: float = 0.0
    Omega: float = 0.0
    omega: float = 0.0
    f: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.e, self.i, self.Omega, self.omega, self.f])


def wrap_2pi(angle: float) -> float:
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round back up to exactly 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def mean_motion_period(mu: float, a: float) -> tuple[float, float]:
    """Return mean motion (rad/s) and orbital period (s)."""
    if mu <= 0 or a <= 0:
        raise ValueError(f"mu and a must be positive (mu={mu}, a={a})")
    n = math.sqrt(mu / a**3)
    return n, TWO_PI / n


def _perifocal_to_inertial(Omega: float, i: float, omega: float) -> np.ndarray:
    cO, sO = math.cos(Omega), math.sin(Omega)
    ci, si = math.cos(i), math.sin(i)
    cw, sw = math.cos(omega), math.sin(omega)
    return np.array([
        [cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si],
        [sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si],
        [sw * si, cw * si, ci],
    ])


def elem2rv(mu: float, oe: ClassicElements) -> tuple[np.ndarray, np.ndarray]:
    """Inertial position and velocity for an elliptic orbit."""
    if not 0.0 <= oe.e < 1.0:
        raise ValueError(f"only elliptic orbits are supported (e={oe.e})")
    if oe.a <= 0:
        raise ValueError(f"semi-major axis must be positive (a={oe.a})")
    p = oe.a * (1.0 - oe.e * oe.e)
    cf, sf = math.cos(oe.f), math.sin(oe.f)
    r = p / (1.0 + oe.e * cf)
    vs = math.sqrt(mu / p)
    r_pf = np.array([r * cf, r * sf, 0.0])
    v_pf = np.array([-vs * sf, vs * (oe.e + cf), 0.0])
    rot = _perifocal_to_inertial(oe.Omega, oe.i, oe.omega)
    return rot @ r_pf, rot @ v_pf


def rv2elem(mu: float, r_N, v_N) -> ClassicElements:
    """Osculating elements from an inertial state.

    Degenerate cases: circular orbits get omega = 0 and equatorial orbits get
    Omega = 0; the true anomaly then carries the remaining angle.
    """
    r_vec = np.asarray(r_N, dtype=float)
    v_vec = np.asarray(v_N, dtype=float)
    r = float(np.linalg.norm(r_vec))
    v2 = float(v_vec @ v_vec)
    h_vec = np.cross(r_vec, v_vec)
    h = float(np.linalg.norm(h_vec))
    if r == 0.0 or h <= 1e-10 * r * math.sqrt(v2 if v2 > 0 else 1.0):
        raise ValueError("rectilinear or zero state: orbital plane is undefined")

    energy = 0.5 * v2 - mu / r
    if energy >= 0.0:
        raise ValueError("state is not on an elliptic orbit")
    a = -mu / (2.0 * energy)
    e_vec = ((v2 - mu / r) * r_vec - float(r_vec @ v_vec) * v_vec) / mu
    e = float(np.linalg.norm(e_vec))

    h_hat = h_vec / h
    inc = math.atan2(math.hypot(h_hat[0], h_hat[1]), h_hat[2])

    if math.sin(inc) < DEGENERATE_I:
        Omega = 0.0
        node = np.array([1.0, 0.0, 0.0])
    else:
        Omega = math.atan2(h_hat[0], -h_hat[1])
        node = np.array([math.cos(Omega), math.sin(Omega), 0.0])
    in_plane = np.cross(h_hat, node)

    u = math.atan2(float(r_vec @ in_plane), float(r_vec @ node))
    if e < DEGENERATE_E:
        omega = 0.0
        f = u
    else:
        omega = math.atan2(float(e_vec @ in_plane), float(e_vec @ node))
        f = u - omega

    return ClassicElements(a=a, e=e, i=inc, Omega=wrap_2pi(Omega),
                           omega=wrap_2pi(omega), f=wrap_2pi(f))
