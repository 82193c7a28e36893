"""Point-mass gravity with an optional J2 zonal term and third-body effects."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np


@dataclass
class GravityBody:
    name: str
    mu: float
    req: float
    j2: float = 0.0
    is_central: bool = False
    use_j2: bool = False

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"gravity body '{self.name}' needs mu > 0")


def central_body(bodies: Sequence[GravityBody]) -> GravityBody:
    central = [b for b in bodies if b.is_central]
    if len(central) != 1:
        raise ValueError(f"exactly one central body required, found {len(central)}")
    return central[0]


def point_mass_accel(mu: float, r_N: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(r_N)
    if r == 0.0:
        raise ValueError("gravity evaluated at zero radius")
    return -mu / r**3 * r_N


def j2_accel(mu: float, req: float, j2: float, r_N: np.ndarray) -> np.ndarray:
    """First zonal harmonic perturbation in the body-fixed (polar z) frame."""
    x, y, z = r_N
    r = np.linalg.norm(r_N)
    if r == 0.0:
        raise ValueError("gravity evaluated at zero radius")
    coef = 1.5 * j2 * mu * req**2 / r**4
    zr2 = (z / r) ** 2
    return -coef * np.array([
        (1.0 - 5.0 * zr2) * x / r,
        (1.0 - 5.0 * zr2) * y / r,
        (3.0 - 5.0 * zr2) * z / r,
    ])


def j2_potential(mu: float, req: float, j2: float, r_N: np.ndarray) -> float:
    """Gravitational potential energy per unit mass including J2 (U, with a = -grad U)."""
    r = np.linalg.norm(r_N)
    zr2 = (r_N[2] / r) ** 2
    return -mu / r * (1.0 - 0.5 * j2 * (req / r) ** 2 * (3.0 * zr2 - 1.0))


def gravity_accel(bodies: Sequence[GravityBody], r_N,
                  body_positions: Optional[Mapping[str, np.ndarray]] = None) -> np.ndarray:
    """Total gravitational acceleration on a spacecraft.

    ``r_N`` is relative to the central body.  Non-central bodies need their
    positions (relative to the central body) in ``body_positions`` and add the
    usual direct-minus-indirect third-body term.
    """
    r_N = np.asarray(r_N, dtype=float)
    central = central_body(bodies)
    acc = point_mass_accel(central.mu, r_N)
    if central.use_j2:
        acc = acc + j2_accel(central.mu, central.req, central.j2, r_N)
    for body in bodies:
        if body.is_central:
            continue
        if body_positions is None or body.name not in body_positions:
            raise ValueError(f"no ephemeris position for third body '{body.name}'")
        r_b = np.asarray(body_positions[body.name], dtype=float)
        d = r_b - r_N
        acc = acc + body.mu * (d / np.linalg.norm(d) ** 3 - r_b / np.linalg.norm(r_b) ** 3)
    return acc
