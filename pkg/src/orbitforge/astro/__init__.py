"""Orbital mechanics and attitude dynamics primitives."""

from .attitude import (attitude_kinematics, dcm_to_mrp, mrp_relative, mrp_shadow,
                       mrp_switch, mrp_to_dcm, rigid_body_dynamics, tilde)
from .constants import AU, D2R, J2_EARTH, MU_EARTH, MU_SUN, R2D, REQ_EARTH
from .elements import ClassicElements, elem2rv, mean_motion_period, rv2elem
from .gravity import GravityBody, gravity_accel, j2_accel, j2_potential, point_mass_accel
from .inertia import InertiaCheck, InertiaError, check_inertia
from .integrate import IntegrationError, rk4_step

__all__ = [
    "AU", "D2R", "J2_EARTH", "MU_EARTH", "MU_SUN", "R2D", "REQ_EARTH",
    "ClassicElements", "GravityBody", "InertiaCheck", "InertiaError", "IntegrationError",
    "attitude_kinematics", "check_inertia", "dcm_to_mrp", "elem2rv", "gravity_accel",
    "j2_accel", "j2_potential", "mean_motion_period", "mrp_relative", "mrp_shadow",
    "mrp_switch", "mrp_to_dcm", "point_mass_accel", "rigid_body_dynamics", "rk4_step", "rv2elem", "tilde",
]
