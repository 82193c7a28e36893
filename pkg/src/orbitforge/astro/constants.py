"""Pinned physical constants (SI units)."""

import math

MU_EARTH = 3.986004418e14  # m^3/s^2
REQ_EARTH = 6378136.3  # m
J2_EARTH = 1.0826269e-3

MU_SUN = 1.32712440018e20  # m^3/s^2
REQ_SUN = 695700000.0  # m

AU = 1.495978707e11  # m
JULIAN_YEAR = 365.25 * 86400.0  # s, period of the analytic Sun model
OBLIQUITY_J2000 = math.radians(23.4392911)

D2R = math.pi / 180.0
R2D = 180.0 / math.pi
