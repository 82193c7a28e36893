"""Fixed-step fourth-order Runge-Kutta."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .attitude import mrp_switch


class IntegrationError(ArithmeticError):
    pass


def rk4_step(deriv: Callable[[float, np.ndarray], np.ndarray], state, t: float, dt: float,
             mrp: Optional[slice] = None) -> np.ndarray:
    """Advance ``state`` from ``t`` to ``t + dt``.

    ``mrp`` names the slice of the state holding an MRP; it is shadow-switched
    after the step so that |sigma| <= 1.
    """
    if dt <= 0:
        raise ValueError(f"step size must be positive, got {dt}")
    x = np.asarray(state, dtype=float)

    def f(tk, xk):
        dx = np.asarray(deriv(tk, xk), dtype=float)
        if not np.all(np.isfinite(dx)):
            raise IntegrationError(f"non-finite state derivative at t={tk:.9f} s")
        return dx

    k1 = f(t, x)
    k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = f(t + dt, x + dt * k3)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if mrp is not None:
        out[mrp] = mrp_switch(out[mrp])
    return out
