"""MRP attitude kinematics, rigid-body dynamics and DCM conversions.

DCMs follow the [BN] convention: ``C @ v_N`` gives ``v_B``.
"""

from __future__ import annotations

import numpy as np

EYE3 = np.eye(3)


def tilde(v) -> np.ndarray:
    """Skew-symmetric cross-product matrix."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def mrp_shadow(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    s2 = float(sigma @ sigma)
    if s2 == 0.0:
        return sigma.copy()
    return -sigma / s2


def mrp_switch(sigma, threshold: float = 1.0) -> np.ndarray:
    """Shadow-set switch when |sigma|^2 exceeds ``threshold``."""
    sigma = np.asarray(sigma, dtype=float)
    return mrp_shadow(sigma) if float(sigma @ sigma) > threshold else sigma


def attitude_kinematics(sigma, omega) -> np.ndarray:
    """MRP rate for body rate ``omega`` (body frame)."""
    sigma = np.asarray(sigma, dtype=float)
    omega = np.asarray(omega, dtype=float)
    s2 = float(sigma @ sigma)
    return 0.25 * ((1.0 - s2) * omega + 2.0 * np.cross(sigma, omega)
                   + 2.0 * float(sigma @ omega) * sigma)


def rigid_body_dynamics(I_sc, omega, torque) -> np.ndarray:
    I_sc = np.asarray(I_sc, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return np.linalg.solve(I_sc, -np.cross(omega, I_sc @ omega) + np.asarray(torque, dtype=float))


def mrp_to_dcm(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    s2 = float(sigma @ sigma)
    st = tilde(sigma)
    return EYE3 + (8.0 * st @ st - 4.0 * (1.0 - s2) * st) / (1.0 + s2) ** 2


def dcm_to_quaternion(C) -> np.ndarray:
    """Scalar-first Euler parameters with non-negative scalar part (Sheppard)."""
    C = np.asarray(C, dtype=float)
    tr = np.trace(C)
    b2 = np.array([
        (1.0 + tr) / 4.0,
        (1.0 + 2.0 * C[0, 0] - tr) / 4.0,
        (1.0 + 2.0 * C[1, 1] - tr) / 4.0,
        (1.0 + 2.0 * C[2, 2] - tr) / 4.0,
    ])
    k = int(np.argmax(b2))
    b = np.empty(4)
    b[k] = np.sqrt(b2[k])
    if k == 0:
        b[1] = (C[1, 2] - C[2, 1]) / (4.0 * b[0])
        b[2] = (C[2, 0] - C[0, 2]) / (4.0 * b[0])
        b[3] = (C[0, 1] - C[1, 0]) / (4.0 * b[0])
    elif k == 1:
        b[0] = (C[1, 2] - C[2, 1]) / (4.0 * b[1])
        b[2] = (C[0, 1] + C[1, 0]) / (4.0 * b[1])
        b[3] = (C[2, 0] + C[0, 2]) / (4.0 * b[1])
    elif k == 2:
        b[0] = (C[2, 0] - C[0, 2]) / (4.0 * b[2])
        b[1] = (C[0, 1] + C[1, 0]) / (4.0 * b[2])
        b[3] = (C[1, 2] + C[2, 1]) / (4.0 * b[2])
    else:
        b[0] = (C[0, 1] - C[1, 0]) / (4.0 * b[3])
        b[1] = (C[2, 0] + C[0, 2]) / (4.0 * b[3])
        b[2] = (C[1, 2] + C[2, 1]) / (4.0 * b[3])
    if b[0] < 0.0:
        b = -b
    return b


def dcm_to_mrp(C) -> np.ndarray:
    """Shortest-rotation MRP (|sigma| <= 1) of an orthonormal DCM."""
    C = np.asarray(C, dtype=float)
    if C.shape != (3, 3):
        raise ValueError("DCM must be 3x3")
    if not np.allclose(C @ C.T, EYE3, rtol=0.0, atol=1e-9) or abs(np.linalg.det(C) - 1.0) > 1e-9:
        raise ValueError("matrix is not a proper orthonormal rotation")
    b = dcm_to_quaternion(C)
    return b[1:] / (1.0 + b[0])


def mrp_relative(sigma_BN, sigma_RN) -> np.ndarray:
    """MRP of frame B relative to frame R given both relative to N."""
    s1 = np.asarray(sigma_BN, dtype=float)
    s2 = np.asarray(sigma_RN, dtype=float)
    s1s, s2s = float(s1 @ s1), float(s2 @ s2)
    den = 1.0 + s1s * s2s + 2.0 * float(s1 @ s2)
    if abs(den) < 1e-6:
        s2 = mrp_shadow(s2)
        s2s = float(s2 @ s2)
        den = 1.0 + s1s * s2s + 2.0 * float(s1 @ s2)
    num = (1.0 - s2s) * s1 - (1.0 - s1s) * s2 + 2.0 * np.cross(s1, s2)
    return mrp_switch(num / den)
