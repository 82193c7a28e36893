"""Physical consistency check for spacecraft inertia matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

AXES = ("x", "y", "z")


class InertiaError(ValueError):
    pass


@dataclass
class InertiaCheck:
    valid: bool
    principal: np.ndarray
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.valid

    @property
    def message(self) -> str:
        if self.valid:
            return "inertia ok"
        return ("inertia triangle rule violated (I_i + I_j >= I_k required): "
                + "; ".join(self.violations))


def check_inertia(I_sc, tol: float = 1e-9) -> InertiaCheck:
    """Triangle-rule check on the principal moments.

    A diagonal matrix is checked as given so violations name the body axes;
    otherwise the eigenvalues are used and reported as principal axes 1..3.
    """
    I = np.asarray(I_sc, dtype=float).reshape(3, 3)
    scale = max(float(np.max(np.abs(I))), 1.0)
    if not np.allclose(I, I.T, rtol=0.0, atol=tol * scale):
        raise InertiaError("inertia matrix is not symmetric")
    if np.count_nonzero(I - np.diag(np.diag(I))) == 0:
        moments = np.diag(I).copy()
        names = [f"I_{a}{a}" for a in AXES]
    else:
        moments = np.linalg.eigvalsh(I)
        names = ["I_1", "I_2", "I_3"]

    violations = []
    for k in range(3):
        if moments[k] <= 0.0:
            violations.append(f"{names[k]} = {moments[k]:g} is not positive")
    for k in range(3):
        i, j = [m for m in range(3) if m != k]
        if moments[i] + moments[j] < moments[k] - tol * scale:
            violations.append(
                f"{names[i]} + {names[j]} < {names[k]} "
                f"({moments[i]:g} + {moments[j]:g} < {moments[k]:g})")
    return InertiaCheck(not violations, moments, violations)
