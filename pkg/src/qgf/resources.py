"""Planning estimates for shot budgets and Trotter gate counts.

All big-O constants are set to 1, so every number here is an estimate for
relative planning, not a prediction of an absolute cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf


@dataclass(frozen=True)
class ResourceInputs:
    a0_sq: float
    epsilon: float
    sigma_sq: float
    lambda_m: float
    big_l: float = 1.0
    delta_gap: float = 0.0

    def __post_init__(self):
        for name in ("a0_sq", "epsilon", "sigma_sq", "lambda_m", "big_l"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.a0_sq > 1:
            raise ValueError("a0_sq must not exceed 1")
        if self.delta_gap < 0:
            raise ValueError("delta_gap must be non-negative")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma_sq))


def max_evolution_time(r: ResourceInputs) -> float:
    return 2 * r.lambda_m / r.sigma_sq


def _decay_factor(r: ResourceInputs) -> float:
    return np.exp(2 * (r.lambda_m - r.delta_gap) ** 2 / r.sigma_sq) / (r.epsilon * r.a0_sq)


def shots_per_term(r: ResourceInputs, y, delta_y: float):
    """Query samples for the overlap at evolution time ``y * delta_y``."""
    t = np.asarray(y, dtype=float) * delta_y
    return r.sigma / (2 * np.sqrt(np.pi)) * _decay_factor(r) * np.exp(-(t**2) * r.sigma_sq / 4)


def shot_profile(r: ResourceInputs, delta_y: float) -> tuple[np.ndarray, np.ndarray]:
    """``(y, shots)`` over every distinct overlap, ``|y delta_y| <= 2 phi_m``."""
    y_max = int(np.floor(2 * max_evolution_time(r) / delta_y + 1e-9))
    y = np.arange(-y_max, y_max + 1)
    return y, shots_per_term(r, y, delta_y)


def total_shots(r: ResourceInputs, delta_y: float) -> float:
    return float(np.sum(shot_profile(r, delta_y)[1]))


def total_shots_closed_form(r: ResourceInputs, delta_y: float) -> float:
    """Continuum limit of :func:`total_shots`."""
    return float(_decay_factor(r) / delta_y * erf(r.sigma * max_evolution_time(r)))


def trotter_gate_count(r: ResourceInputs, t: float, eps_term: float) -> float:
    if eps_term <= 0:
        raise ValueError("eps_term must be positive")
    return r.big_l**3 * t**2 / eps_term


def gate_count_profile(r: ResourceInputs, t):
    """Gate estimate for ``exp(-iHt)`` when the Trotter error target tightens with the filter weight."""
    t = np.asarray(t, dtype=float)
    return (
        r.big_l**3 * t**2 * r.sigma / (r.epsilon * r.a0_sq)
        * np.exp(2 * r.lambda_m**2 / r.sigma_sq - t**2 * r.sigma_sq / 4)
    )


def worst_case_gate_count(r: ResourceInputs) -> tuple[float, float]:
    """``(t*, count)`` maximizing :func:`gate_count_profile` over ``0 <= t <= 4 lambda_m / sigma^2``."""
    if r.sigma <= 2 * r.lambda_m:
        t_star = 2 / r.sigma
    else:
        t_star = 4 * r.lambda_m / r.sigma_sq
    return t_star, float(gate_count_profile(r, t_star))
