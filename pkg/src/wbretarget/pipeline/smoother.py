"""Minimum-jerk reference smoothing.

After every goal change a quintic is fitted from the current value,
velocity and acceleration to the goal with zero final velocity and
acceleration over the smoothing time ``T``. From rest this is the classic
``x0 + (goal - x0) * (10 tau^3 - 15 tau^4 + 6 tau^5)`` profile, and the
output stays continuous in value and velocity when the goal moves mid-way.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SmootherState:
    value: np.ndarray
    T: float
    velocity: np.ndarray = None
    acceleration: np.ndarray = None
    goal: np.ndarray = None
    elapsed: float = 0.0
    _coef: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"smoothing time must be positive, got {self.T}")
        self.value = np.atleast_1d(np.asarray(self.value, dtype=float)).copy()
        if self.velocity is None:
            self.velocity = np.zeros_like(self.value)
        if self.acceleration is None:
            self.acceleration = np.zeros_like(self.value)
        if self.goal is None:
            self.goal = self.value.copy()
        self._coef = _quintic(self.value, self.velocity, self.acceleration, self.goal, self.T)


def _quintic(x0, v0, a0, xf, T):
    """Coefficients c0..c5 (rows) of x(t) = sum c_k t^k with zero end velocity and acceleration."""
    d = xf - x0
    c3 = (10.0 * d - 6.0 * v0 * T - 1.5 * a0 * T ** 2) / T ** 3
    c4 = (-15.0 * d + 8.0 * v0 * T + 1.5 * a0 * T ** 2) / T ** 4
    c5 = (6.0 * d - 3.0 * v0 * T - 0.5 * a0 * T ** 2) / T ** 5
    return np.stack([x0, v0, 0.5 * a0, c3, c4, c5])


def min_jerk_filter(state: SmootherState, goal, dt: float) -> np.ndarray:
    """Advance ``state`` by ``dt`` toward ``goal`` and return the smoothed value."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    goal = np.atleast_1d(np.asarray(goal, dtype=float))
    if not np.array_equal(goal, state.goal):
        state.goal = goal.copy()
        state.elapsed = 0.0
        state._coef = _quintic(state.value, state.velocity, state.acceleration, goal, state.T)
    state.elapsed += dt
    t = min(state.elapsed, state.T)
    c = state._coef
    if state.elapsed >= state.T:
        state.value = state.goal.copy()
        state.velocity = np.zeros_like(state.value)
        state.acceleration = np.zeros_like(state.value)
    else:
        state.value = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))))
        state.velocity = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])))
        state.acceleration = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]))
    return state.value.copy()
