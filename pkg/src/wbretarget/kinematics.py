"""Floating-base forward kinematics and geometric Jacobians.

Velocities are world-frame throughout. The system velocity vector is ordered
``(base linear [3], base angular [3], joint velocities [n])`` and every
Jacobian maps it to world-frame link velocities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liegroup import exp_so3, normalize_rotation, skew
from .model import KinematicModel


class DimensionMismatch(ValueError):
    pass


@dataclass
class SystemState:
    base_position: np.ndarray
    base_orientation: np.ndarray
    s: np.ndarray

    @classmethod
    def neutral(cls, model: KinematicModel, s=None) -> "SystemState":
        """Identity base pose; joints at ``s`` or zero clipped into the limits."""
        if s is None:
            s = np.clip(np.zeros(model.n), model.lower, model.upper)
        return cls(np.zeros(3), np.eye(3), np.array(s, dtype=float))

    def copy(self) -> "SystemState":
        return SystemState(self.base_position.copy(), self.base_orientation.copy(), self.s.copy())


@dataclass
class SystemVelocity:
    base_linear: np.ndarray
    base_angular: np.ndarray
    s_dot: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "SystemVelocity":
        return cls(np.zeros(3), np.zeros(3), np.zeros(n))

    @classmethod
    def from_vector(cls, nu) -> "SystemVelocity":
        nu = np.asarray(nu, dtype=float)
        return cls(nu[0:3].copy(), nu[3:6].copy(), nu[6:].copy())

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.base_linear, self.base_angular, self.s_dot])


@dataclass(frozen=True)
class FramePose:
    rotation: np.ndarray
    position: np.ndarray


def _check_state(model: KinematicModel, state: SystemState):
    if np.shape(state.s) != (model.n,):
        raise DimensionMismatch(f"state has {np.size(state.s)} joint values, model has {model.n} dofs")
    if np.shape(state.base_position) != (3,) or np.shape(state.base_orientation) != (3, 3):
        raise DimensionMismatch("base pose must be a 3-vector and a 3x3 rotation")


class Frames:
    """World poses of every link plus the per-dof data the Jacobians need."""

    def __init__(self, model: KinematicModel, R: np.ndarray, p: np.ndarray,
                 axis_world: np.ndarray, dof_position: np.ndarray):
        self.model = model
        self.R = R
        self.p = p
        self.axis_world = axis_world
        self.dof_position = dof_position

    def rotation(self, link: str) -> np.ndarray:
        return self.R[self.model.link_index(link)]

    def position(self, link: str) -> np.ndarray:
        return self.p[self.model.link_index(link)]

    def pose(self, link: str) -> FramePose:
        i = self.model.link_index(link)
        return FramePose(self.R[i], self.p[i])

    def angular_jacobian(self, link: str) -> np.ndarray:
        i = self.model.link_index(link)
        J = np.zeros((3, self.model.nv))
        J[:, 3:6] = np.eye(3)
        J[:, 6:] = self.axis_world.T * self.model._topo.support[i]
        return J

    def linear_jacobian(self, link: str) -> np.ndarray:
        i = self.model.link_index(link)
        r_base = self.p[i] - self.p[self.model.link_index(self.model.root)]
        J = np.zeros((3, self.model.nv))
        J[:, 0:3] = np.eye(3)
        J[:, 3:6] = -skew(r_base)
        lever = self.p[i] - self.dof_position
        J[:, 6:] = np.cross(self.axis_world, lever).T * self.model._topo.support[i]
        return J

    def stacked_angular_jacobian(self, link_indices) -> np.ndarray:
        """Angular Jacobians of several links stacked row-wise, ``(3k, 6 + n)``."""
        k = len(link_indices)
        J = np.zeros((3 * k, self.model.nv))
        J[:, 3:6] = np.tile(np.eye(3), (k, 1))
        masks = self.model._topo.support[link_indices]          # (k, n)
        J[:, 6:] = (masks[:, None, :] * self.axis_world.T[None, :, :]).reshape(3 * k, -1)
        return J


def compute_frames(model: KinematicModel, state: SystemState) -> Frames:
    _check_state(model, state)
    topo = model._topo
    s = np.asarray(state.s, dtype=float)
    c = np.cos(s)[:, None, None]
    sn = np.sin(s)[:, None, None]
    joint_rot = c * np.eye(3) + sn * topo.dof_axis_skew + (1.0 - c) * topo.dof_axis_outer

    local = topo.origin_R.copy()
    if model.n:
        local[topo.dof_chain_pos] = topo.origin_R[topo.dof_chain_pos] @ joint_rot
    L = len(model.links)
    R = np.empty((L, 3, 3))
    p = np.empty((L, 3))
    root = topo.link_index[model.root]
    R[root] = state.base_orientation
    p[root] = state.base_position
    origin_p = topo.origin_p
    for k, (pi, ci, _, _) in enumerate(topo.chain):
        Rp = R[pi]
        R[ci] = Rp @ local[k]
        p[ci] = p[pi] + Rp @ origin_p[k]
    axis_world = np.einsum("nij,nj->ni", R[topo.dof_parent], topo.dof_axis_parent)
    return Frames(model, R, p, axis_world, p[topo.dof_child])


def forward_kinematics(model: KinematicModel, state: SystemState) -> dict:
    frames = compute_frames(model, state)
    return {link.name: FramePose(frames.R[i].copy(), frames.p[i].copy())
            for i, link in enumerate(model.links)}


def angular_jacobian(model: KinematicModel, state: SystemState, link: str) -> np.ndarray:
    model.link_index(link)
    return compute_frames(model, state).angular_jacobian(link)


def linear_jacobian(model: KinematicModel, state: SystemState, link: str) -> np.ndarray:
    model.link_index(link)
    return compute_frames(model, state).linear_jacobian(link)


def integrate(model: KinematicModel, state: SystemState, nu, dt: float) -> SystemState:
    """Explicit Euler step of the configuration; joints clamped to their limits."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if isinstance(nu, SystemVelocity):
        nu = nu.as_vector()
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (model.nv,):
        raise DimensionMismatch(f"velocity has {nu.size} entries, expected {model.nv}")
    s = np.clip(state.s + nu[6:] * dt, model.lower, model.upper)
    if np.any(nu[3:6]):
        R = normalize_rotation(exp_so3(nu[3:6] * dt) @ state.base_orientation)
    else:
        R = state.base_orientation.copy()
    return SystemState(state.base_position + nu[0:3] * dt, R, s)
