"""Rotation-group helpers.

Rotations are plain ``(3, 3)`` float arrays and vectors are ``(3,)`` arrays.
Everything here is pure; nothing caches or mutates its inputs.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.spatial.transform import Rotation as _ScipyRotation

ORTHO_TOL = 1e-9
GIMBAL_TOL = 1e-6


class NotAntisymmetric(ValueError):
    pass


class BadQuaternionNorm(ValueError):
    pass


def skew(v) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y],
                     [z, 0.0, -x],
                     [-y, x, 0.0]])


def vee(A, tol: float = 1e-8) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if np.linalg.norm(A + A.T) > tol:
        raise NotAntisymmetric(f"matrix is not antisymmetric: |A + A^T| = {np.linalg.norm(A + A.T):.3e}")
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def sk(A) -> np.ndarray:
    """Antisymmetric part ``(A - A^T) / 2``."""
    A = np.asarray(A, dtype=float)
    return 0.5 * (A - A.T)


def rot_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def axis_angle(axis, angle: float) -> np.ndarray:
    """Rotation by ``angle`` about the unit vector ``axis``."""
    return exp_so3(np.asarray(axis, dtype=float) * angle)


def exp_so3(w) -> np.ndarray:
    """Rodrigues formula for the exponential of ``skew(w)``."""
    w = np.asarray(w, dtype=float)
    theta2 = float(w @ w)
    W = skew(w)
    if theta2 < 1e-16:
        # second-order Taylor terms; exact to double precision at this size
        return np.eye(3) + W + 0.5 * (W @ W)
    theta = np.sqrt(theta2)
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / theta2
    return np.eye(3) + a * W + b * (W @ W)


def log_so3(R) -> np.ndarray:
    """Rotation vector of ``R`` (angle in ``[0, pi]``)."""
    return _ScipyRotation.from_matrix(np.asarray(R, dtype=float)).as_rotvec()


def normalize_rotation(R) -> np.ndarray:
    """Closest rotation in the Frobenius sense (polar factor)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    Q = U @ Vt
    if np.linalg.det(Q) < 0.0:
        U[:, -1] = -U[:, -1]
        Q = U @ Vt
    return Q


def is_rotation(R, tol: float = ORTHO_TOL) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    return (np.linalg.norm(R.T @ R - np.eye(3)) <= tol
            and abs(np.linalg.det(R) - 1.0) <= tol)


def rotation_error(target, actual) -> np.ndarray:
    """Orientation error ``vee(sk(target @ actual^T))``.

    If ``actual = exp(skew(theta)) @ target`` with small ``theta`` the result
    is close to ``-theta``, so commanding an angular velocity proportional to
    it drives ``actual`` toward ``target``.
    """
    M = np.asarray(target) @ np.asarray(actual).T
    return 0.5 * np.array([M[2, 1] - M[1, 2], M[0, 2] - M[2, 0], M[1, 0] - M[0, 1]])


def geodesic_angle(a, b) -> float:
    c = (np.trace(np.asarray(a).T @ np.asarray(b)) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


class EulerXYZ(NamedTuple):
    roll: float
    pitch: float
    yaw: float
    gimbal_lock: bool = False


def euler_xyz(R) -> EulerXYZ:
    """Intrinsic x-y-z angles, so that ``R = rot_x(roll) @ rot_y(pitch) @ rot_z(yaw)``.

    At gimbal lock the roll is set to zero and the whole residual rotation is
    reported as yaw.
    """
    R = np.asarray(R, dtype=float)
    pitch = float(np.arcsin(np.clip(R[0, 2], -1.0, 1.0)))
    if abs(abs(pitch) - np.pi / 2) < GIMBAL_TOL:
        yaw = float(np.arctan2(R[1, 0], R[1, 1]))
        return EulerXYZ(0.0, pitch, yaw, True)
    roll = float(np.arctan2(-R[1, 2], R[2, 2]))
    yaw = float(np.arctan2(-R[0, 1], R[0, 0]))
    return EulerXYZ(roll, pitch, yaw, False)


def from_euler_xyz(roll: float, pitch: float, yaw: float) -> np.ndarray:
    return rot_x(roll) @ rot_y(pitch) @ rot_z(yaw)


def rpy_matrix(rpy) -> np.ndarray:
    """URDF ``rpy``: fixed-axis roll, pitch, yaw, i.e. ``Rz(y) Ry(p) Rx(r)``."""
    r, p, y = rpy
    return rot_z(y) @ rot_y(p) @ rot_x(r)


def quat_to_matrix(q, tol: float = 1e-6) -> np.ndarray:
    """Unit quaternion ``(w, x, y, z)`` to rotation matrix."""
    q = np.asarray(q, dtype=float)
    if q.shape != (4,) or not np.all(np.isfinite(q)):
        raise BadQuaternionNorm(f"expected 4 finite components, got {q!r}")
    norm = np.linalg.norm(q)
    if abs(norm - 1.0) > tol:
        raise BadQuaternionNorm(f"quaternion norm {norm:.9g} is not 1 within {tol:g}")
    return _ScipyRotation.from_quat(q, scalar_first=True).as_matrix()


def matrix_to_quat(R) -> np.ndarray:
    """Rotation matrix to unit quaternion ``(w, x, y, z)`` with ``w >= 0``."""
    q = _ScipyRotation.from_matrix(np.asarray(R, dtype=float)).as_quat(canonical=True, scalar_first=True)
    return q
