"""Dynamical inverse kinematics on link orientations.

Each tracked link ``i`` contributes an orientation error ``E_i`` and an
angular-velocity error ``V_i = w*_i - J_i nu``. The velocity ``nu`` is the
least-squares solution of ``V + K E = 0`` with Tikhonov regularisation and
joint-limit rows, i.e. the QP

    min_nu  sum_i w_i |w*_i + K_i E_i - J_i nu|^2 + lambda^2 |nu|^2
    s.t.    G(s) nu <= g(s)

and integrating ``nu`` realises the stable error dynamics ``dE/dt = -K E``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kinematics import SystemState, SystemVelocity, compute_frames, integrate
from .liegroup import geodesic_angle
from .model import KinematicModel, UnknownLink
from .qp import ActiveSetQP, ConstraintSet, QPResult
from .retarget import TargetSet


@dataclass
class IKParams:
    gain: float = 10.0
    link_gains: dict = field(default_factory=dict)
    lam: float = 1e-3
    base_lam: Optional[float] = None
    dt: float = 0.005
    qp_tolerance: float = 1e-9
    max_qp_iters: int = 200
    fixed_base: bool = False

    def __post_init__(self):
        gains = [self.gain, *self.link_gains.values()]
        if not all(math.isfinite(k) and k > 0 for k in gains):
            raise ValueError(f"gains must be positive, got {gains}")
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.qp_tolerance > 0):
            raise ValueError("qp_tolerance must be positive")
        if self.lam < 0 or (self.base_lam is not None and self.base_lam < 0):
            raise ValueError("regularisation weights must be non-negative")

    def gain_for(self, link: str) -> float:
        return self.link_gains.get(link, self.gain)


@dataclass
class IKProblem:
    links: list
    E: np.ndarray        # (3k,) stacked orientation errors
    V_ref: np.ndarray    # (3k,) stacked target angular velocities
    J: np.ndarray        # (3k, 6 + n) stacked angular Jacobians
    weights: np.ndarray  # (k,)
    gains: np.ndarray    # (k,)
    constraints: ConstraintSet
    params: IKParams
    link_errors: dict    # geodesic angle per link, rad

    def free_columns(self) -> slice:
        return slice(6, None) if self.params.fixed_base else slice(0, None)

    def qp_terms(self):
        """Hessian and linear term of the QP over the free velocity columns."""
        cols = self.free_columns()
        sw = np.repeat(np.sqrt(self.weights), 3)
        Jw = sw[:, None] * self.J[:, cols]
        b = sw * (self.V_ref + np.repeat(self.gains, 3) * self.E)
        dim = Jw.shape[1]
        reg = np.full(dim, self.params.lam ** 2)
        if self.params.base_lam is not None and not self.params.fixed_base:
            reg[:6] = self.params.base_lam ** 2
        H = Jw.T @ Jw
        H[np.diag_indices(dim)] += reg
        return H, -(Jw.T @ b)

    def qp_constraints(self) -> ConstraintSet:
        C = self.constraints
        if not self.params.fixed_base:
            return C
        return ConstraintSet(C.G[:, 6:], C.g, C.labels)


@dataclass
class StepReport:
    link_errors: dict
    active: list
    qp: QPResult
    residuals: dict
    solve_time: float = 0.0


def build_problem(model: KinematicModel, state: SystemState, targets: TargetSet, params: IKParams,
                  frames=None) -> IKProblem:
    if frames is None:
        frames = compute_frames(model, state)
    links = list(targets.targets)
    idx = []
    for name in links:
        if not model.has_link(name):
            raise UnknownLink(name)
        idx.append(model.link_index(name))
    k = len(links)
    E = np.zeros(3 * k)
    V = np.zeros(3 * k)
    weights = np.empty(k)
    gains = np.empty(k)
    errors = {}
    for i, (name, li) in enumerate(zip(links, idx)):
        tgt = targets.targets[name]
        R = frames.R[li]
        M = tgt.orientation @ R.T
        E[3 * i:3 * i + 3] = 0.5 * np.array([M[2, 1] - M[1, 2], M[0, 2] - M[2, 0], M[1, 0] - M[0, 1]])
        V[3 * i:3 * i + 3] = tgt.angular_velocity
        weights[i] = tgt.weight
        gains[i] = params.gain_for(name)
        errors[name] = geodesic_angle(tgt.orientation, R)
    J = frames.stacked_angular_jacobian(idx) if k else np.zeros((0, model.nv))
    return IKProblem(links, E, V, J, weights, gains, build_constraints(model, state, params), params, errors)


def build_constraints(model: KinematicModel, state: SystemState, params: IKParams) -> ConstraintSet:
    """Two rows per joint: velocity limits tightened so one step cannot leave the position range."""
    n = model.n
    s = np.asarray(state.s, dtype=float)
    vmax = model.vel_max
    with np.errstate(invalid="ignore"):
        up = np.minimum(vmax, (model.upper - s) / params.dt)
        down = np.minimum(vmax, (s - model.lower) / params.dt)
    G = np.zeros((2 * n, model.nv))
    rows = np.arange(n)
    G[2 * rows, 6 + rows] = 1.0
    G[2 * rows + 1, 6 + rows] = -1.0
    g = np.empty(2 * n)
    g[0::2] = up
    g[1::2] = down
    labels = [(name, side) for name in model.dof_order for side in ("upper", "lower")]
    return ConstraintSet(G, g, labels)


class IKSolver:
    """Per-stream solver: owns the QP workspace reused (warm-started) across frames."""

    def __init__(self, model: KinematicModel, params: IKParams):
        self.model = model
        self.params = params
        self.qp = ActiveSetQP(params.qp_tolerance, params.max_qp_iters)

    def step(self, state: SystemState, targets: TargetSet):
        t0 = time.perf_counter()
        prob = build_problem(self.model, state, targets, self.params)
        H, f = prob.qp_terms()
        res = self.qp.solve(H, f, prob.qp_constraints())
        nu = np.zeros(self.model.nv)
        nu[prob.free_columns()] = res.x
        new_state = integrate(self.model, state, nu, self.params.dt)
        elapsed = time.perf_counter() - t0

        b = prob.V_ref + np.repeat(prob.gains, 3) * prob.E
        r = b - prob.J @ nu
        residuals = {name: float(np.linalg.norm(r[3 * i:3 * i + 3])) for i, name in enumerate(prob.links)}
        labels = prob.constraints.labels
        active = [labels[i] for i in res.active_rows]
        report = StepReport(prob.link_errors, active, res, residuals, elapsed)
        return SystemVelocity.from_vector(nu), new_state, report


def ik_step(model: KinematicModel, state: SystemState, targets: TargetSet, params: IKParams,
            solver: Optional[IKSolver] = None):
    """One retargeting step; returns ``(velocity, next_state, report)``."""
    if solver is None:
        solver = IKSolver(model, params)
    return solver.step(state, targets)
