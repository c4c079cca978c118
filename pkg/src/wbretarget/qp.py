"""Dense primal active-set QP for bound-type inequality rows.

Solves ``min 0.5 x'Hx + f'x  s.t.  G x <= g`` where every row of ``G`` has a
single nonzero entry, so the feasible set is a box. Joint position and
velocity limits produce exactly that structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class QPError(RuntimeError):
    pass


class NotPD(QPError):
    pass


class Infeasible(QPError):
    pass


class UnsupportedConstraint(ValueError):
    pass


@dataclass
class ConstraintSet:
    G: np.ndarray
    g: np.ndarray
    labels: list = field(default_factory=list)

    @classmethod
    def empty(cls, dim: int) -> "ConstraintSet":
        return cls(np.zeros((0, dim)), np.zeros(0), [])

    @property
    def m(self) -> int:
        return self.G.shape[0]


@dataclass
class KKTResiduals:
    stationarity: float
    primal: float
    dual: float
    complementarity: float

    def max(self) -> float:
        return max(self.stationarity, self.primal, self.dual, self.complementarity)


@dataclass
class QPResult:
    x: np.ndarray
    multipliers: np.ndarray
    active_rows: list
    iterations: int
    status: str
    kkt: KKTResiduals


@dataclass
class BoxRows:
    """Rows of ``G x <= g`` folded into per-variable bounds."""
    lb: np.ndarray
    ub: np.ndarray
    lb_row: np.ndarray
    ub_row: np.ndarray
    coef: np.ndarray   # the nonzero coefficient of every row
    var: np.ndarray    # the variable index of every row (-1 for an all-zero row)


def box_rows(C: ConstraintSet, dim: int) -> BoxRows:
    G = np.asarray(C.G, dtype=float).reshape(-1, dim)
    g = np.asarray(C.g, dtype=float)
    m = G.shape[0]
    lb = np.full(dim, -np.inf)
    ub = np.full(dim, np.inf)
    lb_row = np.full(dim, -1)
    ub_row = np.full(dim, -1)
    coef = np.zeros(m)
    var = np.full(m, -1)
    for i in range(m):
        nz = np.flatnonzero(G[i])
        if len(nz) == 0:
            if g[i] < 0:
                raise Infeasible(f"row {i} reads 0 <= {g[i]!r}")
            continue
        if len(nz) > 1:
            raise UnsupportedConstraint(f"row {i} has {len(nz)} nonzeros; only bound rows are supported")
        j = nz[0]
        c = G[i, j]
        coef[i], var[i] = c, j
        b = g[i] / c
        if c > 0:
            if b < ub[j]:
                ub[j], ub_row[j] = b, i
        elif b > lb[j]:
            lb[j], lb_row[j] = b, i
    bad = np.flatnonzero(lb > ub)
    if len(bad):
        raise Infeasible(f"empty bound interval for variables {bad.tolist()}")
    return BoxRows(lb, ub, lb_row, ub_row, coef, var)


def kkt_residuals(H, f, C: ConstraintSet, x, mu) -> KKTResiduals:
    G = np.asarray(C.G, dtype=float)
    slack = np.asarray(C.g, dtype=float) - G @ x if G.shape[0] else np.zeros(0)
    stat = H @ x + f + (G.T @ mu if G.shape[0] else 0.0)
    return KKTResiduals(
        stationarity=float(np.max(np.abs(stat))) if np.size(stat) else 0.0,
        primal=float(max(0.0, -slack.min())) if slack.size else 0.0,
        dual=float(max(0.0, -mu.min())) if mu.size else 0.0,
        complementarity=float(np.max(np.abs(mu * slack))) if mu.size else 0.0,
    )


class ActiveSetQP:
    """Primal active-set solver with warm starts across calls.

    One instance per stream: it keeps the previous solution and working set
    and seeds the next solve with them.
    """

    def __init__(self, tolerance: float = 1e-9, max_iter: int = 200):
        self.tolerance = tolerance
        self.max_iter = max_iter
        self._x = None
        self._side = None   # per variable: 0 free, 1 at upper bound, -1 at lower bound

    def reset(self):
        self._x = None
        self._side = None

    def solve(self, H, f, C: ConstraintSet) -> QPResult:
        H = np.asarray(H, dtype=float)
        f = np.asarray(f, dtype=float)
        dim = f.shape[0]
        box = box_rows(C, dim)
        lb, ub = box.lb, box.ub

        if self._x is not None and self._x.shape == (dim,):
            x = np.clip(self._x, lb, ub)
            side = self._side.copy()
            side[(side == 1) & ~np.isfinite(ub)] = 0
            side[(side == -1) & ~np.isfinite(lb)] = 0
        else:
            x = np.clip(np.zeros(dim), lb, ub)
            side = np.zeros(dim, dtype=int)
        x[side == 1] = ub[side == 1]
        x[side == -1] = lb[side == -1]

        status = "max_iterations"
        it = 0
        for it in range(1, self.max_iter + 1):
            free = side == 0
            fixed = ~free
            if free.any():
                rhs = -(f[free] + H[np.ix_(free, fixed)] @ x[fixed])
                try:
                    cf = scipy.linalg.cho_factor(H[np.ix_(free, free)], check_finite=False)
                except np.linalg.LinAlgError:
                    raise NotPD("Hessian restricted to the free variables is not positive definite") from None
                target = scipy.linalg.cho_solve(cf, rhs, check_finite=False)
                if not np.all(np.isfinite(target)):
                    raise NotPD("non-finite solution of the reduced system")
                xf = x[free]
                p = target - xf
                lbf, ubf = lb[free], ub[free]
                alpha, block, block_side = 1.0, -1, 0
                with np.errstate(divide="ignore", invalid="ignore"):
                    up = np.where(p > 0, (ubf - xf) / p, np.inf)
                    down = np.where(p < 0, (lbf - xf) / p, np.inf)
                ku, kd = int(np.argmin(up)), int(np.argmin(down))
                if up[ku] < alpha:
                    alpha, block, block_side = up[ku], ku, 1
                if down[kd] < alpha:
                    alpha, block, block_side = down[kd], kd, -1
                xf = np.clip(xf + max(alpha, 0.0) * p, lbf, ubf)
                x[free] = xf
                if block >= 0:
                    j = np.flatnonzero(free)[block]
                    side[j] = block_side
                    x[j] = ub[j] if block_side == 1 else lb[j]
                    continue
            grad = H @ x + f
            # bound multipliers: upper -> -grad, lower -> +grad; both must be >= 0
            lam = np.where(side == 1, -grad, np.where(side == -1, grad, np.inf))
            k = int(np.argmin(lam))
            if lam[k] >= -self.tolerance:
                status = "optimal"
                break
            side[k] = 0

        self._x = x.copy()
        self._side = side.copy()
        grad = H @ x + f
        mu = np.zeros(C.G.shape[0])
        for j in np.flatnonzero(side):
            row = box.ub_row[j] if side[j] == 1 else box.lb_row[j]
            mu[row] = -grad[j] / box.coef[row]
        active = sorted(int(box.ub_row[j] if side[j] == 1 else box.lb_row[j]) for j in np.flatnonzero(side))
        return QPResult(x, mu, active, it, status, kkt_residuals(H, f, C, x, mu))


def qp_solve(H, f, C: ConstraintSet = None, tolerance: float = 1e-9, max_iter: int = 200) -> QPResult:
    """Cold-start solve of ``min 0.5 x'Hx + f'x  s.t.  G x <= g``."""
    f = np.asarray(f, dtype=float)
    if C is None:
        C = ConstraintSet.empty(f.shape[0])
    return ActiveSetQP(tolerance, max_iter).solve(H, f, C)
