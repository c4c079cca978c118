"""Reference computations kept independent of the code paths they check."""
import numpy as np
from scipy.spatial.transform import Rotation

from wbretarget.kinematics import SystemState, forward_kinematics


def perturbed(state, nu, h):
    """Configuration reached by moving along the world-frame velocity ``nu`` for ``h`` seconds, unclamped."""
    dR = Rotation.from_rotvec(h * nu[3:6]).as_matrix()
    return SystemState(state.base_position + h * nu[0:3], dR @ state.base_orientation, state.s + h * nu[6:])


def fd_jacobians(model, state, link, h=1e-6):
    """Central finite-difference angular and linear Jacobians of ``link``."""
    nv = model.nv
    Ja = np.zeros((3, nv))
    Jl = np.zeros((3, nv))
    for c in range(nv):
        e = np.zeros(nv)
        e[c] = 1.0
        plus = forward_kinematics(model, perturbed(state, e, h))[link]
        minus = forward_kinematics(model, perturbed(state, e, -h))[link]
        Ja[:, c] = Rotation.from_matrix(plus.rotation @ minus.rotation.T).as_rotvec() / (2 * h)
        Jl[:, c] = (plus.position - minus.position) / (2 * h)
    return Ja, Jl


def fd_all_links(model, state, h=1e-6):
    """Finite-difference Jacobians of every link at once, ``{link: (Ja, Jl)}``."""
    nv = model.nv
    names = list(model.link_names)
    Ja = np.zeros((len(names), 3, nv))
    Jl = np.zeros((len(names), 3, nv))
    for c in range(nv):
        e = np.zeros(nv)
        e[c] = 1.0
        plus = forward_kinematics(model, perturbed(state, e, h))
        minus = forward_kinematics(model, perturbed(state, e, -h))
        dR = np.stack([plus[n].rotation @ minus[n].rotation.T for n in names])
        Ja[:, :, c] = Rotation.from_matrix(dR).as_rotvec() / (2 * h)
        Jl[:, :, c] = np.stack([plus[n].position - minus[n].position for n in names]) / (2 * h)
    return {n: (Ja[i], Jl[i]) for i, n in enumerate(names)}


def projected_gradient(H, f, lb, ub, iters=1_000_000, x0=None):
    """Projected gradient with step 1/L on ``0.5 x'Hx + f'x`` over the box ``[lb, ub]``.

    Stops early once the projected step stalls at the level of double-precision rounding.
    """
    L = np.linalg.eigvalsh(H).max()
    x = np.clip(np.zeros_like(f) if x0 is None else x0, lb, ub)
    for _ in range(iters):
        nxt = np.clip(x - (H @ x + f) / L, lb, ub)
        if np.max(np.abs(nxt - x), initial=0.0) <= 1e-15 * (1.0 + np.max(np.abs(x), initial=0.0)):
            x = nxt
            break
        x = nxt
    return x


def sk_vee(M):
    """vee of the antisymmetric part, written out entry by entry."""
    A = (M - M.T) / 2.0
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def random_box_qp(rng, dim, rows, cond=50.0):
    """SPD Hessian with bounded condition number and bound-type rows with ``g >= 0``."""
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eig = np.exp(rng.uniform(0.0, np.log(cond), dim))
    H = (Q * eig) @ Q.T
    H = 0.5 * (H + H.T)
    f = rng.standard_normal(dim) * 3.0
    G = np.zeros((rows, dim))
    var = rng.integers(0, dim, rows)
    sign = rng.choice([-1.0, 1.0], rows)
    G[np.arange(rows), var] = sign * rng.uniform(0.5, 2.0, rows)
    g = rng.uniform(0.0, 1.0, rows)
    return H, f, G, g


def box_from_rows(G, g):
    dim = G.shape[1]
    lb, ub = np.full(dim, -np.inf), np.full(dim, np.inf)
    for row, b in zip(G, g):
        j = int(np.flatnonzero(row)[0])
        if row[j] > 0:
            ub[j] = min(ub[j], b / row[j])
        else:
            lb[j] = max(lb[j], b / row[j])
    return lb, ub
