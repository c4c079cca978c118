import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import box_from_rows, projected_gradient, random_box_qp
from wbretarget.qp import (ActiveSetQP, ConstraintSet, Infeasible, NotPD, UnsupportedConstraint, kkt_residuals,
                           qp_solve)


def test_unconstrained_identity():
    res = qp_solve(np.eye(2), np.array([-1.0, -1.0]))
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-12)
    assert res.status == "optimal" and res.active_rows == []


def test_single_bound_active():
    C = ConstraintSet(np.array([[1.0, 0.0]]), np.array([0.5]))
    res = qp_solve(np.eye(2), np.array([-1.0, -1.0]), C)
    np.testing.assert_allclose(res.x, [0.5, 1.0], atol=1e-12)
    assert res.active_rows == [0]
    np.testing.assert_allclose(res.multipliers, [0.5], atol=1e-12)
    assert res.kkt.max() <= 1e-9


def test_lower_bound_with_negative_coefficient():
    # -2 x0 <= 1  is  x0 >= -0.5
    C = ConstraintSet(np.array([[-2.0, 0.0]]), np.array([1.0]))
    res = qp_solve(np.eye(2), np.array([3.0, 0.0]), C)
    np.testing.assert_allclose(res.x, [-0.5, 0.0], atol=1e-12)
    assert res.kkt.max() <= 1e-9


def test_not_positive_definite():
    with pytest.raises(NotPD):
        qp_solve(np.diag([1.0, -1.0]), np.zeros(2))
    with pytest.raises(NotPD):
        qp_solve(np.zeros((2, 2)), np.ones(2))


def test_infeasible_rows():
    C = ConstraintSet(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([-1.0, -1.0]))
    with pytest.raises(Infeasible):
        qp_solve(np.eye(2), np.zeros(2), C)
    with pytest.raises(Infeasible):
        qp_solve(np.eye(2), np.zeros(2), ConstraintSet(np.zeros((1, 2)), np.array([-1.0])))


def test_general_rows_rejected():
    with pytest.raises(UnsupportedConstraint):
        qp_solve(np.eye(2), np.zeros(2), ConstraintSet(np.array([[1.0, 1.0]]), np.array([1.0])))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 16))
def test_matches_projected_gradient(seed, dim, rows):
    rng = np.random.default_rng(seed)
    H, f, G, g = random_box_qp(rng, dim, rows, cond=20.0)
    res = qp_solve(H, f, ConstraintSet(G, g))
    lb, ub = box_from_rows(G, g)
    ref = projected_gradient(H, f, lb, ub)
    np.testing.assert_allclose(res.x, ref, atol=1e-6)
    assert res.kkt.max() <= 1e-8
    assert np.all(G @ res.x <= g + 1e-12)


def test_warm_start_agrees_with_cold(rng):
    solver = ActiveSetQP()
    H, f, G, g = random_box_qp(rng, 10, 20)
    for _ in range(30):
        f = f + 0.05 * rng.standard_normal(10)
        g = np.clip(g + 0.02 * rng.standard_normal(20), 0.0, None)
        C = ConstraintSet(G, g)
        warm = solver.solve(H, f, C)
        cold = qp_solve(H, f, C)
        np.testing.assert_allclose(warm.x, cold.x, atol=1e-9)
        assert warm.status == "optimal"


def test_warm_start_saves_iterations(rng):
    H, f, G, g = random_box_qp(rng, 12, 24)
    C = ConstraintSet(G, g)
    solver = ActiveSetQP()
    first = solver.solve(H, f, C)
    again = solver.solve(H, f, C)
    assert again.iterations <= first.iterations
    assert again.iterations == 1


def test_kkt_residuals_detect_violation():
    C = ConstraintSet(np.array([[1.0]]), np.array([0.0]))
    r = kkt_residuals(np.eye(1), np.array([-1.0]), C, np.array([1.0]), np.array([-0.5]))
    assert r.primal == pytest.approx(1.0)
    assert r.dual == pytest.approx(0.5)
