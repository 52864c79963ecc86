import numpy as np
import pytest
from scipy.optimize import linprog

from chainedbell.simplex import LPStatus, solve_lp


def test_textbook_problem():
    # max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
    res = solve_lp([-3, -5], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18])
    assert res.status is LPStatus.OPTIMAL
    assert res.fun == pytest.approx(-36)
    np.testing.assert_allclose(res.x, [2, 6], atol=1e-12)


def test_equality_and_negative_rhs():
    # min x + y  s.t. x + 2y = 4, -x + y <= -1
    res = solve_lp([1, 1], A_ub=[[-1, 1]], b_ub=[-1], A_eq=[[1, 2]], b_eq=[4])
    ref = linprog([1, 1], A_ub=[[-1, 1]], b_ub=[-1], A_eq=[[1, 2]], b_eq=[4], method="highs")
    assert res.status is LPStatus.OPTIMAL
    assert res.fun == pytest.approx(ref.fun, abs=1e-12)


def test_infeasible():
    res = solve_lp([1, 0], A_eq=[[1, 1]], b_eq=[1], A_ub=[[1, 1]], b_ub=[0.5])
    assert res.status is LPStatus.INFEASIBLE


def test_unbounded():
    res = solve_lp([-1, 0], A_ub=[[0, 1]], b_ub=[1])
    assert res.status is LPStatus.UNBOUNDED


def test_redundant_equalities():
    A = [[1, 1, 0], [0, 0, 1], [1, 1, 1], [2, 2, 0]]
    b = [1, 1, 2, 2]
    res = solve_lp([-1, -2, 0], A_eq=A, b_eq=b)
    assert res.status is LPStatus.OPTIMAL
    assert res.fun == pytest.approx(-2)


def test_degenerate_cycling_example():
    # Beale's example, which cycles under the textbook largest-coefficient rule
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    b = [0, 0, 1]
    res = solve_lp(c, A_ub=A, b_ub=b)
    assert res.status is LPStatus.OPTIMAL
    assert res.fun == pytest.approx(-0.05, abs=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_random_feasible_lps_match_highs(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(3, 9)
    m_ub = rng.integers(1, 6)
    m_eq = rng.integers(0, 3)
    x0 = rng.uniform(0, 1, n)  # guarantees feasibility
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = A_ub @ x0 + rng.uniform(0, 1, m_ub)
    A_eq = rng.normal(size=(m_eq, n))
    b_eq = A_eq @ x0
    # bounded: add sum(x) <= n
    A_ub = np.vstack([A_ub, np.ones(n)])
    b_ub = np.append(b_ub, n)
    c = rng.normal(size=n)
    ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq if m_eq else None, b_eq=b_eq if m_eq else None, method="highs")
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq if m_eq else None, b_eq=b_eq if m_eq else None)
    assert ref.status == 0
    assert res.status is LPStatus.OPTIMAL
    assert res.fun == pytest.approx(ref.fun, abs=1e-8)
    assert np.all(A_ub @ res.x <= b_ub + 1e-9)
    if m_eq:
        np.testing.assert_allclose(A_eq @ res.x, b_eq, atol=1e-9)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        solve_lp([1, 1], A_ub=[[1, 1]], b_ub=[1, 2])
