"""LP solver checks against scipy.optimize.linprog as an independent oracle."""

import numpy as np
import pytest
from scipy.optimize import linprog

from truthfit import simplex
from truthfit.simplex import solve_lp


def scipy_solve(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, bounds=None):
    n = len(c)
    if bounds is None:
        bounds = [(None, None)] * n
    return linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                   bounds=bounds, method="highs")


def test_basic_inequality_problem():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0
    res = solve_lp([-1.0, -1.0], a_ub=[[1, 2], [3, 1]], b_ub=[4, 6],
                   bounds=[(0, None), (0, None)])
    assert res.ok
    assert res.objective == pytest.approx(-(8 / 5 + 6 / 5))


def test_equality_and_free_variables():
    # min |structure|: free x with x + y = 3, y <= 1
    res = solve_lp([1.0, 0.0], a_ub=[[0, 1]], b_ub=[1], a_eq=[[1, 1]], b_eq=[3])
    assert res.ok
    assert res.objective == pytest.approx(2.0)
    assert res.x[1] == pytest.approx(1.0)


def test_infeasible_detected():
    res = solve_lp([1.0], a_ub=[[1.0], [-1.0]], b_ub=[1.0, -3.0])
    assert res.status == simplex.INFEASIBLE


def test_unbounded_detected():
    res = solve_lp([-1.0], a_ub=[[-1.0]], b_ub=[0.0], bounds=[(0, None)])
    assert res.status == simplex.UNBOUNDED


def test_two_sided_bounds():
    res = solve_lp([-1.0, 1.0], bounds=[(-2, 5), (1, 4)])
    assert res.ok
    assert res.x[0] == pytest.approx(5.0)
    assert res.x[1] == pytest.approx(1.0)


def test_degenerate_problem_terminates():
    # Classic cycling-prone instance (Beale); Bland's rule must terminate.
    c = [-0.75, 150, -0.02, 6]
    a_ub = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    b_ub = [0, 0, 1]
    res = solve_lp(c, a_ub=a_ub, b_ub=b_ub,
                   bounds=[(0, None)] * 4)
    assert res.ok
    assert res.objective == pytest.approx(-0.05)


@pytest.mark.parametrize("trial", range(60))
def test_random_problems_match_scipy(trial):
    rng = np.random.default_rng(1000 + trial)
    n = rng.integers(2, 7)
    m_ub = rng.integers(0, 5)
    m_eq = rng.integers(0, min(n, 3))
    c = rng.normal(size=n)
    a_ub = rng.normal(size=(m_ub, n)) if m_ub else None
    b_ub = rng.normal(size=m_ub) + 1.0 if m_ub else None
    a_eq = rng.normal(size=(m_eq, n)) if m_eq else None
    b_eq = rng.normal(size=m_eq) if m_eq else None
    bounds = []
    for _ in range(n):
        kind = rng.integers(0, 4)
        if kind == 0:
            bounds.append((None, None))
        elif kind == 1:
            bounds.append((float(rng.normal()) - 3.0, None))
        elif kind == 2:
            bounds.append((None, float(rng.normal()) + 3.0))
        else:
            lo = float(rng.normal()) - 3.0
            bounds.append((lo, lo + float(rng.uniform(0.5, 4.0))))

    ours = solve_lp(c, a_ub, b_ub, a_eq, b_eq, bounds)
    ref = scipy_solve(c, a_ub, b_ub, a_eq, b_eq, bounds)

    if ref.status == 2:
        assert ours.status == simplex.INFEASIBLE
    elif ref.status == 3:
        assert ours.status == simplex.UNBOUNDED
    else:
        assert ours.ok
        assert ours.objective == pytest.approx(ref.fun, abs=1e-7)
        # solution feasibility in the original space
        if a_ub is not None:
            assert np.all(np.asarray(a_ub) @ ours.x <= np.asarray(b_ub) + 1e-7)
        if a_eq is not None:
            assert np.allclose(np.asarray(a_eq) @ ours.x, b_eq, atol=1e-7)
