import numpy as np
import pytest
from scipy.optimize import linprog

from matinv.simplex import INFEASIBLE, OPTIMAL, solve_lp


def test_simple_maximum():
    res = solve_lp([1.0, 1.0], [[1.0, 1.0]], [1.5], [(0, 1), (0, 1)])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(1.5, abs=1e-9)


def test_box_only():
    res = solve_lp([2.0, -3.0], np.zeros((0, 2)), [], [(-1, 1), (-2, 5)])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(2 * 1 - 3 * (-2))
    assert np.allclose(res.x, [1.0, -2.0])


def test_infeasible():
    # x >= 2 is impossible inside [0, 1]
    res = solve_lp([1.0], [[-1.0]], [-2.0], [(0, 1)])
    assert res.status == INFEASIBLE


def test_negative_rhs_feasible():
    # x + y >= 1 within the unit square (needs a phase-1 artificial)
    res = solve_lp([-1.0, -1.0], [[-1.0, -1.0]], [-1.0], [(0, 1), (0, 1)])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(-1.0, abs=1e-9)


def test_degenerate_vertex():
    # several constraints meet at the optimum; Bland still terminates
    a = [[1.0, 0.0], [1.0, 1.0], [1.0, -1.0]]
    b = [1.0, 1.0, 1.0]
    res = solve_lp([1.0, 0.0], a, b, [(0, 2), (-2, 2)])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_zero_objective():
    res = solve_lp([0.0, 0.0], [[1.0, 1.0]], [1.0], [(0, 1), (0, 1)])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(0.0)


@pytest.mark.parametrize("seed", range(25))
def test_random_lps_match_reference_solver(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    m = int(rng.integers(1, 8))
    c = rng.uniform(-2, 2, n)
    a = rng.uniform(-2, 2, (m, n))
    b = rng.uniform(-1, 2, m)
    bounds = [(-1.0, 1.0)] * n
    res = solve_lp(c, a, b, bounds)
    ref = linprog(-c, A_ub=a, b_ub=b, bounds=bounds, method="highs")
    if ref.status == 2:
        assert res.status == INFEASIBLE
    else:
        assert ref.status == 0
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(-ref.fun, abs=1e-7)
        assert np.all(a @ res.x <= b + 1e-8)
        assert np.all(res.x >= -1.0 - 1e-9) and np.all(res.x <= 1.0 + 1e-9)


def test_rejects_infinite_bounds():
    with pytest.raises(ValueError):
        solve_lp([1.0], np.zeros((0, 1)), [], [(0, np.inf)])
