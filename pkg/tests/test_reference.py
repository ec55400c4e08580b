"""Tests for the RK4 method-of-steps oracle and brute-force identity checks."""

import math

import numpy as np
import pytest

from lagdde import basis as basis_mod
from lagdde.collocation import (
    DDEProblem,
    DelayTerm,
    History,
    NonlinearDelayTerm,
    single_equation,
)
from lagdde.reference import (
    Trajectory,
    brute_force_poly_identity,
    delay_product_mismatch,
    identity_suite,
    rk4_method_of_steps,
)


def _coupled_problem(b):
    history = History(functions=(lambda t: 1.0, lambda t: 1.0), end=0.0)
    return DDEProblem(
        gamma=[0.0, 0.0],
        delays=[[DelayTerm(0, 1.0, 2.0)],
                [DelayTerm(0, 1.0, 2.0), DelayTerm(1, 1.0, 0.5)]],
        g=[lambda t: 0.0, lambda t: 0.0],
        phi=[1.0, 1.0], b=b, history=history)


def _piecewise_u1(t):
    value = 1.0 + t
    if t > 2.0:
        value += (t - 2.0) ** 2 / 2.0
    if t > 4.0:
        value += (t - 4.0) ** 3 / 6.0
    return value


# ---------------------------------------------------------------------------
# integrator

def test_constant_history_linear_growth():
    history = History(functions=(lambda t: 1.0,), end=0.0)
    problem = DDEProblem(gamma=[0.0], delays=[[DelayTerm(0, 1.0, 2.0)]],
                         g=[lambda t: 0.0], phi=[1.0], b=2.0, history=history)
    trajectory = rk4_method_of_steps(problem, step=1e-2)
    for t in np.linspace(0.0, 2.0, 41):
        assert trajectory(t)[0] == pytest.approx(1.0 + t, abs=1e-10)


def test_zero_right_hand_side_stays_constant():
    problem = single_equation(0.0, 0.0, 1.0, lambda t: 0.0, 0.7, 2.0)
    trajectory = rk4_method_of_steps(problem, step=1e-2)
    for t in np.linspace(0.0, 2.0, 21):
        assert trajectory(t)[0] == pytest.approx(0.7, abs=1e-13)


def test_delayed_feedback_trajectory_bounded():
    history = History(functions=(math.sin,), end=0.5)
    problem = DDEProblem(
        gamma=[0.4], delays=[[]], g=[lambda t: 0.0], phi=[0.0], b=5.0,
        history=history,
        nonlinear=[NonlinearDelayTerm(f=lambda u: math.exp(-u), target=0, tau=0.5)])
    trajectory = rk4_method_of_steps(problem, step=1e-3)
    assert np.all(np.isfinite(trajectory.u))
    assert np.abs(trajectory.u).max() < 10.0


def test_rk4_order_on_smooth_reduction():
    gamma = 0.7

    def max_error(step):
        problem = single_equation(gamma, 0.0, 1.0, lambda t: 0.0, 1.0, 2.0)
        trajectory = rk4_method_of_steps(problem, step=step)
        return max(abs(trajectory(t)[0] - math.exp(-gamma * t))
                   for t in np.linspace(0.0, 2.0, 41))

    ratio = max_error(0.1) / max_error(0.05)
    assert 12.0 <= ratio <= 20.0


def test_breaking_point_piecewise_polynomial():
    trajectory = rk4_method_of_steps(_coupled_problem(4.0), step=1e-3)
    for t in np.linspace(0.0, 4.0, 81):
        assert trajectory(t)[0] == pytest.approx(_piecewise_u1(t), abs=1e-9)


def test_step_aligns_with_delay_gcd():
    # delays 2 and 0.5 share the rational grid 0.5; every breaking point
    # must land exactly on the trajectory grid
    trajectory = rk4_method_of_steps(_coupled_problem(5.0), step=0.3)
    for point in (0.5, 2.0, 2.5, 4.0):
        assert np.any(np.isclose(trajectory.t, point, rtol=0, atol=1e-12))


def test_grid_queries_return_stored_values():
    problem = single_equation(0.5, 0.0, 1.0, math.sin, 1.0, 1.0)
    trajectory = rk4_method_of_steps(problem, step=0.1)
    for k in range(len(trajectory.t)):
        np.testing.assert_array_equal(trajectory(trajectory.t[k]),
                                      trajectory.u[k])


def test_trajectory_query_outside_range():
    problem = single_equation(0.5, 0.0, 1.0, math.sin, 1.0, 1.0)
    trajectory = rk4_method_of_steps(problem, step=0.1)
    with pytest.raises(ValueError):
        trajectory(1.5)
    with pytest.raises(ValueError):
        trajectory(-0.2)


def test_rk4_rejects_non_positive_step():
    problem = single_equation(0.5, 0.0, 1.0, math.sin, 1.0, 1.0)
    with pytest.raises(ValueError):
        rk4_method_of_steps(problem, step=0.0)


def test_trajectory_csv_export(tmp_path):
    trajectory = rk4_method_of_steps(_coupled_problem(2.0), step=0.5)
    path = tmp_path / "trajectory.csv"
    trajectory.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,u_1,u_2"
    assert len(lines) == len(trajectory.t) + 1


def test_interpolation_accuracy_between_grid_points():
    gamma = 0.8
    problem = single_equation(gamma, 0.0, 1.0, lambda t: 0.0, 1.0, 2.0)
    trajectory = rk4_method_of_steps(problem, step=0.05)
    for t in (0.013, 0.777, 1.919):
        assert trajectory(t)[0] == pytest.approx(math.exp(-gamma * t), abs=1e-7)


# ---------------------------------------------------------------------------
# identity checks

def test_brute_force_change_of_basis_identity():
    n = 5
    H = basis_mod.laguerre_change_matrix(n)
    check = brute_force_poly_identity(
        lambda t: np.array([basis_mod.laguerre_eval_sum(k, t) for k in range(n + 1)]),
        lambda t: basis_mod.monomial_row(n, t) @ H)
    assert check.passed
    assert check.max_deviation < 1e-10


def test_brute_force_delay_identity():
    n, tau = 5, 2.0
    T = basis_mod.delay_shift_matrix(n, tau)
    check = brute_force_poly_identity(
        lambda t: np.power(t - tau, np.arange(n + 1)),
        lambda t: basis_mod.monomial_row(n, t) @ T)
    assert check.passed


def test_brute_force_detects_wrong_rule():
    n = 3
    H = basis_mod.laguerre_change_matrix(n)
    B = basis_mod.monomial_diff_matrix(n)
    check = brute_force_poly_identity(
        lambda t: np.array([basis_mod.laguerre_eval_sum(k, t) for k in range(n + 1)]),
        lambda t: basis_mod.monomial_row(n, t) @ B @ H)
    assert not check.passed


def test_brute_force_rejects_zero_trials():
    with pytest.raises(ValueError):
        brute_force_poly_identity(lambda t: np.zeros(2), lambda t: np.zeros(2),
                                  trials=0)


def test_identity_suite_all_pass():
    results = identity_suite()
    assert len(results) > 0
    for name, check in results:
        assert check.passed, f"{name} deviated by {check.max_deviation:.3e}"


def test_delay_product_with_extra_diff_factor_differs():
    # the factored delay product with the spurious differentiation factor
    # is measurably wrong; the solver must not be "fixed" back to it
    assert delay_product_mismatch(n_max=3, tau=1.0, t=1.0) > 1e-3
