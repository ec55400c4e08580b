"""Coupled two-equation delay system with constant history.

    u1'(t) = u1(t - 2)
    u2'(t) = u1(t - 2) + u2(t - 0.5),   0 <= t <= 5,  u1 = u2 = 1 for t <= 0.

The first component has a closed piecewise-polynomial solution by the method
of steps (degree k on [2(k-1), 2k]); it is used to judge the collocation
solutions at N = 3 and N = 4 alongside the RK4 integration.
"""

import numpy as np

from lagdde import (
    DDEProblem,
    DelayTerm,
    History,
    evaluate,
    rk4_method_of_steps,
    solve_linear,
)


def make_problem(b=5.0):
    history = History(functions=(lambda t: 1.0, lambda t: 1.0), end=0.0)
    return DDEProblem(
        gamma=[0.0, 0.0],
        delays=[[DelayTerm(0, 1.0, 2.0)],
                [DelayTerm(0, 1.0, 2.0), DelayTerm(1, 1.0, 0.5)]],
        g=[lambda t: 0.0, lambda t: 0.0],
        phi=[1.0, 1.0],
        b=b,
        history=history,
    )


def u1_exact(t):
    value = 1.0 + t
    if t > 2.0:
        value += (t - 2.0) ** 2 / 2.0
    if t > 4.0:
        value += (t - 4.0) ** 3 / 6.0
    return value


def main():
    problem = make_problem()
    trajectory = rk4_method_of_steps(problem, step=1e-3)
    solutions = {n: solve_linear(problem, n) for n in (3, 4)}

    points = np.linspace(0.0, 5.0, 11)
    print("first component: exact piecewise solution vs RK4 vs collocation")
    print(f"{'t':>5} {'exact':>10} {'rk4':>10} {'N=3':>10} {'N=4':>10}")
    for t in points:
        print(f"{t:>5.1f} {u1_exact(t):>10.6f} {trajectory(t)[0]:>10.6f} "
              f"{evaluate(solutions[3], t)[0]:>10.6f} "
              f"{evaluate(solutions[4], t)[0]:>10.6f}")

    print("\nmax |collocation - rk4| over [0, 5]")
    dense = np.linspace(0.0, 5.0, 101)
    for n in (3, 4):
        for eq in (0, 1):
            diff = max(abs(evaluate(solutions[n], t)[eq] - trajectory(t)[eq])
                       for t in dense)
            print(f"  N={n} u_{eq + 1}: {diff:.3e}")

    rk4_err = max(abs(trajectory(t)[0] - u1_exact(t)) for t in dense)
    print(f"\nRK4 error against the exact first component: {rk4_err:.3e}")


if __name__ == "__main__":
    main()
