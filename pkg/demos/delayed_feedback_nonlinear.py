"""Delayed feedback with an exponential nonlinearity.

Solves u'(t) = -0.4 u(t) + exp(-u(t - 0.5)) on [0, 5] with u(t) = sin(t)
prescribed on [0, 0.5], by successive substitution on the Laguerre
collocation system, and compares the result with an RK4 method-of-steps
integration at several truncations.
"""

import math

import numpy as np

from lagdde import (
    DDEProblem,
    History,
    NonlinearDelayTerm,
    evaluate,
    rk4_method_of_steps,
    solve_nonlinear,
)


def make_problem():
    history = History(functions=(math.sin,), end=0.5)
    return DDEProblem(
        gamma=[0.4],
        delays=[[]],
        g=[lambda t: 0.0],
        phi=[0.0],
        b=5.0,
        history=history,
        nonlinear=[NonlinearDelayTerm(f=lambda u: math.exp(-u),
                                      target=0, tau=0.5)],
    )


def main():
    problem = make_problem()
    trajectory = rk4_method_of_steps(problem, step=1e-3)

    points = np.linspace(0.5, 5.0, 10)
    print("successive-substitution collocation vs RK4 method of steps")
    print(f"{'N':>3} {'iterations':>10} {'max |diff|':>12} {'condition':>11}")
    solutions = {}
    for n in (6, 8, 10):
        solution = solve_nonlinear(problem, n, tol=1e-8, max_iter=50)
        solutions[n] = solution
        diff = max(abs(evaluate(solution, t)[0] - trajectory(t)[0])
                   for t in np.linspace(0.5, 3.0, 26))
        print(f"{n:>3} {solution.iterations:>10} {diff:>12.3e} "
              f"{solution.condition:>11.2e}")

    print("\nsampled values")
    print(f"{'t':>5} {'rk4':>10} " + " ".join(f"{'N=' + str(n):>10}"
                                              for n in (6, 8, 10)))
    for t in points:
        row = [f"{t:>5.2f}", f"{trajectory(t)[0]:>10.6f}"]
        row += [f"{evaluate(solutions[n], t)[0]:>10.6f}" for n in (6, 8, 10)]
        print(" ".join(row))


if __name__ == "__main__":
    main()
