"""Convergence study on a manufactured smooth solution.

Chooses u(t) = exp(-t) on [0, 5], derives the forcing for
u' = -0.5 u + 0.3 u(t - 1) + g, and tabulates the error norms of the
collocation solution for increasing truncation.
"""

import math

from lagdde import convergence_study, single_equation
from lagdde.collocation import History


def main():
    gamma, beta, tau = 0.5, 0.3, 1.0

    def g(t):
        return (-math.exp(-t) + gamma * math.exp(-t)
                - beta * math.exp(-(t - tau)))

    history = History(functions=(lambda t: math.exp(-t),), end=0.0)
    problem = single_equation(gamma, beta, tau, g, 1.0, 5.0, history=history)

    rows = convergence_study(problem, [4, 6, 8, 10, 12],
                             lambda t: math.exp(-t))
    print("manufactured solution u(t) = exp(-t) on [0, 5]")
    print(f"{'N':>3} {'L2':>11} {'Linf':>11} {'RMS':>11} "
          f"{'cpu [s]':>8} {'condition':>11}")
    for row in rows:
        if row.error is not None:
            print(f"{row.n_max:>3} failed: {row.error}")
            continue
        print(f"{row.n_max:>3} {row.l2[0]:>11.3e} {row.linf[0]:>11.3e} "
              f"{row.rms[0]:>11.3e} {row.cpu_time:>8.3f} {row.condition:>11.2e}")


if __name__ == "__main__":
    main()
