"""Independent oracles: an RK4 method-of-steps integrator for retarded DDEs
and brute-force checkers for the row-vector matrix identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import basis as _basis
from .collocation import DDEProblem, History


@dataclass
class Trajectory:
    """Dense output of the RK4 integrator.

    Values between grid points are cubic Hermite interpolants built from the
    stored derivatives; queries at grid points return stored values exactly.
    """

    t: np.ndarray          # strictly increasing grid
    u: np.ndarray          # shape (len(t), l)
    du: np.ndarray         # shape (len(t), l)

    def __call__(self, t: float) -> np.ndarray:
        idx = int(np.searchsorted(self.t, t))
        if idx < len(self.t) and self.t[idx] == t:
            return self.u[idx].copy()
        if t < self.t[0] or t > self.t[-1]:
            raise ValueError(
                f"query t={t} outside computed range [{self.t[0]}, {self.t[-1]}]"
            )
        k = idx - 1
        h = self.t[k + 1] - self.t[k]
        s = (t - self.t[k]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s**2 * (3 - 2 * s)
        h11 = s**2 * (s - 1)
        return (h00 * self.u[k] + h * h10 * self.du[k]
                + h01 * self.u[k + 1] + h * h11 * self.du[k + 1])

    def component(self, eq: int) -> Callable[[float], float]:
        return lambda t: float(self(t)[eq])

    def to_csv(self, path) -> None:
        """Write columns t, u_1 ... u_l."""
        l = self.u.shape[1]
        header = "t," + ",".join(f"u_{i + 1}" for i in range(l))
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for k in range(len(self.t)):
                cells = [f"{self.t[k]:.17g}"] + [f"{v:.17g}" for v in self.u[k]]
                fh.write(",".join(cells) + "\n")


def _float_gcd(values: Sequence[float]) -> float:
    fracs = [Fraction(v).limit_denominator(10**9) for v in values]
    gcd = fracs[0]
    for f in fracs[1:]:
        gcd = Fraction(math.gcd(gcd.numerator, f.numerator),
                       (gcd.denominator * f.denominator)
                       // math.gcd(gcd.denominator, f.denominator))
    return float(gcd)


def _problem_delays(problem: DDEProblem) -> list[float]:
    taus = [term.tau for terms in problem.delays for term in terms if term.tau > 0]
    taus += [term.tau for term in problem.nonlinear if term is not None]
    return taus


def rk4_method_of_steps(problem: DDEProblem, history: Optional[History] = None,
                        step: float = 1e-3) -> Trajectory:
    """Integrate the problem on [0, b] with classical RK4, stepping so that
    every delay breaking point k*tau lands on the grid.

    The step is rounded down to d / ceil(d / step) where d is the (rational)
    GCD of the delays, so delayed lookups always hit history or previously
    computed sub-intervals. Off-grid delayed queries use the trajectory's
    cubic Hermite interpolant.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if history is None:
        history = problem.history
    taus = _problem_delays(problem)
    if taus:
        base = _float_gcd(taus)
        h = base / math.ceil(base / step)
    else:
        h = problem.b / math.ceil(problem.b / step)

    l = problem.n_equations
    n_full = int(math.floor(problem.b / h + 1e-9))
    grid = [k * h for k in range(n_full + 1)]
    if grid[-1] < problem.b - 1e-12:
        grid.append(problem.b)
    grid = np.asarray(grid)

    t_arr = np.empty(len(grid))
    u_arr = np.empty((len(grid), l))
    du_arr = np.empty((len(grid), l))
    front = 0  # number of stored points

    def delayed(eq, tq):
        if history is not None and history.covers(tq):
            return history.value(eq, tq)
        if front == 0 or tq > t_arr[front - 1] + 1e-12:
            raise ValueError(
                f"delayed value at t={tq} not available; history does not "
                "cover it and the trajectory has not reached it"
            )
        view = Trajectory(t_arr[:front], u_arr[:front], du_arr[:front])
        return float(view(min(tq, t_arr[front - 1]))[eq])

    def rhs(t, u):
        out = np.empty(l)
        for eq in range(l):
            value = -problem.gamma[eq] * u[eq] + problem.g[eq](t)
            for term in problem.delays[eq]:
                if term.tau == 0:  # degenerate delay: plain ODE coupling
                    value += term.beta * u[term.target]
                else:
                    value += term.beta * delayed(term.target, t - term.tau)
            nl = problem.nonlinear[eq]
            if nl is not None:
                value += nl.f(delayed(nl.target, t - nl.tau))
            out[eq] = value
        return out

    u = np.asarray(problem.phi, dtype=float)
    t_arr[0] = 0.0
    u_arr[0] = u
    du_arr[0] = rhs(0.0, u)
    front = 1
    for k in range(1, len(grid)):
        t0, t1 = grid[k - 1], grid[k]
        hk = t1 - t0
        k1 = du_arr[k - 1]
        k2 = rhs(t0 + hk / 2, u + hk / 2 * k1)
        k3 = rhs(t0 + hk / 2, u + hk / 2 * k2)
        k4 = rhs(t1, u + hk * k3)
        u = u + hk / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_arr[k] = t1
        u_arr[k] = u
        du_arr[k] = rhs(t1, u)
        front = k + 1
    return Trajectory(t_arr, u_arr, du_arr)


@dataclass(frozen=True)
class IdentityCheck:
    passed: bool
    max_deviation: float


def brute_force_poly_identity(lhs: Callable[[float], np.ndarray],
                              rhs: Callable[[float], np.ndarray],
                              trials: int = 100,
                              t_range: tuple[float, float] = (0.0, 5.0),
                              threshold: float = 1e-9,
                              rng: Optional[np.random.Generator] = None) -> IdentityCheck:
    """Compare two row-vector rules at random points.

    Deviation is measured relative to the larger of 1 and the magnitude of
    the compared values, against ``threshold``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if rng is None:
        rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(trials):
        t = float(rng.uniform(*t_range))
        a = np.asarray(lhs(t), dtype=float)
        b = np.asarray(rhs(t), dtype=float)
        scale = max(1.0, np.abs(a).max(), np.abs(b).max())
        worst = max(worst, float(np.abs(a - b).max() / scale))
    return IdentityCheck(passed=worst < threshold, max_deviation=worst)


def _laguerre_row_direct(n_max, t):
    return np.array([_basis.laguerre_eval_sum(n, t) for n in range(n_max + 1)])


def _laguerre_derivative_direct(n_max, t):
    # termwise derivative of the explicit alternating sum
    out = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        out[n] = sum(
            (-1) ** k / math.factorial(k) * math.comb(n, k) * k * t ** (k - 1)
            for k in range(1, n + 1)
        )
    return out


def identity_suite(n_list: Sequence[int] = range(2, 11), trials: int = 100,
                   taus: Sequence[float] = (0.5, 1.0, 2.0),
                   seed: int = 0) -> list[tuple[str, IdentityCheck]]:
    """Brute-force validation of all row-vector matrix identities.

    Returns (name, check) pairs; every check is expected to pass.
    """
    rng = np.random.default_rng(seed)
    results = []
    for n_max in n_list:
        mats = _basis.build_basis_matrices(n_max, 0.0)
        lag = _basis.PolynomialBasis(_basis.BasisKind.LAGUERRE, n_max)

        results.append((
            f"laguerre_from_monomials[N={n_max}]",
            brute_force_poly_identity(
                lambda t, n=n_max: _laguerre_row_direct(n, t),
                lambda t, n=n_max, H=mats.H: _basis.monomial_row(n, t) @ H,
                trials=trials, rng=rng),
        ))
        results.append((
            f"monomial_derivative[N={n_max}]",
            brute_force_poly_identity(
                lambda t, n=n_max: np.array(
                    [k * t ** (k - 1) if k else 0.0 for k in range(n + 1)]),
                lambda t, n=n_max, B=mats.B: _basis.monomial_row(n, t) @ B,
                trials=trials, rng=rng),
        ))
        results.append((
            f"laguerre_derivative[N={n_max}]",
            brute_force_poly_identity(
                lambda t, n=n_max: _laguerre_derivative_direct(n, t),
                lambda t, b=lag, C=mats.C: _basis.basis_row(b, t) @ C,
                trials=trials, rng=rng),
        ))
        for tau in taus:
            T = _basis.delay_shift_matrix(n_max, tau)
            results.append((
                f"delay_shift[N={n_max},tau={tau}]",
                brute_force_poly_identity(
                    lambda t, n=n_max, d=tau: np.power(t - d, np.arange(n + 1)),
                    lambda t, n=n_max, T=T: _basis.monomial_row(n, t) @ T,
                    trials=trials, rng=rng),
            ))
        bh_hc = float(np.abs(mats.B @ mats.H - mats.H @ mats.C).max())
        results.append((
            f"diff_consistency_BH_eq_HC[N={n_max}]",
            IdentityCheck(passed=bh_hc < 1e-9, max_deviation=bh_hc),
        ))
    return results


def delay_product_mismatch(n_max: int = 3, tau: float = 1.0,
                           t: float = 1.0) -> float:
    """Deviation of the product X(t) T B H from the true delayed row L(t-tau).

    The extra differentiation factor B makes this product inconsistent with
    the change-of-basis identity; the solver uses X(t) T H instead. This
    helper exists so tests can pin down that the literal product is wrong.
    """
    mats = _basis.build_basis_matrices(n_max, tau)
    literal = _basis.monomial_row(n_max, t) @ mats.T @ mats.B @ mats.H
    true_row = np.array(
        [_basis.laguerre_eval(n, t - tau) for n in range(n_max + 1)]
        if t - tau >= 0 else
        [_basis.laguerre_eval_sum(n, t - tau) for n in range(n_max + 1)]
    )
    return float(np.abs(literal - true_row).max())
