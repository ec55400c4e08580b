"""Residual defect, error norms, and convergence studies over the truncation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .collocation import (
    DDEProblem,
    SpectralSolution,
    evaluate,
    evaluate_derivative,
    solve_linear,
    solve_nonlinear,
)

SAMPLES_PER_UNIT = 10  # 11 points per unit interval, integer t always included


def residual(problem: DDEProblem, solution: SpectralSolution, t: float) -> np.ndarray:
    """Pointwise defect |u_N' + gamma u_N - sum beta u_N(t-tau) - f(...) - g| per equation.

    Delayed values come from the history function where its interval covers
    the delayed argument, matching how the system was assembled.
    """
    u = evaluate(solution, t)
    du = evaluate_derivative(solution, t)

    def delayed(eq, td):
        if problem.history is not None and problem.history.covers(td):
            return problem.history.value(eq, td)
        return float(evaluate(solution, td)[eq])

    out = np.empty(problem.n_equations)
    for eq in range(problem.n_equations):
        value = du[eq] + problem.gamma[eq] * u[eq] - problem.g[eq](t)
        for term in problem.delays[eq]:
            value -= term.beta * delayed(term.target, t - term.tau)
        nl = problem.nonlinear[eq]
        if nl is not None:
            value -= nl.f(delayed(nl.target, t - nl.tau))
        out[eq] = abs(value)
    return out


def error_norms(errors: Sequence[float]) -> tuple[float, float, float]:
    """(l2, linf, rms) of a sample of pointwise errors.

    The RMS divisor is the sample count, so l2**2 == count * rms**2 holds
    exactly and rms <= linf.
    """
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("error sample must be non-empty")
    l2 = float(np.sqrt(np.sum(e**2)))
    linf = float(np.abs(e).max())
    rms = float(np.sqrt(np.sum(e**2) / e.size))
    return l2, linf, rms


def sample_points(b: float, per_unit: int = SAMPLES_PER_UNIT) -> np.ndarray:
    """Equally spaced norm-sampling grid: ``per_unit`` intervals per unit of t."""
    count = max(1, int(round(b * per_unit)))
    return np.linspace(0.0, b, count + 1)


@dataclass
class ErrorReport:
    """Residuals or reference errors at sample points, with their norms."""

    points: np.ndarray
    errors: np.ndarray  # shape (l, len(points))
    l2: np.ndarray
    linf: np.ndarray
    rms: np.ndarray
    reference: str  # "exact", "method_of_steps", or "none"


def error_report(problem: DDEProblem, solution: SpectralSolution,
                 reference: Optional[Callable[[float], np.ndarray]] = None,
                 points: Optional[np.ndarray] = None,
                 reference_label: str = "exact") -> ErrorReport:
    """Errors against a reference callable, or residuals when none is given."""
    if points is None:
        points = sample_points(problem.b)
    l = problem.n_equations
    errors = np.empty((l, len(points)))
    for j, t in enumerate(points):
        if reference is None:
            errors[:, j] = residual(problem, solution, t)
        else:
            ref = np.atleast_1d(np.asarray(reference(t), dtype=float))
            errors[:, j] = np.abs(evaluate(solution, t) - ref)
    norms = np.array([error_norms(errors[eq]) for eq in range(l)])
    return ErrorReport(
        points=points, errors=errors,
        l2=norms[:, 0], linf=norms[:, 1], rms=norms[:, 2],
        reference="none" if reference is None else reference_label,
    )


@dataclass
class ConvergenceRow:
    n_max: int
    l2: Optional[np.ndarray]
    linf: Optional[np.ndarray]
    rms: Optional[np.ndarray]
    cpu_time: float
    condition: float
    iterations: int = 0
    error: Optional[str] = None


def convergence_study(problem: DDEProblem, n_list: Sequence[int],
                      reference: Optional[Callable[[float], np.ndarray]] = None,
                      tol: float = 1e-8, max_iter: int = 50) -> list[ConvergenceRow]:
    """Solve at each truncation and tabulate norms and solve time.

    Per-truncation failures are recorded in the row rather than aborting
    the study. Timing covers assembly and solve only.
    """
    if not n_list:
        raise ValueError("truncation list must be non-empty")
    rows = []
    for n_max in n_list:
        start = time.perf_counter()
        try:
            if problem.has_nonlinearity:
                solution = solve_nonlinear(problem, n_max, tol=tol, max_iter=max_iter)
            else:
                solution = solve_linear(problem, n_max)
        except Exception as err:  # recorded, not raised
            rows.append(ConvergenceRow(
                n_max=n_max, l2=None, linf=None, rms=None,
                cpu_time=time.perf_counter() - start,
                condition=float("nan"), error=str(err),
            ))
            continue
        cpu_time = time.perf_counter() - start
        report = error_report(problem, solution, reference)
        rows.append(ConvergenceRow(
            n_max=n_max, l2=report.l2, linf=report.linf, rms=report.rms,
            cpu_time=cpu_time, condition=solution.condition,
            iterations=solution.iterations,
        ))
    return rows
