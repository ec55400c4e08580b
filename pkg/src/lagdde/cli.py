"""Command-line front end: solve / compare / converge / validate.

Outputs are CSV files (header row, 17 significant digits) plus a
run-manifest text file. CSV bodies are deterministic; the timestamp lives
only in the manifest.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import accuracy, reference
from .collocation import (
    NonConvergenceError,
    evaluate,
    solve_linear,
    solve_nonlinear,
)
from .config import ConfigError, ProblemConfig, build_problem, parse_config
from .linalg import SingularSystemError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_ORACLE = 4


class OracleError(Exception):
    """The requested run needs a reference oracle that is not configured."""


@dataclass
class RunReport:
    """Summary of a CLI run: per-truncation records and output files."""

    records: list = field(default_factory=list)
    outputs: list = field(default_factory=list)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(out_dir: Path, command: str, config_path, settings: dict,
                    outputs: list[Path]) -> Path:
    path = out_dir / "manifest.txt"
    with open(path, "w") as fh:
        fh.write(f"# generated {time.strftime('%Y-%m-%d %H:%M:%S')}\n")
        fh.write(f"command = {command}\n")
        fh.write(f"config = {config_path}\n")
        for key, value in settings.items():
            fh.write(f"{key} = {value}\n")
        for out in outputs:
            fh.write(f"output = {out}\n")
    return path


def _make_oracle(cfg: ProblemConfig, problem, step_override=None):
    """Callable t -> per-equation reference values, or None."""
    if cfg.oracle == "none":
        return None
    if cfg.oracle == "exact":
        exacts = [eq.exact for eq in cfg.equations]
        return lambda t: np.array([f(t) for f in exacts])
    step = step_override if step_override is not None else cfg.rk4_step
    if step is None:
        raise OracleError("rk4 oracle requested but no rk4_step configured")
    trajectory = reference.rk4_method_of_steps(problem, step=step)
    return trajectory


def _solve_at(problem, cfg, n_max):
    if problem.has_nonlinearity:
        return solve_nonlinear(problem, n_max, tol=cfg.tol, max_iter=cfg.max_iter)
    return solve_linear(problem, n_max)


def run_solve(cfg: ProblemConfig, n_max: int, out_dir: Path,
              config_path="<config>") -> RunReport:
    problem = build_problem(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    solution = _solve_at(problem, cfg, n_max)
    cpu_time = time.perf_counter() - start

    points = accuracy.sample_points(problem.b)
    l = problem.n_equations
    sol_rows = [[t, *evaluate(solution, t)] for t in points]
    sol_path = out_dir / "solution.csv"
    _write_csv(sol_path, ["t"] + [f"u_{i + 1}" for i in range(l)], sol_rows)

    coeff_path = out_dir / "coefficients.csv"
    _write_csv(coeff_path, ["equation", "n", "a_n"],
               [[eq + 1, n, solution.coefficients[eq, n]]
                for eq in range(l) for n in range(n_max + 1)])

    oracle = _make_oracle(cfg, problem)
    record = {
        "N": n_max, "cpu_time": round(cpu_time, 3),
        "condition": solution.condition, "iterations": solution.iterations,
    }
    if oracle is not None:
        report = accuracy.error_report(problem, solution, oracle,
                                       reference_label=cfg.oracle)
        record.update(l2=report.l2, linf=report.linf, rms=report.rms)
        for eq in range(l):
            print(f"u_{eq + 1}: L2={report.l2[eq]:.3e} "
                  f"Linf={report.linf[eq]:.3e} RMS={report.rms[eq]:.3e}")
    print(f"N={n_max} cpu_time={record['cpu_time']:.3f}s "
          f"condition={solution.condition:.3e}")
    manifest = _write_manifest(out_dir, "solve", config_path,
                               {"N": n_max}, [sol_path, coeff_path])
    return RunReport(records=[record],
                     outputs=[sol_path, coeff_path, manifest])


def run_compare(cfg: ProblemConfig, n_list, out_dir: Path,
                oracle_step=None, config_path="<config>") -> RunReport:
    problem = build_problem(cfg)
    oracle = _make_oracle(cfg, problem, step_override=oracle_step)
    if oracle is None:
        raise OracleError(
            "compare needs a reference; set oracle = rk4 (with rk4_step) "
            "or oracle = exact in the config")
    out_dir.mkdir(parents=True, exist_ok=True)
    solutions = {n: _solve_at(problem, cfg, n) for n in n_list}

    points = accuracy.sample_points(problem.b)
    l = problem.n_equations
    header = ["t"] + [f"oracle_u_{i + 1}" for i in range(l)]
    for n in n_list:
        header += [f"u_{i + 1}_N{n}" for i in range(l)]
        header += [f"absdiff_u_{i + 1}_N{n}" for i in range(l)]
    rows = []
    for t in points:
        ref = np.atleast_1d(np.asarray(oracle(t), dtype=float))
        row = [t, *ref]
        for n in n_list:
            vals = evaluate(solutions[n], t)
            row += list(vals) + list(np.abs(vals - ref))
        rows.append(row)
    cmp_path = out_dir / "comparison.csv"
    _write_csv(cmp_path, header, rows)
    manifest = _write_manifest(out_dir, "compare", config_path,
                               {"N_list": list(n_list)}, [cmp_path])
    return RunReport(records=[{"N_list": list(n_list)}],
                     outputs=[cmp_path, manifest])


def run_converge(cfg: ProblemConfig, n_list, out_dir: Path,
                 config_path="<config>") -> RunReport:
    problem = build_problem(cfg)
    oracle = _make_oracle(cfg, problem)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = accuracy.convergence_study(problem, n_list, oracle,
                                      tol=cfg.tol, max_iter=cfg.max_iter)
    if all(r.error is not None for r in rows):
        raise NonConvergenceError(0, float("nan"))

    l = problem.n_equations
    header = ["N"]
    for eq in range(l):
        header += [f"l2_u_{eq + 1}", f"linf_u_{eq + 1}", f"rms_u_{eq + 1}"]
    header += ["cpu_time", "condition", "iterations"]
    table = []
    for r in rows:
        if r.error is not None:
            print(f"N={r.n_max}: failed ({r.error})", file=sys.stderr)
            continue
        row = [r.n_max]
        for eq in range(l):
            row += [r.l2[eq], r.linf[eq], r.rms[eq]]
        row += [round(r.cpu_time, 3), r.condition, r.iterations]
        table.append(row)
        print(f"N={r.n_max} linf={max(r.linf):.3e} cpu_time={r.cpu_time:.3f}s")
    conv_path = out_dir / "convergence.csv"
    _write_csv(conv_path, header, table)
    manifest = _write_manifest(out_dir, "converge", config_path,
                               {"N_list": list(n_list)}, [conv_path])
    return RunReport(records=[vars(r) for r in rows],
                     outputs=[conv_path, manifest])


def run_validate() -> int:
    """Brute-force identity suite; prints one line per check."""
    failures = 0
    for name, check in reference.identity_suite():
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {name} (max deviation {check.max_deviation:.3e})")
        failures += not check.passed
    mismatch = reference.delay_product_mismatch()
    expected_wrong = mismatch > 1e-3
    status = "PASS" if expected_wrong else "FAIL"
    print(f"{status} delay_product_with_extra_diff_factor_differs "
          f"(deviation {mismatch:.3e}, expected > 1e-3)")
    failures += not expected_wrong
    return EXIT_OK if failures == 0 else EXIT_SOLVER


def _parse_n_list(args, cfg, need_list=False):
    if args.N_list:
        return list(args.N_list)
    if not need_list and args.N is not None:
        return [args.N]
    if cfg.n_list:
        return list(cfg.n_list)
    if cfg.n_max is not None:
        return [cfg.n_max]
    raise ConfigError("no truncation given; use --N/--N-list or set N in the config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagdde",
        description="Laguerre collocation solver for retarded delay "
                    "differential equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="problem config file")
        p.add_argument("--N", type=int, help="truncation degree")
        p.add_argument("--N-list", dest="N_list", type=int, nargs="+",
                       help="truncation degrees")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--tol", type=float, help="nonlinear iteration tolerance")
        p.add_argument("--max-iter", type=int, help="nonlinear iteration cap")
        p.add_argument("--oracle-step", type=float,
                       help="RK4 oracle step override")

    for verb in ("solve", "compare", "converge"):
        add_common(sub.add_parser(verb))
    sub.add_parser("validate", help="run the brute-force matrix identity suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return run_validate()
    try:
        cfg = parse_config(args.config)
        if args.tol is not None:
            cfg.tol = args.tol
        if args.max_iter is not None:
            cfg.max_iter = args.max_iter
        if args.oracle_step is not None:
            cfg.rk4_step = args.oracle_step
            if cfg.oracle == "none":
                cfg.oracle = "rk4"
        out_dir = Path(args.out)
        if args.command == "solve":
            n_list = _parse_n_list(args, cfg)
            for n in n_list:
                run_solve(cfg, n, out_dir if len(n_list) == 1
                          else out_dir / f"N{n}", config_path=args.config)
        elif args.command == "compare":
            n_list = _parse_n_list(args, cfg)
            run_compare(cfg, n_list, out_dir, oracle_step=args.oracle_step,
                        config_path=args.config)
        elif args.command == "converge":
            n_list = _parse_n_list(args, cfg)
            run_converge(cfg, n_list, out_dir, config_path=args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleError as err:
        print(f"oracle error: {err}", file=sys.stderr)
        return EXIT_ORACLE
    except (SingularSystemError, NonConvergenceError) as err:
        print(f"solver error: {err}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
