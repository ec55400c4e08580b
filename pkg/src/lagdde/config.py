"""Flat key-value problem configuration with a small expression grammar.

The format is line oriented: global keys first, then one ``[equation k]``
section per equation. ``#`` starts a comment. Forcing, history, exact and
nonlinearity values are expressions over ``t`` (or ``u`` for the
nonlinearity) built from + - * / ^, exp, sin, cos, numbers and the
constants pi and e.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from typing import Optional

from .collocation import (
    DDEProblem,
    DelayTerm,
    History,
    NonlinearDelayTerm,
)


class ConfigError(Exception):
    """Invalid configuration text.

    ``line``/``column`` locate syntax errors; ``field`` names the offending
    key for semantic errors.
    """

    def __init__(self, message, line=None, column=None, field=None):
        self.line = line
        self.column = column
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field is not None:
            where.append(f"field '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


# ---------------------------------------------------------------------------
# expression grammar

_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
                       r"|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*/^,]))")
_FUNCTIONS = {"exp": math.exp, "sin": math.sin, "cos": math.cos}
_CONSTANTS = {"pi": math.pi, "e": math.e}


class _Tokenizer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tokens = []
        while self.pos < len(text):
            m = _TOKEN_RE.match(text, self.pos)
            if m is None or m.end() == self.pos:
                rest = text[self.pos:].lstrip()
                if not rest:
                    break
                col = len(text) - len(rest) + 1
                raise ConfigError(f"unexpected character {rest[0]!r}", column=col)
            start = m.start(1) if m.group(1) else (
                m.start(2) if m.group(2) else m.start(3))
            if m.group(1):
                self.tokens.append(("num", float(text[start:m.end()]), start + 1))
            elif m.group(2):
                self.tokens.append(("name", m.group(2), start + 1))
            else:
                self.tokens.append(("op", m.group(3), start + 1))
            self.pos = m.end()
        self.tokens.append(("end", None, len(text) + 1))
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def next(self):
        tok = self.tokens[self.index]
        self.index += 1
        return tok


class Expression:
    """A compiled expression over a single named variable."""

    def __init__(self, source: str, variable: str = "t"):
        self.source = source.strip()
        self.variable = variable
        self._ast = _parse_expression(self.source, variable)

    def __call__(self, value: float) -> float:
        return _eval_ast(self._ast, value)

    def __eq__(self, other):
        return (isinstance(other, Expression)
                and self.source == other.source
                and self.variable == other.variable)

    def __hash__(self):
        return hash((self.source, self.variable))

    def __repr__(self):
        return f"Expression({self.source!r})"


def _parse_expression(text, variable):
    tk = _Tokenizer(text)

    def expect_op(op):
        kind, value, col = tk.next()
        if kind != "op" or value != op:
            raise ConfigError(f"expected '{op}'", column=col)

    def atom():
        kind, value, col = tk.next()
        if kind == "num":
            return ("const", value)
        if kind == "name":
            if value in _FUNCTIONS:
                expect_op("(")
                inner = expr()
                expect_op(")")
                return ("call", value, inner)
            if value in _CONSTANTS:
                return ("const", _CONSTANTS[value])
            if value == variable:
                return ("var",)
            raise ConfigError(f"unknown name '{value}'", column=col)
        if kind == "op" and value == "(":
            inner = expr()
            expect_op(")")
            return inner
        raise ConfigError("expected a number, name or '('", column=col)

    def power():
        base = atom()
        kind, value, _ = tk.peek()
        if kind == "op" and value == "^":
            tk.next()
            return ("pow", base, unary())
        return base

    def unary():
        kind, value, _ = tk.peek()
        if kind == "op" and value in "+-":
            tk.next()
            operand = unary()
            return operand if value == "+" else ("neg", operand)
        return power()

    def term():
        node = unary()
        while True:
            kind, value, _ = tk.peek()
            if kind == "op" and value in "*/":
                tk.next()
                node = ("mul" if value == "*" else "div", node, unary())
            else:
                return node

    def expr():
        node = term()
        while True:
            kind, value, _ = tk.peek()
            if kind == "op" and value in "+-":
                tk.next()
                node = ("add" if value == "+" else "sub", node, term())
            else:
                return node

    tree = expr()
    kind, value, col = tk.peek()
    if kind != "end":
        raise ConfigError(f"unexpected trailing input {value!r}", column=col)
    return tree


def _eval_ast(node, x):
    op = node[0]
    if op == "const":
        return node[1]
    if op == "var":
        return float(x)
    if op == "neg":
        return -_eval_ast(node[1], x)
    if op == "call":
        return _FUNCTIONS[node[1]](_eval_ast(node[2], x))
    a = _eval_ast(node[1], x)
    b = _eval_ast(node[2], x)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a**b
    raise AssertionError(f"unknown AST node {op}")


# ---------------------------------------------------------------------------
# configuration model

@dataclass
class EquationConfig:
    gamma: float = 0.0
    phi: float = 0.0
    forcing: Expression = field(default_factory=lambda: Expression("0"))
    history: Optional[Expression] = None
    delays: tuple = ()  # of (target 0-based, beta, tau)
    nonlinear: Optional[Expression] = None  # over u
    nonlinear_tau: Optional[float] = None
    nonlinear_target: Optional[int] = None
    exact: Optional[Expression] = None


@dataclass
class ProblemConfig:
    n_equations: int = 1
    b: float = 1.0
    n_max: Optional[int] = None
    n_list: tuple = ()
    tol: float = 1e-8
    max_iter: int = 50
    rk4_step: Optional[float] = None
    oracle: str = "none"  # none | rk4 | exact
    history_end: float = 0.0
    equations: tuple = ()


_GLOBAL_KEYS = {"equations", "b", "N", "N_list", "tol", "max_iter",
                "rk4_step", "oracle", "history_end"}
_EQUATION_KEYS = {"gamma", "phi", "forcing", "history", "delay",
                  "nonlinear", "nonlinear_tau", "nonlinear_target", "exact"}


def parse_config(source) -> ProblemConfig:
    """Parse a configuration from a file path or raw text."""
    if isinstance(source, (str, os.PathLike)):
        text = str(source)
        if "\n" not in text and "=" not in text and os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
    else:
        raise TypeError(f"expected path or text, got {type(source)!r}")
    return parse_config_text(text)


def parse_config_text(text: str) -> ProblemConfig:
    cfg = ProblemConfig()
    section = None  # None = global, else 0-based equation index
    equations: dict[int, EquationConfig] = {}
    declared = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[\s*equation\s+(\d+)\s*\]", line)
        if m:
            index = int(m.group(1)) - 1
            if index < 0:
                raise ConfigError("equation numbers start at 1", line=lineno)
            section = index
            equations.setdefault(index, EquationConfig())
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            if section is None:
                if key not in _GLOBAL_KEYS:
                    raise ConfigError(f"unknown key '{key}'", line=lineno)
                declared = _apply_global(cfg, key, value, declared)
            else:
                if key not in _EQUATION_KEYS:
                    raise ConfigError(f"unknown key '{key}'", line=lineno)
                _apply_equation(equations[section], key, value)
        except ConfigError as err:
            if err.line is None:
                raise ConfigError(str(err), line=lineno) from err
            raise
        except ValueError as err:
            raise ConfigError(str(err), line=lineno, field=key) from err

    n_eq = declared if declared is not None else (max(equations) + 1 if equations else 1)
    cfg.n_equations = n_eq
    if equations and max(equations) + 1 > n_eq:
        raise ConfigError(
            f"section [equation {max(equations) + 1}] exceeds declared "
            f"equation count {n_eq}", field="equations")
    cfg.equations = tuple(equations.get(i, EquationConfig()) for i in range(n_eq))
    _validate(cfg)
    return cfg


def _apply_global(cfg, key, value, declared):
    if key == "equations":
        cfg.n_equations = int(value)
        declared = cfg.n_equations
    elif key == "b":
        cfg.b = float(value)
    elif key == "N":
        cfg.n_max = int(value)
    elif key == "N_list":
        cfg.n_list = tuple(int(v) for v in re.split(r"[,\s]+", value) if v)
    elif key == "tol":
        cfg.tol = float(value)
    elif key == "max_iter":
        cfg.max_iter = int(value)
    elif key == "rk4_step":
        cfg.rk4_step = float(value)
        if cfg.oracle == "none":
            cfg.oracle = "rk4"
    elif key == "oracle":
        if value not in ("none", "rk4", "exact"):
            raise ConfigError(f"oracle must be none, rk4 or exact, got '{value}'",
                              field="oracle")
        cfg.oracle = value
    elif key == "history_end":
        cfg.history_end = float(value)
    return declared


def _apply_equation(eq, key, value):
    if key == "gamma":
        eq.gamma = float(value)
    elif key == "phi":
        eq.phi = float(value)
    elif key == "forcing":
        eq.forcing = Expression(value)
    elif key == "history":
        eq.history = Expression(value)
    elif key == "delay":
        parts = value.split()
        if len(parts) != 3:
            raise ConfigError(
                "delay takes three values: target beta tau", field="delay")
        target, beta, tau = int(parts[0]), float(parts[1]), float(parts[2])
        eq.delays = eq.delays + ((target - 1, beta, tau),)
    elif key == "nonlinear":
        eq.nonlinear = Expression(value, variable="u")
    elif key == "nonlinear_tau":
        eq.nonlinear_tau = float(value)
    elif key == "nonlinear_target":
        eq.nonlinear_target = int(value) - 1
    elif key == "exact":
        eq.exact = Expression(value)


def _validate(cfg):
    if not 1 <= cfg.n_equations <= 3:
        raise ConfigError(f"equation count must be 1-3, got {cfg.n_equations}",
                          field="equations")
    if cfg.b <= 0:
        raise ConfigError(f"b must be positive, got {cfg.b}", field="b")
    if cfg.tol <= 0:
        raise ConfigError(f"tol must be positive, got {cfg.tol}", field="tol")
    if cfg.max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {cfg.max_iter}",
                          field="max_iter")
    if cfg.rk4_step is not None and cfg.rk4_step <= 0:
        raise ConfigError(f"rk4_step must be positive, got {cfg.rk4_step}",
                          field="rk4_step")
    if cfg.n_max is not None and cfg.n_max < 2:
        raise ConfigError(f"N must be >= 2, got {cfg.n_max}", field="N")
    for n in cfg.n_list:
        if n < 2:
            raise ConfigError(f"N_list entries must be >= 2, got {n}",
                              field="N_list")
    for k, eq in enumerate(cfg.equations, start=1):
        for target, beta, tau in eq.delays:
            if tau < 0:
                raise ConfigError(f"delay must be non-negative, got {tau}",
                                  field="tau")
            if not 0 <= target < cfg.n_equations:
                raise ConfigError(
                    f"delay target {target + 1} out of range in equation {k}",
                    field="delay")
        if eq.nonlinear is not None:
            if eq.nonlinear_tau is None:
                raise ConfigError(
                    f"equation {k} declares a nonlinearity without nonlinear_tau",
                    field="nonlinear_tau")
            if eq.nonlinear_tau <= 0:
                raise ConfigError(
                    f"nonlinear_tau must be positive, got {eq.nonlinear_tau}",
                    field="nonlinear_tau")
    if cfg.oracle == "rk4" and cfg.rk4_step is None:
        raise ConfigError("oracle 'rk4' requires rk4_step", field="rk4_step")
    if cfg.oracle == "exact":
        for k, eq in enumerate(cfg.equations, start=1):
            if eq.exact is None:
                raise ConfigError(
                    f"oracle 'exact' requires an exact expression in equation {k}",
                    field="exact")


def serialize(cfg: ProblemConfig) -> str:
    """Emit configuration text that parses back to an equal config."""
    lines = [f"equations = {cfg.n_equations}", f"b = {cfg.b!r}"]
    if cfg.n_max is not None:
        lines.append(f"N = {cfg.n_max}")
    if cfg.n_list:
        lines.append("N_list = " + ", ".join(str(n) for n in cfg.n_list))
    lines.append(f"tol = {cfg.tol!r}")
    lines.append(f"max_iter = {cfg.max_iter}")
    if cfg.rk4_step is not None:
        lines.append(f"rk4_step = {cfg.rk4_step!r}")
    lines.append(f"oracle = {cfg.oracle}")
    lines.append(f"history_end = {cfg.history_end!r}")
    for k, eq in enumerate(cfg.equations, start=1):
        lines.append("")
        lines.append(f"[equation {k}]")
        lines.append(f"gamma = {eq.gamma!r}")
        lines.append(f"phi = {eq.phi!r}")
        lines.append(f"forcing = {eq.forcing.source}")
        if eq.history is not None:
            lines.append(f"history = {eq.history.source}")
        for target, beta, tau in eq.delays:
            lines.append(f"delay = {target + 1} {beta!r} {tau!r}")
        if eq.nonlinear is not None:
            lines.append(f"nonlinear = {eq.nonlinear.source}")
            lines.append(f"nonlinear_tau = {eq.nonlinear_tau!r}")
            if eq.nonlinear_target is not None:
                lines.append(f"nonlinear_target = {eq.nonlinear_target + 1}")
        if eq.exact is not None:
            lines.append(f"exact = {eq.exact.source}")
    return "\n".join(lines) + "\n"


def build_problem(cfg: ProblemConfig) -> DDEProblem:
    """Instantiate the solver-facing problem from a parsed config."""
    history = None
    if any(eq.history is not None for eq in cfg.equations):
        functions = tuple(
            eq.history if eq.history is not None
            else (lambda t, v=eq.phi: v)
            for eq in cfg.equations
        )
        history = History(functions=functions, end=cfg.history_end)
    nonlinear = []
    for k, eq in enumerate(cfg.equations):
        if eq.nonlinear is None:
            nonlinear.append(None)
        else:
            target = eq.nonlinear_target if eq.nonlinear_target is not None else k
            nonlinear.append(NonlinearDelayTerm(
                f=eq.nonlinear, target=target, tau=eq.nonlinear_tau))
    return DDEProblem(
        gamma=[eq.gamma for eq in cfg.equations],
        delays=[[DelayTerm(target, beta, tau) for target, beta, tau in eq.delays]
                for eq in cfg.equations],
        g=[eq.forcing for eq in cfg.equations],
        phi=[eq.phi for eq in cfg.equations],
        b=cfg.b,
        history=history,
        nonlinear=nonlinear,
    )
