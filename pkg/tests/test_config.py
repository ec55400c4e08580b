"""Tests for the configuration format and its expression grammar."""

import math

import pytest

from lagdde.collocation import DelayTerm
from lagdde.config import (
    ConfigError,
    Expression,
    build_problem,
    parse_config,
    parse_config_text,
    serialize,
)

EXAMPLE1 = """\
# delayed feedback with exponential nonlinearity
b = 5
N = 10
tol = 1e-8
max_iter = 50
rk4_step = 0.001
history_end = 0.5

[equation 1]
gamma = 0.4
phi = 0
history = sin(t)
nonlinear = exp(-u)
nonlinear_tau = 0.5
"""

EXAMPLE2 = """\
equations = 2
b = 5
N_list = 3 4
rk4_step = 0.001

[equation 1]
phi = 1
history = 1
delay = 1 1 2

[equation 2]
phi = 1
history = 1
delay = 1 1 2
delay = 2 1 0.5
"""


# ---------------------------------------------------------------------------
# expressions

def test_expression_arithmetic():
    assert Expression("2*t+1")(1.0) == pytest.approx(3.0)
    assert Expression("t^2 - 4*t + 2")(2.0) == pytest.approx(-2.0)
    assert Expression("-2^2")(0.0) == pytest.approx(-4.0)
    assert Expression("(1+t)/2")(3.0) == pytest.approx(2.0)
    assert Expression("exp(-u)", variable="u")(0.0) == pytest.approx(1.0)


def test_expression_functions_and_constants():
    assert Expression("sin(pi/2)")(0.0) == pytest.approx(1.0)
    assert Expression("cos(0)")(0.0) == pytest.approx(1.0)
    assert Expression("exp(1) - e")(0.0) == pytest.approx(0.0, abs=1e-15)
    assert Expression("sin(t)*cos(t)")(0.7) == pytest.approx(
        math.sin(0.7) * math.cos(0.7))


def test_expression_syntax_errors_carry_location():
    with pytest.raises(ConfigError) as info:
        Expression("2*+")
    assert info.value.column is not None
    with pytest.raises(ConfigError):
        Expression("sin 3")
    with pytest.raises(ConfigError):
        Expression("2 t")
    with pytest.raises(ConfigError) as info:
        Expression("foo(t)")
    assert "foo" in str(info.value)


def test_expression_rejects_wrong_variable():
    with pytest.raises(ConfigError):
        Expression("u + 1", variable="t")


# ---------------------------------------------------------------------------
# parsing

def test_parse_nonlinear_example():
    cfg = parse_config_text(EXAMPLE1)
    assert cfg.n_equations == 1
    assert cfg.b == 5.0
    assert cfg.n_max == 10
    assert cfg.oracle == "rk4"
    eq = cfg.equations[0]
    assert eq.gamma == 0.4
    assert eq.history(0.5) == pytest.approx(math.sin(0.5))
    assert eq.nonlinear(1.0) == pytest.approx(math.exp(-1.0))
    assert eq.nonlinear_tau == 0.5


def test_parse_coupled_example():
    cfg = parse_config_text(EXAMPLE2)
    assert cfg.n_equations == 2
    assert cfg.n_list == (3, 4)
    assert cfg.equations[0].delays == ((0, 1.0, 2.0),)
    assert cfg.equations[1].delays == ((0, 1.0, 2.0), (1, 1.0, 0.5))


def test_build_problem_from_coupled_example():
    problem = build_problem(parse_config_text(EXAMPLE2))
    assert problem.n_equations == 2
    assert problem.delays[1] == (DelayTerm(0, 1.0, 2.0), DelayTerm(1, 1.0, 0.5))
    assert problem.history is not None
    assert problem.history.value(0, -1.0) == 1.0
    assert problem.phi == (1.0, 1.0)


def test_parse_config_from_file(tmp_path):
    path = tmp_path / "problem.cfg"
    path.write_text(EXAMPLE1)
    cfg = parse_config(str(path))
    assert cfg == parse_config_text(EXAMPLE1)


def test_negative_delay_is_semantic_error():
    text = "b = 1\n[equation 1]\ndelay = 1 1.0 -1\n"
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.field == "tau"


def test_unknown_keys_are_rejected_with_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("b = 1\nbogus = 2\n")
    assert info.value.line == 2
    with pytest.raises(ConfigError) as info:
        parse_config_text("b = 1\n[equation 1]\nwhatever = 3\n")
    assert info.value.line == 3


def test_semantic_validation():
    with pytest.raises(ConfigError):
        parse_config_text("b = -1\n")
    with pytest.raises(ConfigError):
        parse_config_text("b = 1\nN = 1\n")
    with pytest.raises(ConfigError):
        parse_config_text("b = 1\ntol = 0\n")
    with pytest.raises(ConfigError):
        parse_config_text("b = 1\noracle = rk4\n")  # missing rk4_step
    with pytest.raises(ConfigError):
        parse_config_text("b = 1\noracle = exact\n[equation 1]\nphi = 1\n")
    with pytest.raises(ConfigError):
        parse_config_text("equations = 1\nb = 1\n[equation 2]\nphi = 1\n")
    with pytest.raises(ConfigError):
        # nonlinearity without its delay
        parse_config_text("b = 1\n[equation 1]\nnonlinear = exp(-u)\n")


def test_round_trip_through_serialize():
    for text in (EXAMPLE1, EXAMPLE2):
        cfg = parse_config_text(text)
        assert parse_config_text(serialize(cfg)) == cfg


def test_comments_and_blank_lines_ignored():
    cfg = parse_config_text("\n# comment\nb = 2  # trailing\n\n")
    assert cfg.b == 2.0
