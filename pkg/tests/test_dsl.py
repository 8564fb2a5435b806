import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoquant.dsl import (
    Constant,
    Domain,
    Parameter,
    Potential,
    Pow,
    Variable,
    bind,
    coefficient,
    diff,
    evaluate,
    evaluate_grid,
    parse,
    power_sum,
    substitute,
    to_text,
)
from hoquant.dsl.evaluate import compile_array, compile_scalar
from hoquant.errors import DomainError, ExprSyntaxError, NotPowerSum, UnboundName, UnknownFunction

EX1 = "omega^2*(3*q/2)^(2/3) + lambda*(2/(3*q))^(2/3) - (5/36)/q^2"


def test_parse_power():
    assert parse("q^2") == Pow(Variable("q"), Fraction(2))


def test_parse_example1_tree():
    e = parse(EX1)
    assert e.__class__.__name__ == "Sub"
    assert {"omega", "lambda"} <= {p.name for p in _params(e)}
    v = evaluate(e, 1.0, {"omega": 1.0, "lambda": 0.0})
    assert v == pytest.approx(1.5 ** (2 / 3) - 5 / 36, rel=1e-15)


def test_example1_value_at_one():
    # (3/2)^(2/3) - 5/36, recomputed directly
    v = evaluate(parse(EX1), 1.0, {"omega": 1.0, "lambda": 0.0})
    assert v == pytest.approx(1.171482, abs=1e-6)


def _params(e):
    from hoquant.dsl.expr import walk

    return [n for n in walk(e) if isinstance(n, Parameter)]


def test_incomplete_input_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("q^")
    assert exc.value.offset == 2
    assert exc.value.expected


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        parse("tan(q)")


def test_non_ascii_byte_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("q + ω")
    assert exc.value.offset == 4


@pytest.mark.parametrize("text", ["q^1.5", "q^a", "2^3^1", "q^(1/0)", "(q", "q)", "*q", "q $ 2"])
def test_malformed_input_rejected(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("q^2", 3.0, 9.0),
        ("-q^2", 3.0, -9.0),
        ("2^3", 0.0, 8.0),
        ("(-8)^(1/3)", 0.0, -2.0),
        ("sqrt(q) + exp(0) + log(1) + sin(0) + cos(0) + abs(-2)", 4.0, 6.0),
        ("1 - 2 - 3", 0.0, -4.0),
        ("8/2/2", 0.0, 2.0),
        ("q^(-1)", 4.0, 0.25),
    ],
)
def test_evaluate(text, x, expected):
    assert evaluate(parse(text), x) == pytest.approx(expected)


def test_pole_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("1/q"), 0.0)


@pytest.mark.parametrize("text", ["log(q)", "sqrt(q)", "q^(1/2)"])
def test_negative_argument_domain_error(text):
    with pytest.raises(DomainError):
        evaluate(parse(text), -1.0)


def test_unbound_parameter():
    with pytest.raises(UnboundName):
        evaluate(parse("a*q"), 1.0)
    with pytest.raises(UnboundName):
        Potential.from_text("a*q")


def test_overflow_is_signed_infinity():
    assert evaluate(parse("exp(q)"), 1e4) == math.inf
    assert evaluate(parse("-exp(q)"), 1e4) == -math.inf


def test_compiled_evaluators_agree():
    e = parse(EX1)
    params = {"omega": 1.3, "lambda": 0.7}
    f = compile_scalar(e, params)
    g = compile_array(e, params)
    import numpy as np

    xs = np.linspace(0.1, 5, 50)
    assert np.allclose([evaluate(e, x, params) for x in xs], g(xs), rtol=1e-14)
    assert f(1.7) == pytest.approx(evaluate(e, 1.7, params), rel=1e-15)


def test_evaluate_grid_reports_bad_point():
    import numpy as np

    with pytest.raises(DomainError):
        evaluate_grid(parse("1/q"), np.array([-1.0, 0.0, 1.0]))


def test_diff_examples():
    assert to_text(diff(parse("q^2"))) == "2*q"
    d = diff(parse("q^(2/3)"))
    assert evaluate(d, 8.0) == pytest.approx(2 / 3 * 8 ** (-1 / 3))
    pg = parse("(2 + 2*q^2 + 1.5*q^4)*exp(-q^2)")
    assert evaluate(diff(pg), 0.0) == 0.0


def test_substitute_examples():
    s = parse("(3*q/2)^(2/3)")
    e = substitute(parse("z^2", variable="z"), "z", s)
    assert evaluate(e, 2.0) == pytest.approx(3.0 ** (4 / 3))
    tho = parse("omega^2*z^2 + rho*z + lambda", variable="z")
    e2 = substitute(tho, "z", parse("(2*q)^(1/2)"))
    p = {"omega": 1.5, "rho": 0.5, "lambda": 2.0}
    assert evaluate(e2, 3.0, p) == pytest.approx(1.5**2 * 6 + 0.5 * 6**0.5 + 2.0)
    c = Constant(Fraction(7))
    assert substitute(c, "z", s) is c


def test_bind_makes_constants():
    e = bind(parse("a*q + b"), {"a": 2, "b": Fraction(1, 3)})
    assert evaluate(e, 3.0) == pytest.approx(6 + 1 / 3)


def test_printer_exact_decimals_and_fractions():
    assert to_text(parse("0.125*q")) == "0.125*q"
    assert to_text(Constant(Fraction(5, 36))) == "(5/36)"
    assert to_text(parse("a - (b - c)")) == "a - (b - c)"
    assert to_text(parse("a/(b*c)")) == "a/(b*c)"
    assert to_text(parse("(-q)^2")) == "(-q)^2"


def test_power_sum_reads_exact_coefficients():
    ps = power_sum(parse("(5/36)/q^2 + 3*q"))
    assert coefficient(ps, -2) == Fraction(5, 36)
    assert coefficient(ps, 1) == 3
    with pytest.raises(NotPowerSum):
        power_sum(parse("1/(1 + q)"))
    with pytest.raises(NotPowerSum):
        power_sum(parse("exp(q)"))


def test_domain_and_potential():
    d = Domain.half_line()
    assert not d.contains(0.0) and d.contains(1e-300)
    assert Domain.parse("-inf,inf") == Domain()
    with pytest.raises(ValueError):
        Domain(1.0, 0.0)
    V = Potential.from_text("q^2", d)
    with pytest.raises(DomainError):
        V(-1.0)
    assert V.derivative(3.0, 2) == 2.0


# -- properties ------------------------------------------------------------

ATOMS = ["q", "a", "2", "0.5", "(3/7)"]
FUNCS = ["exp", "sin", "cos"]


@st.composite
def smooth_exprs(draw, depth=3):
    """Expressions smooth and finite on q in [0.5, 2] with a in [0.5, 2]."""
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(ATOMS))
    kind = draw(st.sampled_from(["+", "-", "*", "pow", "f", "neg"]))
    if kind == "pow":
        base = draw(st.sampled_from(["q", "a", "(q + 2)"]))
        p = draw(st.integers(-3, 3))
        r = draw(st.integers(1, 3))
        return f"{base}^({p}/{r})"
    if kind == "f":
        return f"{draw(st.sampled_from(FUNCS))}({draw(smooth_exprs(depth=depth - 1))}/10)"
    if kind == "neg":
        return f"-({draw(smooth_exprs(depth=depth - 1))})"
    left = draw(smooth_exprs(depth=depth - 1))
    right = draw(smooth_exprs(depth=depth - 1))
    return f"({left}) {kind} ({right})"


points = st.floats(0.5, 2.0)
A = {"a": 1.3}


@settings(max_examples=150, deadline=None)
@given(smooth_exprs(), smooth_exprs(), st.floats(-3, 3), st.floats(-3, 3), points)
def test_diff_linearity(f, g, a, b, x):
    lhs = diff(parse(f"{_num(a)}*({f}) + {_num(b)}*({g})"))
    rhs_f, rhs_g = diff(parse(f)), diff(parse(g))
    a, b = float(_num(a).strip("()")), float(_num(b).strip("()"))
    expected = a * evaluate(rhs_f, x, A) + b * evaluate(rhs_g, x, A)
    got = evaluate(lhs, x, A)
    assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)


def _num(v: float) -> str:
    """Decimal text for a float, parenthesised when negative."""
    text = f"{abs(v):.6f}"
    return f"(-{text})" if v < 0 else text


@settings(max_examples=150, deadline=None)
@given(smooth_exprs(), st.sampled_from(["q^2 + 1", "exp(q/3)", "(q + 1)^(1/2)", "2*q"]), points)
def test_chain_rule(e, r, x):
    E, R = parse(e), parse(r)
    lhs = evaluate(diff(substitute(E, "q", R)), x, A)
    rhs = evaluate(substitute(diff(E), "q", R), x, A) * evaluate(diff(R), x, A)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@settings(max_examples=150, deadline=None)
@given(smooth_exprs(), points)
def test_diff_matches_central_difference(e, x):
    E = parse(e)
    h = 1e-5
    fd = (evaluate(E, x + h, A) - evaluate(E, x - h, A)) / (2 * h)
    assert evaluate(diff(E), x, A) == pytest.approx(fd, rel=1e-5, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(smooth_exprs(), points)
def test_print_parse_round_trip(e, x):
    E = parse(e)
    again = parse(to_text(E))
    assert evaluate(again, x, A) == pytest.approx(evaluate(E, x, A), rel=1e-14, abs=1e-14)
    assert to_text(parse(to_text(again))) == to_text(again)
