import math

import pytest
from hypothesis import given, settings, strategies as st

from nestad import scalar as sc
from nestad.expr import (
    MAX_NESTING,
    RESERVED,
    Binary,
    Deriv,
    NestingDepthError,
    Number,
    ParseError,
    Pow,
    UnboundVariableError,
    Unary,
    Var,
    evaluate,
    evaluate_gradient,
    evaluate_second,
    format,
    nesting_level,
    parse,
)
from nestad.nesting import nested_derivative, second_derivative

from oracles import rel_close

PI = math.pi
E = math.e

# parsing ---------------------------------------------------------------------


def test_parse_worked_example():
    assert parse("x^2*cos(x)") == Binary(
        "*", Pow(Var("x"), Number(2.0)), Unary("cos", Var("x"))
    )


def test_parse_nested_derivative():
    assert parse("x^2 + D(exp(y^2), y)") == Binary(
        "+",
        Pow(Var("x"), Number(2.0)),
        Deriv(Unary("exp", Pow(Var("y"), Number(2.0))), "y"),
    )


def test_parse_derivative_at_point():
    assert parse("D_at(exp(t^2), t, x^3)") == Deriv(
        Unary("exp", Pow(Var("t"), Number(2.0))), "t", Pow(Var("x"), Number(3.0))
    )


@pytest.mark.parametrize(
    "source, offset",
    [
        ("2*", 2),
        ("x +", 3),
        ("", 0),
        ("(x", 2),
        ("x)", 1),
        ("2 $ 3", 2),
        ("foo(x)", 0),
        ("sin x", 4),
        ("D(x, 2)", 5),
        ("D(x)", 3),
        ("x ^", 3),
        ("é+", 0),
        ("\u00a0$", 2),  # non-breaking space is whitespace, two bytes in UTF-8
    ],
)
def test_syntax_errors_carry_byte_offset(source, offset):
    with pytest.raises(ParseError) as info:
        parse(source)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_unknown_function_message():
    with pytest.raises(ParseError, match="unknown function 'foo'"):
        parse("1 + foo(2)")


@pytest.mark.parametrize(
    "source, value",
    [("1.5", 1.5), ("2e3", 2000.0), (".5", 0.5), ("3.", 3.0), ("1.25E-2", 0.0125)],
)
def test_number_literals(source, value):
    assert parse(source) == Number(value)


@pytest.mark.parametrize(
    "source, bindings, value",
    [
        ("2+3*4", {}, 14.0),
        ("2^3^2", {}, 512.0),
        ("-x^2", {"x": 3.0}, -9.0),
        ("2^-1", {}, 0.5),
        ("8/4/2", {}, 1.0),
        ("10-4-3", {}, 3.0),
        ("--x", {"x": 2.0}, 2.0),
        ("pow(2, 10)", {}, 1024.0),
    ],
)
def test_precedence(source, bindings, value):
    assert evaluate(source, bindings) == (value, None)


# formatting ------------------------------------------------------------------


def test_format_examples():
    assert format(parse("x+y*z")) == "(x + (y * z))"
    assert format(parse("D(x^2, x)")) == "D((x ^ 2), x)"
    assert format(parse("D_at(sin(t), t, -x)")) == "D_at(sin(t), t, (-x))"
    assert format(Number(0.1)) == "0.1"
    assert format(Number(1e300)) == "1e+300"


names = st.from_regex(r"[a-zA-Z_][a-zA-Z0-9_]{0,3}", fullmatch=True).filter(
    lambda s: s not in RESERVED
)
numbers = st.floats(min_value=0, allow_nan=False, allow_infinity=False).map(
    lambda v: Number(float(v))
)


def _extend(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["exp", "log", "sin", "cos", "tan", "sqrt", "neg"]), children),
        st.builds(Binary, st.sampled_from("+-*/"), children, children),
        st.builds(Pow, children, children),
        st.builds(Deriv, children, names),
        st.builds(Deriv, children, names, children),
    )


def _depth(e):
    if isinstance(e, (Number, Var)):
        return 1
    kids = [getattr(e, f, None) for f in ("child", "left", "right", "base", "exponent", "body", "point")]
    return 1 + max(_depth(k) for k in kids if k is not None and not isinstance(k, str))


asts = st.recursive(st.one_of(numbers, st.builds(Var, names)), _extend, max_leaves=24).filter(
    lambda e: _depth(e) <= 6
)


@settings(max_examples=500)
@given(asts)
def test_format_parse_round_trip(e):
    assert parse(format(e)) == e


# evaluation ------------------------------------------------------------------


def test_evaluate_worked_examples():
    v, d = evaluate("x^2*cos(x)", {"x": PI}, "x")
    assert rel_close(v, -(PI**2), 1e-12) and rel_close(d, -2 * PI, 1e-12)
    v, d = evaluate("x1*x2 + sin(x1)", {"x1": PI, "x2": 2.0}, "x1")
    assert rel_close(v, 2 * PI, 1e-12) and rel_close(d, 1.0, 1e-12)


def test_evaluate_nested_example():
    v, d = evaluate("x^2 + D_at(exp(t^2), t, x^3)", {"x": 1.0}, "x")
    assert rel_close(v, 1 + 2 * E, 1e-12)
    assert rel_close(d, 2 + 18 * E, 1e-12)


def test_evaluate_nested_example_with_literal_substitution():
    # same function with u = x^3 written into the body, using D over a fresh variable
    v, d = evaluate("x^2 + D_at(exp(u^2), u, x^3)", {"x": 1.0, "u": 42.0}, "x")
    assert rel_close(v, 1 + 2 * E, 1e-12)
    assert rel_close(d, 2 + 18 * E, 1e-12)


def test_perturbation_confusion_regression():
    assert evaluate("x * D(x + y, y)", {"x": 1.0, "y": 7.0}, "x") == (1.0, 1.0)


def test_nested_D():
    v, _ = evaluate("D(D(x^3, x), x)", {"x": 2.0})
    assert rel_close(v, 12.0, 1e-9)


def test_triple_D():
    v, d = evaluate("D(D(D(x^3, x), x), x)", {"x": 2.0}, "x")
    assert rel_close(v, 6.0, 1e-9) and d == 0.0


def test_nesting_limit():
    src = "D(D(D(D(x^5, x), x), x), x)"
    assert nesting_level(parse(src)) == MAX_NESTING + 1
    with pytest.raises(NestingDepthError):
        evaluate(src, {"x": 1.0})


def test_point_expression_does_not_count_towards_nesting():
    e = parse("D_at(t^2, t, D(D(D(x^3, x), x), x))")
    assert nesting_level(e) == 3


def test_unbound_variable():
    with pytest.raises(UnboundVariableError, match="'y'"):
        evaluate("x + y", {"x": 1.0})
    with pytest.raises(UnboundVariableError):
        evaluate("x", {"x": 1.0}, "z")
    with pytest.raises(UnboundVariableError):
        evaluate("D(x, q)", {"x": 1.0})


def test_d_at_variable_is_local():
    # t need not be bound outside, and an outer t is shadowed
    assert evaluate("D_at(t^2, t, 3)", {}) == (6.0, None)
    assert evaluate("t + D_at(t^2, t, 3)", {"t": 100.0}) == (106.0, None)


def test_constant_expression_with_wrt():
    assert evaluate("3", {"x": 1.0}, "x") == (3.0, 0.0)


def test_ieee_results_are_not_errors():
    v, d = evaluate("log(x)", {"x": -1.0}, "x")
    assert math.isnan(v)
    v, _ = evaluate("1/x", {"x": 0.0})
    assert v == math.inf


def test_gradient():
    v, g = evaluate_gradient("x1*x2 + sin(x1)", {"x1": PI, "x2": 2.0}, ["x1", "x2"])
    assert rel_close(v, 2 * PI, 1e-12)
    assert rel_close(g["x1"], 1.0, 1e-12)
    assert rel_close(g["x2"], PI, 1e-12)


def test_second_matches_library_bit_for_bit():
    src = "x^2*cos(x) + D_at(exp(t^2), t, x^3)"
    got = evaluate_second(src, {"x": 0.7}, "x")
    want = second_derivative(
        lambda x: x**2 * sc.cos(x) + nested_derivative(lambda t: sc.exp(t**2), x**3), 0.7
    )
    assert got == want


CORPUS = [
    "x^2*cos(x)",
    "x*y + sin(x)",
    "exp(x)/(1 + x^2)",
    "sqrt(x*x + y) - log(x + 3)",
    "tan(x/3)^3 - 2^x",
    "-x^-2 + y^x",
]

LIBRARY_FORMS = {
    "x^2*cos(x)": lambda x, y: x**2 * sc.cos(x),
    "x*y + sin(x)": lambda x, y: x * y + sc.sin(x),
    "exp(x)/(1 + x^2)": lambda x, y: sc.exp(x) / (1 + x**2),
    "sqrt(x*x + y) - log(x + 3)": lambda x, y: sc.sqrt(x * x + y) - sc.log(x + 3),
    "tan(x/3)^3 - 2^x": lambda x, y: sc.tan(x / 3) ** 3 - 2**x,
    "-x^-2 + y^x": lambda x, y: -(x**-2) + y**x,
}


@pytest.mark.parametrize("src", CORPUS)
@pytest.mark.parametrize("x", [0.3, 1.7, 2.9])
def test_D_is_the_derivative_depth_shifted(src, x):
    b = {"x": x, "y": 1.3}
    _, d = evaluate(src, b, "x")
    inner, _ = evaluate(f"D({src}, x)", b)
    assert inner == d


@pytest.mark.parametrize("src", CORPUS)
@pytest.mark.parametrize("x", [0.3, 1.7, 2.9])
def test_evaluate_matches_differentiate(src, x):
    v, d = evaluate(src, {"x": x, "y": 1.3}, "x")
    f = LIBRARY_FORMS[src]
    v2, d2 = sc.differentiate(lambda t: f(t, sc.lift(1.3)), x)
    assert rel_close(v, v2, 1e-12) and rel_close(d, d2, 1e-12)


def test_second_derivative_of_nested_example():
    # f'' = 2 + g''(x^3) 6x + g'''(x^3) 9x^4 with g''' = (8u^3 + 12u) e^{u^2}; at x=1: 2 + 216e
    v, d1, d2 = evaluate_second("x^2 + D_at(exp(t^2), t, x^3)", {"x": 1.0}, "x")
    assert rel_close(d1, 2 + 18 * E, 1e-12)
    assert rel_close(d2, 2 + 216 * E, 1e-12)
