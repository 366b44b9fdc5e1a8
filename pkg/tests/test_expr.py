import numpy as np
import pytest
from numpy.testing import assert_allclose

from gentwist.errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError
from gentwist.expr import BinOp, Call, Coord, Jet2, Neg, Num, eval_array, eval_jet, evaluate, parse, to_text

COORDS = ["x1", "x2", "x3", "x4"]
POINT = np.array([0.3, 0.7, 0.5, 0.2])


def test_product_jet():
    jet = eval_jet(parse("x1*x2", ["x1", "x2"]), [2.0, 3.0])
    assert jet.val == pytest.approx(6.0)
    assert_allclose(jet.grad, [3.0, 2.0])
    assert_allclose(jet.hess, [[0.0, 1.0], [1.0, 0.0]])


def test_cube_jet():
    jet = eval_jet(parse("x1^3", ["x1"]), [2.0])
    assert jet.val == pytest.approx(8.0)
    assert_allclose(jet.grad, [12.0])
    assert_allclose(jet.hess, [[12.0]])


def test_conformal_factor_jet():
    expression = parse("4/(1+x1^2)^2", ["x1"])
    jet = eval_jet(expression, [1.0])
    assert jet.val == pytest.approx(1.0)
    assert_allclose(jet.grad, [-2.0])

    h = 1e-4
    values = [evaluate(expression, [1.0 + step]) for step in (h, 0.0, -h)]
    second = (values[0] - 2 * values[1] + values[2]) / h**2
    assert_allclose(jet.hess, [[second]], atol=1e-5)


def test_transcendental_at_origin():
    assert evaluate(parse("sin(x1)*exp(x2)", ["x1", "x2"]), [0.0, 0.0]) == pytest.approx(0.0)


def test_precedence_and_associativity():
    x1, x2, x3 = Coord("x1", 0), Coord("x2", 1), Coord("x3", 2)
    assert parse("-x1^2", COORDS) == Neg(BinOp("^", x1, Num(2.0)))
    assert parse("x1-x2-x3", COORDS) == BinOp("-", BinOp("-", x1, x2), x3)
    assert parse("x1^x2^x3", COORDS) == BinOp("^", x1, BinOp("^", x2, x3))
    assert parse("x1+x2*x3", COORDS) == BinOp("+", x1, BinOp("*", x2, x3))
    assert parse("sqrt(x1)", COORDS) == Call("sqrt", x1)


@pytest.mark.parametrize(
    "text",
    [
        "sin(x1)*exp(x2)+x3^2",
        "sqrt(1+x1^2)*atan(x2)",
        "log(2+x1*x2)/(1+x3^2)",
        "x1^2.5 - cos(x4)",
        "(1+x1)^x2",
        "4*(1+0.1*x1)/(1+x1^2+x2^2+x3^2+x4^2)^2",
    ],
)
def test_jets_match_finite_differences(text):
    expression = parse(text, COORDS)
    jet = eval_jet(expression, POINT)
    h = 1e-5
    grad = np.zeros(4)
    hess = np.zeros((4, 4))
    for k in range(4):
        step = np.zeros(4)
        step[k] = h
        grad[k] = (evaluate(expression, POINT + step) - evaluate(expression, POINT - step)) / (2 * h)
        hess[:, k] = (eval_jet(expression, POINT + step).grad - eval_jet(expression, POINT - step).grad) / (2 * h)
    assert_allclose(jet.grad, grad, rtol=1e-6, atol=1e-8)
    assert_allclose(jet.hess, hess, rtol=1e-6, atol=1e-7)
    assert_allclose(jet.hess, jet.hess.T, atol=1e-12)


@pytest.mark.parametrize("text", ["x1*x2+3", "-x1^2", "sin(x1)/(1-x2)", "x1^x2^x3", "2.5e-3*x4 - -x1", "atan(-2)"])
def test_printed_text_parses_back(text):
    expression = parse(text, COORDS)
    assert parse(to_text(expression), COORDS) == expression


def test_jet_arithmetic_matches_expressions():
    x = Jet2.coordinate(0, POINT)
    y = Jet2.coordinate(1, POINT)
    combined = (x * y - x.integer_power(3)) / (Jet2.constant(2.0, 4) + y.real_power(0.5))
    expected = eval_jet(parse("(x1*x2 - x1^3)/(2 + x2^0.5)", COORDS), POINT)
    assert combined.val == pytest.approx(expected.val)
    assert_allclose(combined.grad, expected.grad)
    assert_allclose(combined.hess, expected.hess)


def test_array_evaluation_shares_jets():
    x1 = parse("x1^2", COORDS)
    jets = eval_array(np.array([[x1, Num(0.0)], [Num(0.0), x1]], dtype=object), POINT)
    assert jets.val.shape == (2, 2)
    assert jets.grad.shape == (2, 2, 4)
    assert jets.hess.shape == (2, 2, 4, 4)
    assert jets.val[1, 1] == pytest.approx(0.09)
    assert jets.grad[0, 0, 0] == pytest.approx(0.6)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("x1 + x5", COORDS)
    assert info.value.symbol == "x5"
    assert (info.value.line, info.value.column) == (1, 6)


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse("x1 + * x2", COORDS)
    assert (info.value.line, info.value.column) == (1, 6)
    assert "(" in info.value.expected


def test_syntax_error_on_second_line():
    with pytest.raises(ExprSyntaxError) as info:
        parse("x1 +\n  )", COORDS)
    assert (info.value.line, info.value.column) == (2, 3)


@pytest.mark.parametrize("text", ["", "(x1", "x1 x2", "sin x1", "x1 $ 2"])
def test_malformed_text(text):
    with pytest.raises(ExprSyntaxError):
        parse(text, COORDS)


@pytest.mark.parametrize(
    "text, point, reason",
    [
        ("log(x1)", [-1.0], "logarithm"),
        ("sqrt(x1 - 1)", [0.5], "square root"),
        ("1/x1", [0.0], "division by zero"),
        ("x1^-2", [0.0], "division by zero"),
        ("x1^0.5", [-0.25], "non-integer power"),
        ("x1^400", [10.0], "numerical overflow"),
        ("x1^2.5", [1e200], "numerical overflow"),
        ("exp(x1^3)", [20.0], "numerical overflow"),
        ("x1*x1*x1", [1e200], "numerical overflow"),
    ],
)
def test_domain_errors(text, point, reason):
    with pytest.raises(ExprDomainError, match=reason) as info:
        eval_jet(parse(text, ["x1"]), point)
    assert info.value.subexpression


def test_overflow_names_the_subexpression():
    with pytest.raises(ExprDomainError, match="numerical overflow") as info:
        eval_jet(parse("1 + exp(x1^3)", ["x1"]), [20.0])
    assert info.value.subexpression.startswith("exp(")


def test_hessian_is_exactly_symmetric():
    jet = eval_jet(parse("sin(x1*x2) * exp(x3) / (1 + x4^2) + atan(x1 - x2*x4)^3", COORDS), POINT)
    assert np.array_equal(jet.hess, jet.hess.T)
