import numpy as np
import pytest

from sigmafitz.operators import parse_expression
from sigmafitz.utils.errors import EvalError, ExpressionSyntaxError


@pytest.mark.parametrize('source, x, expected', [
    ('max(1-abs(x),0)', 0.0, 1.0),
    ('x', 3.5, 3.5),
    ('1/(1+x^2)', 2.0, 0.2),
    ('1-2*3', 0.0, -5.0),
    ('2^3^2', 0.0, 512.0),
    ('(1+2)*x', 2.0, 6.0),
    ('min(x, 1) + sqrt(4) - exp(0)', 5.0, 2.0),
    ('1.5e1 + .5', 0.0, 15.5),
])
def test_evaluates_examples(source, x, expected):
    assert parse_expression(source)(x) == expected


def test_scalar_in_scalar_out():
    f = parse_expression('x*x')
    assert isinstance(f(3.0), float)
    out = f(np.array([1.0, 2.0]))
    assert isinstance(out, np.ndarray)
    np.testing.assert_array_equal(out, [1.0, 4.0])


def test_constant_expression_broadcasts():
    out = parse_expression('2')(np.zeros(5))
    assert out.shape == (5,)


def test_deterministic(rng):
    xs = rng.uniform(-10.0, 10.0, size=1000)
    a = parse_expression('max(1-abs(x),0) + x^2/3')(xs)
    b = parse_expression('max(1-abs(x),0) + x^2/3')(xs)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize('source, position', [
    ('1+', 2),
    ('x $ 1', 2),
    ('(x', 2),
    ('x x', 2),
    ('foo(x)', 0),
    ('max(x)', 0),
])
def test_syntax_error_position(source, position):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse_expression(source)
    assert excinfo.value.position == position


def test_empty_source():
    with pytest.raises(ExpressionSyntaxError):
        parse_expression('   ')


def test_syntax_error_names_expected_token():
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse_expression('(x')
    assert excinfo.value.expected == "')'"


@pytest.mark.parametrize('source, x', [
    ('1/x', 0.0),
    ('sqrt(x)', -1.0),
    ('x^0.5', -4.0),
    ('exp(x)', 1000.0),
])
def test_domain_errors(source, x):
    with pytest.raises(EvalError):
        parse_expression(source)(x)
