import math
import warnings

import numpy as np
import pytest

from rising_gue import exceptions
from rising_gue.expressions import compile_function, compile_functions, normalize
from rising_gue.special_fns import semicircle_density

XS = np.array([-2.5, -1.0, -0.25, 0.0, 0.5, 1.0, 3.0])


@pytest.mark.parametrize(
    "value, expected",
    [
        ("x", XS),
        ("2 * x + 1", 2 * XS + 1),
        ("x ^ 2", XS**2),
        ("-x ^ 2", -(XS**2)),
        ("exp(-x^2 / 2)", np.exp(-(XS**2) / 2)),
        ("abs(x)", np.abs(XS)),
        ("min(x, 0)", np.minimum(XS, 0)),
        ("max(x, 0)", np.maximum(XS, 0)),
        ("sin(pi * x)", np.sin(math.pi * XS)),
        ("arctan(x) + tanh(x)", np.arctan(XS) + np.tanh(XS)),
        ("semicircle(x)", semicircle_density(XS)),
        ("where(x > 0, x, 0)", np.where(XS > 0, XS, 0.0)),
        ("7", np.full(XS.shape, 7.0)),
    ],
)
def test_arithmetic_functions(value: str, expected: np.ndarray):
    f = compile_function(value)

    np.testing.assert_allclose(f(XS), expected, rtol=1e-15, atol=0)


@pytest.mark.parametrize(
    "value, expected",
    [
        ("abs(x) < 1", [0, 0, 1, 1, 1, 0, 0]),
        ("abs(x) <= 1", [0, 1, 1, 1, 1, 1, 0]),
        ("x == 0", [0, 0, 0, 1, 0, 0, 0]),
        ("x != 0", [1, 1, 1, 0, 1, 1, 1]),
        ("x >= 0 and x < 1", [0, 0, 0, 1, 1, 0, 0]),
        ("x < -2 or x > 2", [1, 0, 0, 0, 0, 0, 1]),
        ("not x > 0", [1, 1, 1, 1, 0, 0, 0]),
        ("true", [1, 1, 1, 1, 1, 1, 1]),
        ("(x > 0) * x", [0, 0, 0, 0, 0.5, 1.0, 3.0]),
    ],
)
def test_indicators_are_zero_one_floats(value: str, expected: list):
    res = compile_function(value)(XS)

    assert res.dtype == float
    np.testing.assert_array_equal(res, expected)


def test_scalar_input_gives_zero_dimensional_array():
    res = compile_function("x + 1")(2.0)

    assert res.shape == ()
    assert float(res) == 3.0


def test_several_variables_broadcast():
    f = compile_function("x * y", variables=("x", "y"))

    res = f(np.array([1.0, 2.0])[:, None], np.array([1.0, 10.0, 100.0]))

    np.testing.assert_array_equal(res, [[1, 10, 100], [2, 20, 200]])


def test_invalid_values_give_nan_without_warnings():
    f = compile_function("log(x)")

    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        res = f(np.array([-1.0, 0.0, 1.0]))

    assert math.isnan(res[0])
    assert res[1] == -np.inf
    assert res[2] == 0.0


def test_unknown_variable():
    with pytest.raises(exceptions.UnknownVariableException) as e:
        compile_function("x + y")

    assert e.value.name == "y"
    assert e.value.allowed == ("x",)


def test_constants_are_not_variables():
    f = compile_function("pi + e", variables=())

    assert float(f()) == pytest.approx(math.pi + math.e)


def test_wrong_number_of_arguments():
    f = compile_function("x")

    with pytest.raises(exceptions.ArgumentCountException):
        f(1.0, 2.0)


def test_compile_functions_keeps_keys():
    funcs = compile_functions({"gauss": "exp(-x^2)", "box": "abs(x) < 1"})

    assert set(funcs) == {"gauss", "box"}
    xs = np.array([0.0, 1.0])
    np.testing.assert_allclose(funcs["gauss"](xs), [1.0, math.exp(-1)])
    np.testing.assert_array_equal(funcs["box"](xs), [1.0, 0.0])


@pytest.mark.parametrize(
    "value, expected",
    [
        ("2*pi*x", "6.283185307179586 * x"),
        ("x*(1+1)", "x * 2.0"),
        ("-x^2", "-x ^ 2"),
        ("(x<1) and true", "x < 1 and true"),
        ("log(-1) * x", "log(-1.0) * x"),
    ],
)
def test_normalize(value, expected):
    assert normalize(value) == expected
