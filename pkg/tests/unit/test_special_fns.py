import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammaln

from rising_gue import exceptions
from rising_gue.special_fns import (
    elem_symmetric,
    elem_symmetric_all,
    hermite_eval,
    hermite_explicit_sum,
    hermite_normalized_table,
    hermite_shift_expand,
    hermite_table,
    log_pochhammer,
    log_pochhammer_complex,
    semicircle,
    semicircle_cdf,
    semicircle_density,
)


@pytest.mark.parametrize(
    "n, x, expected",
    [
        (0, 0.3, 1.0),
        (1, 0.3, 0.3),
        (2, 2.0, 3.0),
        (3, 2.0, 2.0),
        (4, 1.0, -2.0),
        (5, 0.0, 0.0),
        (6, 0.0, -15.0),
    ],
)
def test_hermite_values(n: int, x: float, expected: float):
    assert hermite_eval(n, x) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("n", range(13))
@pytest.mark.parametrize("x", [-2.7, -0.4, 0.0, 1.3, 3.1])
def test_recurrence_matches_explicit_sum(n: int, x: float):
    value = hermite_eval(n, x)

    assert value == pytest.approx(hermite_explicit_sum(n, x), rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_shift_expansion(n: int):
    assert hermite_shift_expand(n, 0.7, -1.9) == pytest.approx(
        hermite_eval(n, 0.7 - 1.9), rel=1e-10, abs=1e-10
    )


def test_hermite_eval_keeps_shape():
    xs = np.linspace(-1, 1, 6).reshape(2, 3)

    res = hermite_eval(3, xs)

    assert res.shape == (2, 3)
    np.testing.assert_allclose(res, xs**3 - 3 * xs)


@pytest.mark.parametrize("n", [-1, -5])
def test_negative_degree(n):
    with pytest.raises(exceptions.IndexOutOfRange) as err:
        hermite_eval(n, 0.0)
    assert err.value.index == n


def test_tables_agree():
    xs = np.array([-1.5, 0.2, 2.5])
    table = hermite_table(10, xs)
    normalized = hermite_normalized_table(10, xs)

    for k in range(11):
        np.testing.assert_allclose(table[k], hermite_eval(k, xs), rtol=1e-13)
        np.testing.assert_allclose(
            normalized[k], table[k] / math.sqrt(math.factorial(k)), rtol=1e-12
        )


def test_normalized_table_is_finite_at_high_degree():
    res = hermite_normalized_table(3000, np.array([0.0, 50.0]))

    assert np.all(np.isfinite(res))


@pytest.mark.parametrize(
    "args, expected",
    [
        ([], [1]),
        ([5], [1, 5]),
        ([1, 2, 3], [1, 6, 11, 6]),
        ([1, -1], [1, 0, -1]),
    ],
)
def test_elem_symmetric_all(args: list, expected: list):
    assert elem_symmetric_all(args) == expected


def test_elem_symmetric_is_exact_for_fractions():
    args = [Fraction(1, 3), Fraction(-1, 2), Fraction(5, 7)]

    assert elem_symmetric(3, args) == Fraction(-5, 42)
    assert elem_symmetric(0, args) == 1
    assert elem_symmetric(4, args) == 0
    assert elem_symmetric(-1, args) == 0


def test_semicircle_is_a_probability_density():
    mass, _ = quad(semicircle_density, -2, 2)

    assert mass == pytest.approx(1.0, abs=1e-10)
    assert semicircle_density(0.0) == pytest.approx(1 / math.pi)
    assert semicircle_density(2.5) == 0.0


@pytest.mark.parametrize(
    "x, expected", [(-3.0, 0.0), (-2.0, 0.0), (0.0, 0.5), (2.0, 1.0), (5.0, 1.0)]
)
def test_semicircle_cdf(x: float, expected: float):
    assert semicircle_cdf(x) == pytest.approx(expected, abs=1e-15)


def test_semicircle_cdf_matches_density():
    mass, _ = quad(semicircle_density, -2, 0.8)
    density, cdf = semicircle(0.8)

    assert cdf == pytest.approx(mass, abs=1e-10)
    assert density == semicircle_density(0.8)


@pytest.mark.parametrize(
    "a, k, expected",
    [
        (0.5, 0, 1.0),
        (0.5, 3, 1.875),
        (-2.5, 3, -1.875),
        (-2.0, 2, 2.0),
        (-0.5, 1, -0.5),
        (3.0, 4, 360.0),
    ],
)
def test_log_pochhammer(a: float, k: int, expected: float):
    assert log_pochhammer(a, k).value == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("a, k", [(-2.0, 3), (0.0, 1), (-7.0, 20)])
def test_log_pochhammer_vanishing_factor(a: float, k: int):
    res = log_pochhammer(a, k)

    assert res.sign == 0
    assert res.value == 0.0


def test_log_pochhammer_long_products():
    res = log_pochhammer(-3.5, 40000)

    expected = gammaln(4.5) - 2 * gammaln(0.5) + gammaln(40000 - 3.5)
    assert res.sign == 1
    assert res.log == pytest.approx(expected, rel=1e-12)


def test_log_pochhammer_negative_length():
    with pytest.raises(exceptions.IndexOutOfRange) as err:
        log_pochhammer(1.0, -1)
    assert err.value.family == "pochhammer"


def test_complex_pochhammer():
    a = 1 + 1j

    res = np.exp(log_pochhammer_complex(a, 3))

    assert res == pytest.approx(a * (a + 1) * (a + 2), rel=1e-13)
    assert log_pochhammer_complex(a, 0) == 0
