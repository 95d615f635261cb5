import math

import numpy as np
import pytest

from rising_gue import exceptions as ex
from rising_gue.configuration import Configuration, interlaces, semicircle_quantiles
from rising_gue.special_fns import semicircle_cdf


def test_configuration_normalizes_to_floats():
    cfg = Configuration((3, 1, -2))

    assert cfg.values == (3.0, 1.0, -2.0)
    assert cfg.m == len(cfg) == 3
    assert list(cfg) == [3.0, 1.0, -2.0]
    assert cfg[1] == 1.0
    assert cfg.min_gap() == 2.0
    np.testing.assert_array_equal(cfg.as_array(), [3.0, 1.0, -2.0])


@pytest.mark.parametrize(
    "values",
    [(1.0, 2.0), (1.0, 1.0), (0.0, math.nan), (math.inf, 0.0), (3.0, 1.0, 2.0)],
)
def test_invalid_configurations(values: tuple):
    with pytest.raises(ex.InvalidConfiguration) as e:
        Configuration(values)

    assert len(e.value.values) == len(values)


def test_from_unsorted():
    assert Configuration.from_unsorted([-1, 4, 0.5]).values == (4.0, 0.5, -1.0)


@pytest.mark.parametrize("values", [(), (0.0,)])
def test_small_configurations_have_no_gap(values: tuple):
    assert Configuration(values).min_gap() == math.inf


@pytest.mark.parametrize(
    "lower, upper, expected",
    [
        ([], [0.0], True),
        ([0.5], [1.0, -1.0], True),
        ([1.0], [1.0, -1.0], True),
        ([2.0], [1.0, -1.0], False),
        ([0.5, -0.5], [1.0, 0.0, -1.0], True),
        ([0.5, 0.5], [1.0, 0.0, -1.0], False),
        ([0.5], [1.0, 0.0, -1.0], False),
    ],
)
def test_interlaces(lower: list, upper: list, expected: bool):
    assert interlaces(lower, upper) is expected


@pytest.mark.parametrize("m", [1, 2, 5, 40])
def test_semicircle_quantiles(m: int):
    cfg = semicircle_quantiles(m)

    assert cfg.m == m
    assert sum(cfg) == pytest.approx(0.0, abs=1e-9)
    levels = semicircle_cdf(cfg.as_array() / math.sqrt(m))
    expected = (m - np.arange(1, m + 1) + 0.5) / m
    np.testing.assert_allclose(levels, expected, atol=1e-10)
    assert max(abs(v) for v in cfg) < 2 * math.sqrt(m)


def test_semicircle_quantiles_edge_cases():
    assert semicircle_quantiles(0).values == ()
    assert semicircle_quantiles(1).values == pytest.approx((0.0,), abs=1e-12)

    with pytest.raises(ex.ConfigError):
        semicircle_quantiles(-1)
