import math

import numpy as np
import pytest

from rising_gue.asymptotics import (
    ActionParams,
    default_time,
    find_critical_point,
    limit_critical_point,
    truncated_stieltjes,
)
from rising_gue.configuration import semicircle_quantiles
from rising_gue.experiments import converge_errors

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def quantiles_2000():
    return semicircle_quantiles(2000)


@pytest.mark.parametrize("X", [0.0, 0.5, 1.0])
def test_critical_point_is_close_to_its_limit(quantiles_2000, X):
    T = default_time(2000)

    res = find_critical_point(ActionParams(quantiles_2000, X, T))

    assert T == 21
    assert res.residual < 1e-10
    assert abs(res.z0 - limit_critical_point(X)) < 0.05


@pytest.mark.parametrize("X", [0.0, 1.0])
def test_truncated_stieltjes_sum(quantiles_2000, X):
    p = ActionParams(quantiles_2000, X, default_time(2000))

    assert abs(truncated_stieltjes(p, 2.0) - X / 2) < 0.05


def test_sine_kernel_convergence_trend(quad):
    cfg = semicircle_quantiles(1000)
    xs = np.linspace(-2.0, 2.0, 21)

    errors = [
        converge_errors(cfg, 0.0, T, 0, xs, quad, workers=4)["sup_error"]
        for T in (20, 40, 80)
    ]

    assert all(math.isfinite(e) for e in errors)
    assert errors[1] <= 0.9 * errors[0]
    assert errors[2] <= 0.9 * errors[1]
