import math

import numpy as np
import pytest

from rising_gue import exceptions as ex
from rising_gue.asymptotics import (
    ActionParams,
    check_assumptions,
    default_time,
    derivative_gap,
    eval_action,
    eval_limit_action,
    find_critical_point,
    limit_critical_point,
    local_stats,
    log_upper,
    rigidity_distance,
    saddle_sweep,
    scan_critical_points,
    truncated_stieltjes,
    truncated_stieltjes_reference,
    winding_number,
)
from rising_gue.configuration import Configuration, semicircle_quantiles


@pytest.fixture(scope="module")
def quantiles_200():
    return semicircle_quantiles(200)


@pytest.mark.parametrize(
    "value, expected",
    [
        (1, 0),
        (1j, 0.5j * math.pi),
        (-1, 1j * math.pi),
        (1 + 1j, 0.5 * math.log(2) + 0.25j * math.pi),
    ],
)
def test_log_upper(value, expected):
    assert complex(log_upper(value)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("X", [-1.5, -0.3, 0.0, 0.7, 1.9])
def test_limit_critical_point_is_a_zero(X):
    z0 = limit_critical_point(X)

    assert abs(z0) == pytest.approx(1.0)
    assert z0.imag > 0
    assert abs(eval_limit_action(X, z0, 1)) < 1e-14


def test_action_params():
    p = ActionParams(Configuration((2.0, 0.0, -2.0)), 0.0, 1)

    np.testing.assert_allclose(p.u, [2 * math.sqrt(3), 0.0, -2 * math.sqrt(3)])
    assert p.m == 3
    assert p.ratio == pytest.approx(1 / 3)
    assert p.error_scale == pytest.approx(math.log(3) ** 2 + 1 / 3)


@pytest.mark.parametrize(
    "value, exc",
    [({"X": 2.0, "T": 1}, ex.EdgeEnergy), ({"X": 0.0, "T": 0}, ex.ConfigError)],
)
def test_invalid_action_params(value, exc):
    with pytest.raises(exc):
        ActionParams(Configuration((1.0,)), **value)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_action_derivatives_match_differences(quantiles_200, order):
    p = ActionParams(quantiles_200, 0.4, 9)
    z, h = 0.3 + 0.8j, 1e-5

    below = eval_action(p, z - h, order - 1)
    numeric = (eval_action(p, z + h, order - 1) - below) / (2 * h)

    assert eval_action(p, z, order) == pytest.approx(numeric, rel=1e-6)


def test_limit_action_derivative():
    z, h = -0.2 + 1.3j, 1e-5

    numeric = (eval_limit_action(0.5, z + h) - eval_limit_action(0.5, z - h)) / (2 * h)

    assert eval_limit_action(0.5, z, 1) == pytest.approx(numeric, rel=1e-8)


@pytest.mark.parametrize(
    "X, expected",
    [
        (0.0, 0.5j * math.pi),
        (1.0, 1j * (1 + math.pi / 2)),
        (-1.5, 1j * (math.pi / 2 - 1.5)),
    ],
)
def test_limit_action_constant(X, expected):
    assert eval_limit_action(X, 1j) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("z", [0.5 + 1j, -0.4 + 0.7j, 0.2 + 1.5j])
def test_action_approaches_the_limit_up_to_a_constant(quantiles_200, z):
    p = ActionParams(quantiles_200, 0.0, 9)
    shift = eval_action(p, 1j) - eval_limit_action(0.0, 1j)

    assert abs(eval_action(p, z) - shift - eval_limit_action(0.0, z)) < 0.15


def test_action_rejects_lower_half_plane(quantiles_200):
    p = ActionParams(quantiles_200, 0.0, 9)

    with pytest.raises(ex.LowerHalfPlane):
        eval_action(p, [1j, 0.5])
    with pytest.raises(ex.LowerHalfPlane):
        eval_limit_action(0.0, -1j)


def test_action_order_is_checked(quantiles_200):
    p = ActionParams(quantiles_200, 0.0, 9)

    with pytest.raises(ex.ConfigError):
        eval_action(p, 1j, 4)
    with pytest.raises(ex.ConfigError):
        eval_limit_action(0.0, 1j, 2)


def test_action_is_vectorised(quantiles_200):
    p = ActionParams(quantiles_200, 0.0, 9)
    zs = np.array([1j, 0.5 + 0.5j])

    res = eval_action(p, zs, 1)

    assert res.shape == (2,)
    assert res[1] == pytest.approx(eval_action(p, 0.5 + 0.5j, 1))


def test_derivative_gap_is_small_near_the_limit(quantiles_200):
    p = ActionParams(quantiles_200, 0.0, 9)

    gap = derivative_gap(p, [1j, 0.5 + 1j])

    assert gap.shape == (2,)
    assert np.all(gap < 0.2)


###############################################################################
# Critical points
###############################################################################
@pytest.mark.parametrize("X", [0.0, 0.7, -1.2])
def test_find_critical_point(quantiles_200, X):
    p = ActionParams(quantiles_200, X, default_time(200))

    res = find_critical_point(p)

    assert res.z0.imag > 0
    assert res.residual < 1e-10
    assert abs(eval_action(p, res.z0, 1)) < 1e-9
    assert res.limit_reference == limit_critical_point(X)
    assert res.distance_to_limit < 0.2
    assert res.as_dict()["z0"] == [res.z0.real, res.z0.imag]


def test_critical_point_from_another_start(quantiles_200):
    p = ActionParams(quantiles_200, 0.0, 9)

    a = find_critical_point(p)
    b = find_critical_point(p, start=0.1 + 1.2j)

    assert b.z0 == pytest.approx(a.z0, abs=1e-9)


def test_no_critical_point_in_upper_half_plane():
    p = ActionParams(Configuration(()), 1.0, 1)

    with pytest.raises((ex.NonConvergence, ex.HalfPlaneEscape)):
        find_critical_point(p)


@pytest.mark.parametrize(
    "value, expected",
    [
        (lambda z: z - (0.5 + 0.5j), 1),
        (lambda z: (z - (0.5 + 0.5j)) ** 2, 2),
        (lambda z: 1 / (z - (0.5 + 0.5j)), -1),
        (lambda z: z - (2 + 2j), 0),
        (lambda z: np.exp(z), 0),
    ],
)
def test_winding_number(value, expected):
    assert winding_number(value, 0j, 1 + 1j) == expected


def test_scan_finds_the_newton_critical_point():
    p = ActionParams(semicircle_quantiles(100), 0.3, default_time(100))
    z0 = find_critical_point(p).z0

    found = scan_critical_points(p, cells=30)

    assert sum(w for _, w in found) == 1
    center, _ = found[0]
    assert abs(center - z0) < 0.2


@pytest.mark.parametrize("value, expected", [(1, 1), (100, 7), (1000, 16)])
def test_default_time(value, expected):
    assert default_time(value) == expected


def test_saddle_sweep():
    rows = saddle_sweep([50, 100], [0.0, 0.5])

    assert [(r["m"], r["X"]) for r in rows] == [
        (50, 0.0),
        (50, 0.5),
        (100, 0.0),
        (100, 0.5),
    ]
    assert rows[2]["T"] == 7
    assert all(r["residual"] < 1e-10 for r in rows)


###############################################################################
# Local statistics
###############################################################################
def test_symmetric_stieltjes_sums_vanish(quantiles_200):
    p = ActionParams(quantiles_200, 0.0, 9)

    assert truncated_stieltjes(p, 1.0) == pytest.approx(0.0, abs=1e-9)
    assert truncated_stieltjes_reference(0.0, 0.1) == pytest.approx(0.0, abs=1e-7)


def test_stieltjes_reference_tends_to_principal_value():
    assert truncated_stieltjes_reference(1.0, 1e-5) == pytest.approx(0.5, abs=1e-3)
    assert truncated_stieltjes_reference(0.0, 5.0) == 0.0


@pytest.mark.parametrize("m", [1, 10, 200])
def test_quantile_rigidity(m):
    assert rigidity_distance(semicircle_quantiles(m)) == pytest.approx(
        1 / (2 * m), abs=1e-9
    )


def test_local_stats():
    stats = local_stats(
        semicircle_quantiles(400),
        0.0,
        10,
        {"gauss": lambda u: np.exp(-(u**2))},
        [1.0, 4.0],
    )

    gauss = stats.mu_reference["gauss"]
    assert gauss == pytest.approx(1 / math.sqrt(math.pi), rel=1e-3)
    assert stats.mu["gauss"] == pytest.approx(stats.mu_reference["gauss"], abs=1e-3)
    assert set(stats.d) == {1.0, 4.0}
    assert stats.d[1.0] == pytest.approx(0.0, abs=1e-9)
    assert stats.d_reference[4.0] == pytest.approx(0.0, abs=1e-7)
    assert stats.rigidity == pytest.approx(1 / 800, abs=1e-9)


###############################################################################
# Assumption checks
###############################################################################
@pytest.fixture(scope="module")
def quantiles_1000():
    return semicircle_quantiles(1000)


def test_quantiles_satisfy_the_assumptions(quantiles_1000):
    report = check_assumptions(
        quantiles_1000,
        0.0,
        20,
        D=5,
        Q=100,
        rho_star=0.1,
        rho_upper=1.0,
        R=1.0,
        delta=0.5,
    )

    assert report.passed
    assert [c.name for c in report.clauses] == [
        "local_lower",
        "local_upper",
        "global_upper",
    ]
    assert report.stieltjes_bound == pytest.approx(0.0, abs=1e-9)
    assert report.as_dict()["passed"] is True


def test_too_dense_lower_bound_fails(quantiles_1000):
    report = check_assumptions(
        quantiles_1000,
        0.0,
        20,
        D=5,
        Q=100,
        rho_star=1.0,
        rho_upper=2.0,
        R=1.0,
        delta=0.5,
    )

    assert not report.passed
    lower = report.clause("local_lower")
    assert not lower.passed
    assert lower.value < 5
    assert lower.window[1] - lower.window[0] == pytest.approx(0.005)
    assert report.clause("global_upper").passed


def test_window_must_fit_the_local_range(quantiles_1000):
    with pytest.raises(ex.ConfigError):
        check_assumptions(
            quantiles_1000,
            0.0,
            20,
            D=50,
            Q=20,
            rho_star=0.1,
            rho_upper=1.0,
            R=1.0,
            delta=0.5,
        )
