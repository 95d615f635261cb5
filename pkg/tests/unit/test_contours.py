import math
import pickle

import numpy as np
import pytest

from rising_gue import exceptions as ex
from rising_gue.contours import (
    Circle,
    Estimate,
    InfiniteLine,
    QuadratureSettings,
    Ray,
    RayPair,
    Segment,
    VerticalLine,
    default_abscissa,
    default_circle_radius,
    extend_half_height,
    integrate_closed,
    integrate_contour,
    integrate_double,
    integrate_segment,
    integrate_vertical,
    truncation_half_height,
)
from rising_gue.special_fns import hermite_eval


@pytest.mark.parametrize("n", [0, 1, 3, 8, 12])
@pytest.mark.parametrize("x", [-1.2, 0.0, 2.3])
def test_circle_gives_hermite_generating_function(n: int, x: float, quad):
    def f(z):
        return np.exp(x * z - z**2 / 2) / z ** (n + 1)

    res = integrate_closed(f, Circle(0j, math.sqrt(n + 1)), quad)
    value = res * math.factorial(n) / (2j * math.pi)

    assert value.real == pytest.approx(hermite_eval(n, x), rel=1e-8, abs=1e-8)
    assert abs(value.imag) < 1e-8 * max(1.0, abs(value.real))


def test_clockwise_circle_changes_sign(quad):
    ccw = integrate_closed(lambda z: 1 / z, Circle(0j, 1.0), quad)
    cw = integrate_closed(lambda z: 1 / z, Circle(0j, 1.0, orientation=-1), quad)

    assert complex(ccw) == pytest.approx(2j * math.pi, abs=1e-12)
    assert complex(cw) == pytest.approx(-2j * math.pi, abs=1e-12)


@pytest.mark.parametrize("b", [-1.0, 0.0, 0.7, 2.5])
def test_gaussian_on_vertical_line(b: float, quad):
    res = integrate_vertical(lambda z: np.exp(z**2 / 2), VerticalLine(b), quad)

    assert complex(res) == pytest.approx(1j * math.sqrt(2 * math.pi), abs=1e-9)


def test_short_vertical_line_warns_about_truncation(quad):
    line = VerticalLine(0.0, half_height=1.0)

    with pytest.warns(ex.TruncationWarning):
        integrate_vertical(lambda z: np.exp(z**2 / 2), line, quad)


def test_infinite_line_residue(quad):
    res = integrate_contour(
        lambda z: 1 / ((z - 1) * (z - 3)), InfiniteLine(2.0), quad
    )

    assert complex(res) == pytest.approx(-1j * math.pi, abs=1e-9)


@pytest.mark.parametrize(
    "contour, f, expected",
    [
        (Segment(0j, 1 + 1j), lambda z: z, 1j),
        (Segment(-1 + 0j, 2 + 0j), lambda z: z**2, 3.0),
        (Ray(0j, 1 + 0j, 40.0), lambda z: np.exp(-z), 1.0),
        (Ray(1j, 1j, 60.0, scale=0.5), lambda z: 1 / z**2, -60j / 61),
        (RayPair(0.5, 1.0, 3.0), lambda z: np.ones_like(z), 4j),
    ],
)
def test_segments_and_rays(contour, f, expected, quad):
    assert complex(integrate_segment(f, contour, quad)) == pytest.approx(
        expected, abs=1e-9
    )


def test_double_integral_of_product(quad):
    def f(z, w):
        return 1 / (z * (w - 5))

    res = integrate_double(f, Circle(0j, 1.0), Circle(5 + 0j, 1.0), quad)

    assert complex(res) == pytest.approx(-4 * math.pi**2, abs=1e-9)


def test_double_integral_circle_and_line(quad):
    def f(z, w):
        return np.exp(w**2 / 2) / z

    res = integrate_double(f, Circle(0j, 0.5), VerticalLine(1.0), quad)

    assert complex(res) == pytest.approx(
        2j * math.pi * 1j * math.sqrt(2 * math.pi), abs=1e-8
    )


def test_crossing_contours_are_rejected(quad):
    with pytest.raises(ex.ContourIntersection) as e:
        integrate_double(
            lambda z, w: z * w, Circle(0j, 1.0), VerticalLine(0.5), quad
        )

    assert e.value.abscissa == 0.5
    assert e.value.radius == 1.0


def test_crossing_is_allowed_on_request(quad):
    res = integrate_double(
        lambda z, w: np.exp(w**2 / 2) * z,
        Circle(0j, 1.0),
        VerticalLine(0.5),
        quad,
        allow_crossing=True,
    )

    assert abs(res) < 1e-9


def test_refinement_budget_exhausted():
    q = QuadratureSettings(max_panels=4, initial_panels=4)

    with pytest.raises(ex.NonConvergence) as e:
        integrate_closed(lambda z: 1 / (z - 0.999), Circle(0j, 1.0), q)

    assert "Circle" in e.value.method


@pytest.mark.parametrize("center", [0j, 5.5 + 0j, -2.0 + 0j])
@pytest.mark.parametrize("panels", [1, 4, 32])
def test_circle_nodes_stay_off_the_real_axis(center: complex, panels: int, quad):
    z, _ = Circle(center, 1.5).nodes(panels, quad)

    assert np.min(np.abs(z.imag)) > 0


def test_non_finite_sum_is_rejected(quad):
    def f(z):
        with np.errstate(all="ignore"):
            return 1 / (z - 1)

    with pytest.raises(ex.NonFiniteValue) as e:
        integrate_closed(f, Circle(0j, 1.0, phase=0.0), quad)

    assert e.value.panels == quad.initial_panels


@pytest.mark.parametrize(
    "kwargs",
    [
        {"nodes_per_panel": 5},
        {"nodes_per_panel": 2},
        {"abs_tol": 0.0},
        {"rel_tol": -1e-3},
        {"initial_panels": 0},
        {"max_panels": 2, "initial_panels": 4},
    ],
)
def test_invalid_quadrature_settings(kwargs: dict):
    with pytest.raises(ex.ConfigError):
        QuadratureSettings(**kwargs)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: Circle(0j, 0.0),
        lambda: Circle(0j, 1.0, orientation=2),
        lambda: VerticalLine(0.0, half_height=-1.0),
        lambda: VerticalLine(0.0, scale=0.0),
        lambda: RayPair(0.0, 2.0, 1.0),
        lambda: Ray(0j, 1j, 0.0),
        lambda: InfiniteLine(0.0, scale=-1.0),
    ],
)
def test_invalid_contours(factory):
    with pytest.raises(ex.ConfigError):
        factory()


def test_tightened_settings():
    q = QuadratureSettings().tightened(100.0)

    assert q.abs_tol == pytest.approx(1e-13)
    assert q.rel_tol == pytest.approx(1e-13)
    assert q.tolerance(1e6) == pytest.approx(1e-7)


def test_estimate_carries_error_through_pickling():
    est = Estimate(1 + 2j, 3e-12)

    res = pickle.loads(pickle.dumps(est))

    assert res == 1 + 2j
    assert res.error == 3e-12
    assert "error=3.00e-12" in repr(res)


def test_truncation_height_bounds_the_gaussian():
    H = truncation_half_height(1.0, 1e-11, degree=3)
    z = 1.0 + 1j * H

    assert abs(np.exp(z**2 / 2)) * abs(z) ** 3 < 1e-11 * 1.01


@pytest.mark.parametrize(
    "x1, x2, points, expected",
    [
        (3.0, 0.0, [2.0, -1.0], 1.0),
        (3.0, 0.0, [], 1.5),
        (-5.0, 0.0, [-1.0], 1.0),
        (0.0, 0.0, [1e-5], 1e-3),
    ],
)
def test_default_abscissa(x1, x2, points, expected):
    assert default_abscissa(x1, x2, points) == pytest.approx(x2 + expected)


def test_default_circle_radius():
    assert default_circle_radius(1.0, -1.0, [0.2, 3.0], 0.5) == pytest.approx(0.25)
    assert default_circle_radius(0.0, 0.0, [0.0], 0.0) == 1.0


def test_extend_half_height_reaches_target():
    def log_abs(z):
        return (z**2 / 2).real

    H = extend_half_height(log_abs, 0.0, 1.0, math.log(1e-12))

    assert -(H**2) / 2 + math.log(H) < math.log(1e-12)
    assert extend_half_height(lambda z: np.zeros(2), 0.0, 1.0, -1.0, 50.0) == 50.0
