import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from rising_gue import exceptions as ex
from rising_gue.configuration import Configuration
from rising_gue.kernels import KernelQuery
from rising_gue.tiling import (
    DiscreteKernelQuery,
    PolygonSpec,
    _PolygonParts,
    build_polygon_spec,
    dimension,
    discrete_query,
    eval_polygon_kernel,
    level_density_exact,
    limit_configuration,
    limit_position,
    pochhammer_ratio,
    tiling_correlations_exact,
)


@pytest.fixture(scope="module")
def smallest():
    return build_polygon_spec(Configuration(()), 2)


@pytest.fixture(scope="module")
def small():
    return build_polygon_spec(Configuration((0.0,)), 4)


###############################################################################
# Polygon
###############################################################################
def test_polygon_embedding(two_point_cfg):
    spec = build_polygon_spec(two_point_cfg, 100)

    assert spec.A == (-100.5, -8.5, 6.5, 49.5)
    assert spec.B == (-50.5, -7.5, 7.5, 99.5)
    assert spec.interior == (7, -8)
    assert len(spec.top) == spec.N + spec.m
    assert spec.top[0] == 99 and spec.top[-1] == -100
    assert spec.particles(3) == 5
    assert spec.scale == pytest.approx(math.sqrt(50))


@pytest.mark.parametrize("N", [10, 50, 100, 400])
def test_polygon_endpoints(two_point_cfg, N):
    spec = build_polygon_spec(two_point_cfg, N)
    ends = [e for pair in zip(spec.A, spec.B) for e in pair]

    assert sum(b - a for a, b in zip(spec.A, spec.B)) == N + 2
    assert all((e - 0.5).is_integer() for e in ends)
    assert ends == sorted(ends)
    assert (spec.A[0], spec.B[0]) == (-N - 0.5, -N / 2 - 0.5)
    assert (spec.A[-1], spec.B[-1]) == (N / 2 - 0.5, N - 0.5)


@pytest.mark.parametrize(
    "value, N",
    [((0.1, 0.05), 4), ((5.0,), 4), ((0.0, -3.0), 4)],
)
def test_slot_collision(value, N):
    with pytest.raises(ex.SlotCollision) as e:
        build_polygon_spec(Configuration(value), N)

    assert e.value.N == N


@pytest.mark.parametrize("N", [0, 3, 7])
def test_polygon_needs_even_size(two_point_cfg, N):
    with pytest.raises(ex.ConfigError):
        build_polygon_spec(two_point_cfg, N)


@pytest.mark.parametrize(
    "A, B",
    [
        ((-4.5, -0.5), (-2.5, 0.5)),
        ((-4.5, -0.5, 1.5), (-2.5, 0.5, 3.0)),
        ((-4.5, 0.5, -0.5), (-2.5, 1.5, 3.5)),
        ((-4.5, -0.5, 1.5), (-2.5, 0.5, 4.5)),
    ],
)
def test_invalid_polygon_spec(A, B):
    with pytest.raises(ex.ConfigError):
        PolygonSpec(4, 1, A, B)


@pytest.mark.parametrize(
    "value",
    [
        DiscreteKernelQuery(0, 0, 1, 0),
        DiscreteKernelQuery(5, 0, 1, 0),
        DiscreteKernelQuery(1, 0, 4, 0),
        DiscreteKernelQuery(1, 0, 0, 0),
    ],
)
def test_query_range(small, quad, value):
    with pytest.raises(ex.RangeError):
        eval_polygon_kernel(small, value, quad)


def test_unknown_method(small, quad):
    with pytest.raises(ex.ConfigError):
        eval_polygon_kernel(small, DiscreteKernelQuery(1, 0, 1, 0), quad, "other")


###############################################################################
# Kernel
###############################################################################
@pytest.mark.parametrize(
    "n1, x1, n2, x2, expected",
    [
        (5, 3, 2, 1, Fraction(-6)),
        (3, 0, 2, 0, Fraction(-1)),
        (4, 0, 2, 1, Fraction(0)),
        (2, 0, 2, 0, Fraction(0)),
        (2, 0, 3, 0, Fraction(0)),
    ],
)
def test_indicator_term(n1, x1, n2, x2, expected):
    spec = build_polygon_spec(Configuration((0.0,)), 6)
    parts = _PolygonParts(spec, DiscreteKernelQuery(n1, x1, n2, x2))

    assert parts.indicator() == expected


@pytest.mark.parametrize("method", ["residue", "contour"])
@pytest.mark.parametrize(
    "value, expected", [(-2, 0.0), (-1, 1 / 3), (0, 1 / 3), (1, 1 / 3)]
)
def test_smallest_polygon(smallest, quad, method, value, expected):
    q = DiscreteKernelQuery(1, value, 1, value)

    res = eval_polygon_kernel(smallest, q, quad, method)

    assert complex(res) == pytest.approx(expected, abs=1e-9)


def test_smallest_polygon_exact(smallest):
    assert level_density_exact(smallest, 1) == {
        -2: 0,
        -1: Fraction(1, 3),
        0: Fraction(1, 3),
        1: Fraction(1, 3),
    }


@pytest.mark.parametrize("level", [1, 2, 3])
def test_particle_count(small, quad, level):
    queries = [DiscreteKernelQuery(level, x, level, x) for x in range(-4, 4)]

    total = sum(complex(eval_polygon_kernel(small, q, quad)) for q in queries)

    assert total == pytest.approx(small.particles(level), abs=1e-8)


@pytest.mark.parametrize("level", [1, 2, 3])
def test_one_point_densities_match_exact(small, quad, level):
    exact = level_density_exact(small, level)

    for x, p in exact.items():
        q = DiscreteKernelQuery(level, x, level, x)
        assert complex(eval_polygon_kernel(small, q, quad)) == pytest.approx(
            float(p), abs=1e-9
        )


@pytest.mark.parametrize(
    "points",
    [
        [(2, 0), (2, 1)],
        [(3, -1), (2, -1)],
        [(1, 0), (3, 2)],
        [(3, -2), (2, 1), (1, 0)],
    ],
)
def test_correlations_match_exact(small, quad, points):
    K = np.array(
        [
            [
                complex(
                    eval_polygon_kernel(
                        small, DiscreteKernelQuery(n1, x1, n2, x2), quad
                    )
                )
                for n2, x2 in points
            ]
            for n1, x1 in points
        ]
    )

    exact = tiling_correlations_exact(small, points)

    assert np.linalg.det(K) == pytest.approx(float(exact), abs=1e-9)


@pytest.mark.parametrize(
    "q",
    [
        DiscreteKernelQuery(3, 0, 3, 1),
        DiscreteKernelQuery(4, 1, 2, -1),
        DiscreteKernelQuery(2, -2, 4, 0),
        DiscreteKernelQuery(5, 2, 5, 2),
        DiscreteKernelQuery(3, 0, 2, -1),
    ],
)
def test_residue_and_contour_agree(quad, q):
    spec = build_polygon_spec(Configuration((0.0,)), 6)

    residue = eval_polygon_kernel(spec, q, quad, "residue")
    contour = eval_polygon_kernel(spec, q, quad, "contour")

    assert complex(contour) == pytest.approx(complex(residue), abs=1e-7)


def test_contour_radius_independence(quad):
    spec = build_polygon_spec(Configuration((0.0,)), 6)
    q = DiscreteKernelQuery(3, 0, 2, -1)

    a = eval_polygon_kernel(spec, q, quad, "contour")
    b = eval_polygon_kernel(spec, q, quad, "contour", radius=12.0)

    assert complex(a) == pytest.approx(complex(b), abs=1e-7)
    with pytest.raises(ex.ConfigError):
        eval_polygon_kernel(spec, q, quad, "contour", radius=2.0)


###############################################################################
# Pochhammer asymptotics
###############################################################################
def test_pochhammer_ratio():
    z, w = 0.4 + 0.9j, 0.1 - 0.3j

    res = pochhammer_ratio(10_000, z, w)

    assert abs(res - cmath.exp(-(w**2) / 2 + z**2 / 2)) < 1e-2


def test_pochhammer_ratio_improves_with_size():
    z, w = 0.4 + 0.9j, 0.1 - 0.3j
    limit = cmath.exp(-(w**2) / 2 + z**2 / 2)

    errors = [abs(pochhammer_ratio(N, z, w) - limit) for N in (100, 1000, 10_000)]

    assert errors[0] > errors[1] > errors[2]


def test_pochhammer_ratio_needs_even_size():
    with pytest.raises(ex.ConfigError):
        pochhammer_ratio(9, 0j, 0j)


###############################################################################
# Limit toward the fixed-start kernel
###############################################################################
def test_discrete_query(two_point_cfg):
    spec = build_polygon_spec(two_point_cfg, 100)

    d = discrete_query(spec, KernelQuery(2, 0.5, 3, -0.5))

    assert d == DiscreteKernelQuery(100, 3, 99, -4)


def test_limit_positions(two_point_cfg):
    spec = build_polygon_spec(two_point_cfg, 100)

    cfg = limit_configuration(spec)

    assert cfg.m == 2
    assert cfg[0] == pytest.approx(7.5 / math.sqrt(50))
    assert cfg[1] == pytest.approx(-7.5 / math.sqrt(50))
    assert limit_position(spec, 0, 4) == pytest.approx(-0.5 / math.sqrt(50))


###############################################################################
# Exact correlations
###############################################################################
@pytest.mark.parametrize(
    "value, expected",
    [((0,), 1), ((2, 1, 0), 1), ((3, 1, 0), 3), ((4, 2, 0), 8), ((5, 1), 4)],
)
def test_dimension(value, expected):
    assert dimension(value) == expected


def test_dimension_counts_arrays():
    def count(y):
        if len(y) == 1:
            return 1
        ranges = [range(y[i + 1] + 1, y[i] + 1) for i in range(len(y) - 1)]
        return sum(count(x) for x in itertools.product(*ranges))

    for top in [(3, 1, 0), (4, 2, -1), (5, 4, 1, 0)]:
        assert dimension(top) == count(top)


def test_no_constraint_is_certain(small):
    assert tiling_correlations_exact(small, []) == 1


def test_top_level_is_frozen(small):
    assert tiling_correlations_exact(small, [(4, small.top[0])]) == 1
    assert tiling_correlations_exact(small, [(4, -1)]) == 0


@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_exact_densities_sum_to_particle_count(small, level):
    assert sum(level_density_exact(small, level).values()) == small.particles(level)


def test_exact_oracle_limits():
    with pytest.raises(ex.SizeLimit):
        tiling_correlations_exact(build_polygon_spec(Configuration((0.0,)), 10), [])
    with pytest.raises(ex.SizeLimit):
        tiling_correlations_exact(
            build_polygon_spec(Configuration((1.0, -1.0)), 8), []
        )


def test_exact_oracle_levels(small):
    with pytest.raises(ex.RangeError):
        tiling_correlations_exact(small, [(0, 0)])
