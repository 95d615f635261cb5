"""
Evaluators for the correlation kernels of the rising GUE process and of its
limits and relatives:

* the fixed-start kernel as a double contour integral and as the four-term
  sum it resums,
* the fixed-level GUE kernel (double contour and Hermite sum),
* the extended semi-discrete sine kernel and the sine kernel,
* the fixed-top (corners) kernel,
* the bulk rescaling that connects them.

Kernel values are only defined up to gauge; compare them through
:mod:`rising_gue.statistics`.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import exceptions as ex
from .configuration import Configuration, KernelQuery
from .contours import (
    Circle,
    Estimate,
    QuadratureSettings,
    Ray,
    RayPair,
    Segment,
    VerticalLine,
    default_abscissa,
    default_circle_radius,
    extend_half_height,
    integrate_closed,
    integrate_double,
    integrate_segment,
    truncation_half_height,
)
from .eynard_mehta import (
    TERMSUM_MAX_DEPTH,
    TERMSUM_MAX_M,
    fixed_start_terms,
    phi_conv,
)
from .integrands import FixedStartIntegrand
from .parallel import run_ordered
from .special_fns import semicircle_density

log = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2 * math.pi)


###############################################################################
# Queries and parameters
###############################################################################
@dataclass(frozen=True)
class ExtendedSineParams:
    a: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if not self.a.imag > 0:
            raise ex.ConfigError("a", f"Im(a) must be positive, got {self.a}")

    @classmethod
    def from_energy(cls, X: float) -> "ExtendedSineParams":
        """``a(X) = X/2 + i pi rho_sc(X)``"""
        if not abs(X) < 2:
            raise ex.EdgeEnergy(X)
        return cls(complex(X / 2, math.pi * semicircle_density(X)))

    @classmethod
    def from_saddle(cls, z0: complex) -> "ExtendedSineParams":
        """``a = -1/z0`` for a critical point ``z0`` in the upper half-plane."""
        return cls(-1 / complex(z0))


@dataclass(frozen=True)
class BulkScaling:
    """
    Bulk rescaling around energy ``X`` at scale ``n``.

    ``sqrt_n`` places local offset ``x`` at ``X sqrt(n) + x / sqrt(n)`` and
    multiplies kernel values by ``1/sqrt(n)``; ``density`` divides the offset by
    ``rho_sc(X)`` as well and multiplies by
    ``exp(X (x1 - x2) / (2 rho_sc(X))) / (rho_sc(X) sqrt(n))``.

    Raises:
        EdgeEnergy: If ``|X| >= 2``.
    """

    X: float
    n: int
    variant: str = "sqrt_n"

    def __post_init__(self):
        if not abs(self.X) < 2:
            raise ex.EdgeEnergy(self.X)
        if self.n < 1:
            raise ex.ConfigError("n", f"must be at least 1, got {self.n}")
        if self.variant not in ("sqrt_n", "density"):
            raise ex.ConfigError(
                "variant", f"expected 'sqrt_n' or 'density', got {self.variant!r}"
            )

    @property
    def rho(self) -> float:
        return float(semicircle_density(self.X))

    @property
    def unit(self) -> float:
        """Absolute length of one local unit."""
        if self.variant == "density":
            return 1 / (self.rho * math.sqrt(self.n))
        return 1 / math.sqrt(self.n)

    def to_absolute(self, x):
        return self.X * math.sqrt(self.n) + np.asarray(x) * self.unit

    def to_local(self, x):
        return (np.asarray(x) - self.X * math.sqrt(self.n)) / self.unit

    def value_factor(self, x1: float, x2: float) -> float:
        if self.variant == "density":
            return math.exp(self.X * (x1 - x2) / (2 * self.rho)) * self.unit
        return self.unit


@dataclass(frozen=True)
class ValueTransform:
    factor: float

    def __call__(self, value: complex) -> complex:
        return value * self.factor


def rescale_bulk(
    s: BulkScaling, raw_query: KernelQuery
) -> Tuple[KernelQuery, ValueTransform]:
    """
    Maps a query with local offsets to absolute positions, returning the
    absolute query and the transform to apply to the kernel value there.
    Levels are passed through unchanged.
    """
    q = KernelQuery(
        raw_query.n1,
        float(s.to_absolute(raw_query.x1)),
        raw_query.n2,
        float(s.to_absolute(raw_query.x2)),
    )
    return q, ValueTransform(s.value_factor(raw_query.x1, raw_query.x2))


###############################################################################
# Fixed-start kernel
###############################################################################
def _check_fixed_start_levels(cfg: Configuration, q: KernelQuery) -> None:
    if q.n1 <= cfg.m or q.n2 <= cfg.m:
        raise ex.InvalidLevels(q.n1, q.n2, f"n1, n2 > m = {cfg.m}")


def _admissible_abscissa(cfg: Configuration, q: KernelQuery, b: float) -> None:
    blockers = [p for p in list(cfg.values) + [q.x1] if q.x2 < p <= b]
    if not b > q.x2 or blockers:
        raise ex.ConfigError(
            "abscissa",
            f"b = {b} must exceed x2 = {q.x2} without passing {blockers}",
        )


def eval_fixed_start(
    cfg: Configuration,
    q: KernelQuery,
    quad: QuadratureSettings,
    abscissa: Optional[float] = None,
    radius: Optional[float] = None,
) -> Estimate:
    """
    The fixed-start kernel ``K(n1, x1; n2, x2)`` as the double contour integral
    over the line ``Re z = b`` and a circle around ``x1``.

    The ``w`` integrand is regularized as ``(E(z,w) - E(z,z)) / (w - z)``, so
    the result does not depend on whether the circle meets the line, and the
    only pole inside the circle is ``x1``.

    Args:
        cfg: The level-``m`` configuration.
        q: Levels ``n1, n2 > m`` and positions.
        quad: Quadrature settings.
        abscissa: ``b``; defaults to ``x2 + delta``.
        radius: Circle radius; defaults to half the smallest positive distance
            from ``x1`` to the configuration, ``x2`` and ``b``.
    Returns:
        The kernel value as an :class:`Estimate`.
    Raises:
        InvalidLevels, ConfigError, NonConvergence
    """
    _check_fixed_start_levels(cfg, q)
    b = default_abscissa(q.x1, q.x2, cfg.values) if abscissa is None else abscissa
    _admissible_abscissa(cfg, q, b)
    r = default_circle_radius(q.x1, q.x2, cfg.values, b) if radius is None else radius

    integrand = FixedStartIntegrand(cfg.values, q.n1, q.x1, q.n2, q.x2)
    circle = Circle(q.x1, r)
    line = _fixed_start_line(integrand, cfg, q, b, circle, quad)
    log.debug("Fixed-start contours: %s, %s", line, circle)

    value = integrate_double(
        integrand.subtracted(), line, circle, quad, allow_crossing=True
    )
    return Estimate(complex(value) / (4 * math.pi**2), value.error / (4 * math.pi**2))


def _fixed_start_line(
    integrand: FixedStartIntegrand,
    cfg: Configuration,
    q: KernelQuery,
    b: float,
    circle: Circle,
    quad: QuadratureSettings,
) -> VerticalLine:
    degree = max(0, q.n2 - 2 * cfg.m - 1)
    H = truncation_half_height(b, quad.abs_tol, degree)
    w, _ = circle.nodes(4, quad)
    w_peak = float(np.max(integrand.log_b(w).real))
    log_c = integrand.log_c

    def log_abs(z):
        return log_c + integrand.log_a(z).real + w_peak

    H = extend_half_height(log_abs, b, H, math.log(quad.abs_tol) - math.log(100))
    singular = [abs(b - p) for p in list(cfg.values) + [q.x1, q.x2]]
    scale = min([1.0] + [s for s in singular if s > 0])
    return VerticalLine(b, H, scale=scale, degree=degree)


def eval_fixed_start_termsum(
    cfg: Configuration, q: KernelQuery, quad: Optional[QuadratureSettings] = None
) -> float:
    """
    The four-term form of the fixed-start kernel, which the double contour
    form resums. It differs from :func:`eval_fixed_start` by the gauge
    ``(-1)^{n2-n1}``.

    Raises:
        InvalidLevels, SizeLimit: For ``m > 6`` or ``n2 - m > 8``.
    """
    _check_fixed_start_levels(cfg, q)
    if cfg.m > TERMSUM_MAX_M:
        raise ex.SizeLimit("m", cfg.m, TERMSUM_MAX_M)
    if q.n2 - cfg.m > TERMSUM_MAX_DEPTH:
        raise ex.SizeLimit("n2 - m", q.n2 - cfg.m, TERMSUM_MAX_DEPTH)
    return fixed_start_terms(cfg, q.n1, q.x1, q.n2, q.x2).total


def eval_fixed_start_rescaled(
    cfg: Configuration,
    X: float,
    T: int,
    q: KernelQuery,
    quad: QuadratureSettings,
    saddle: Optional[complex] = None,
) -> Estimate:
    """
    ``m^{-1/2} K(m + n1 + T, X sqrt(m) + x1/sqrt(m); m + n2 + T, ...)`` for a
    query ``q`` in local levels and offsets.

    The circle around ``x1`` passes through the critical point
    ``X sqrt(m) + (T/sqrt(m)) z0`` of the action, where ``z0`` is ``saddle``
    (the limit point ``-X/2 + i sqrt(1 - X^2/4)`` when ``None``).

    Raises:
        EdgeEnergy, InvalidLevels
    """
    if not abs(X) < 2:
        raise ex.EdgeEnergy(X)
    m = cfg.m
    if m < 1:
        raise ex.ConfigError("cfg", "the rescaled kernel needs m >= 1")
    if saddle is None:
        saddle = complex(-X / 2, math.sqrt(1 - X * X / 4))
    root = math.sqrt(m)
    absolute = KernelQuery(
        m + q.n1 + T, X * root + q.x1 / root, m + q.n2 + T, X * root + q.x2 / root
    )
    z0 = X * root + (T / root) * saddle
    radius = abs(z0 - absolute.x1)
    log.debug("Rescaled kernel: saddle %s, circle radius %.4f", z0, radius)
    value = eval_fixed_start(cfg, absolute, quad, radius=radius)
    return Estimate(complex(value) / root, value.error / root)


###############################################################################
# Fixed-level GUE kernel
###############################################################################
def gue_level_hermite_sum(n: int, x1, x2):
    """
    ``exp(-x1^2/2) sum_{k<n} h_k(x1) h_k(x2) / (sqrt(2 pi) k!)`` by the
    normalized three-term recurrence with running log scales, so ``n`` and
    ``|x|`` can be in the thousands and tens.
    """
    if n < 1:
        raise ex.InvalidLevels(n, n, "n >= 1")
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    a_prev, a = np.zeros_like(x1), np.ones_like(x1)
    b_prev, b = np.zeros_like(x2), np.ones_like(x2)
    la, lb = -x1 * x1 / 4, -x2 * x2 / 4
    total = np.zeros_like(x1)
    with np.errstate(divide="ignore"):
        for k in range(n):
            total += (
                np.sign(a * b)
                * np.exp(np.log(np.abs(a)) + np.log(np.abs(b)) + la + lb)
            )
            a_prev, a = a, (x1 * a - math.sqrt(k) * a_prev) / math.sqrt(k + 1)
            b_prev, b = b, (x2 * b - math.sqrt(k) * b_prev) / math.sqrt(k + 1)
            for val, prev, scale in ((a, a_prev, la), (b, b_prev, lb)):
                big = np.abs(val) > 1e150
                if np.any(big):
                    val[big] /= 1e150
                    prev[big] /= 1e150
                    scale[big] += math.log(1e150)
    out = total * np.exp((x2 * x2 - x1 * x1) / 4) / SQRT_2PI
    return out if out.ndim else float(out)


def eval_gue_level(
    n: int, x1: float, x2: float, quad: QuadratureSettings
) -> Estimate:
    """
    The fixed-level GUE kernel as the double contour integral

        ``-1/(2 pi i)^2 int dz oint dw exp((z-x2)^2/2 - (w-x1)^2/2)
        (z/w)^n / (w - z)``

    with ``w`` on ``|w| = sqrt(n)`` and ``z`` on a vertical line through the
    saddle points. The ``z`` integrand is entire, so with the regularized
    ``w`` integrand the line position is immaterial.

    Raises:
        InvalidLevels: For ``n < 1``.
    """
    if n < 1:
        raise ex.InvalidLevels(n, n, "n >= 1")
    root = math.sqrt(n)
    c = float(np.clip((x1 + x2) / 4, -0.9 * root, 0.9 * root))
    circle = Circle(0.0, root)

    def log_g(z):
        return (z - x2) ** 2 / 2 + n * np.log(z)

    def log_h(w):
        return -((w - x1) ** 2) / 2 - n * np.log(w)

    def f(z, w):
        lg = log_g(z)
        return (np.exp(lg + log_h(w)) - np.exp(lg + log_h(z))) / (w - z)

    w, _ = circle.nodes(4, quad)
    w_peak = float(np.max(log_h(w).real))
    H = truncation_half_height(c - x2, quad.abs_tol, n)
    H = extend_half_height(
        lambda z: log_g(z).real + w_peak, c, H, math.log(quad.abs_tol) - math.log(100)
    )
    line = VerticalLine(c, H, scale=min(1.0, root))
    value = integrate_double(f, line, circle, quad, allow_crossing=True)
    return Estimate(complex(value) / (4 * math.pi**2), value.error / (4 * math.pi**2))


###############################################################################
# Sine kernels
###############################################################################
def eval_sine(phi: float, x1, x2):
    """
    ``sin(phi (x2 - x1)) / (pi (x2 - x1))``, equal to ``phi / pi`` on the
    diagonal.
    """
    if not phi > 0:
        raise ex.ConfigError("phi", f"slope must be positive, got {phi}")
    d = np.asarray(x2, dtype=float) - np.asarray(x1, dtype=float)
    safe = np.where(d == 0, 1.0, d)
    out = np.where(d == 0, phi / math.pi, np.sin(phi * safe) / (math.pi * safe))
    return out if out.ndim else float(out)


def eval_extended_sine(
    p: ExtendedSineParams,
    q: KernelQuery,
    quad: QuadratureSettings,
    method: str = "deformed",
) -> complex:
    """
    The extended semi-discrete sine kernel with parameter ``a``.

    For ``n1 >= n2`` the segment integral from ``conj(a)`` to ``a``. For
    ``n2 > n1`` the symmetric ray-pair limit on ``Re z = Re a``; ``deformed``
    swings both rays to horizontal ones along which the integrand decays
    exponentially, ``ray_pair`` truncates the vertical rays at two heights and
    extrapolates. At ``x1 = x2`` the ray pair is integrated in closed form.

    Raises:
        ConfigError: For an unknown method.
    """
    if method not in ("deformed", "ray_pair"):
        raise ex.ConfigError(
            "method", f"expected 'deformed' or 'ray_pair', got {method!r}"
        )
    a = p.a
    power = q.n1 - q.n2
    delta = q.x2 - q.x1

    def f(z):
        return z**power * np.exp(z * delta)

    if power >= 0:
        value = integrate_segment(f, Segment(a.conjugate(), a), quad)
        return complex(value) / (2j * math.pi)

    k = -power
    if delta == 0:
        if k == 1:
            return -0.5 + math.atan2(a.imag, a.real) / math.pi
        F = lambda z: z ** (1 - k) / (1 - k)  # noqa: E731
        J = F(a.conjugate()) - F(a)
    elif method == "deformed":
        J = _deformed_rays(f, a, k, delta, quad)
    else:
        J = _ray_pair_limit(f, a, k, delta, quad)
    return -complex(J) / (2j * math.pi)


def _deformed_rays(f, a: complex, k: int, delta: float, quad: QuadratureSettings):
    direction = -math.copysign(1.0, delta)
    length = (40 + max(0.0, -k * math.log(a.imag))) / abs(delta)
    scale = min(abs(a), 1 / abs(delta))
    upper = integrate_segment(f, Ray(a, direction, length, scale), quad)
    lower = integrate_segment(f, Ray(a.conjugate(), direction, length, scale), quad)
    return complex(upper) - complex(lower)


def _ray_pair_limit(f, a: complex, k: int, delta: float, quad: QuadratureSettings):
    """
    Truncations at heights ``L = 2 pi j / |delta|`` share the phase of the
    oscillating tail, which then behaves like ``A L^{-k}`` and is removed by
    Richardson extrapolation between ``j`` and ``2 j``.
    """
    period = 2 * math.pi / abs(delta)
    floor = 50 * (1 + abs(a.real) + a.imag)
    target = max(floor, min(quad.abs_tol ** (-1 / (k + 1)), 1e4))
    j1 = max(1, math.ceil(target / period))
    L1, L2 = j1 * period, 2 * j1 * period
    max_panels = max(quad.max_panels, 8192)
    wide = replace(
        quad,
        max_panels=max_panels,
        initial_panels=min(max(quad.initial_panels, 2 * j1), max_panels // 2),
    )
    I1 = complex(integrate_segment(f, RayPair(a.real, a.imag, L1), wide))
    I2 = complex(integrate_segment(f, RayPair(a.real, a.imag, L2), wide))
    log.debug("Ray pair truncations %.1f, %.1f: %s, %s", L1, L2, I1, I2)
    return (L2**k * I2 - L1**k * I1) / (L2**k - L1**k)


###############################################################################
# Fixed-top kernel
###############################################################################
def eval_metcalfe(
    cfg: Configuration, q: KernelQuery, quad: QuadratureSettings
) -> float:
    """
    The kernel of the corners process below a fixed top row ``cfg``,

        ``-phi^{(n1,n2)}(x1,x2) + C sum_{x_k >= x1} (x_k - x1)^{m-n1-1}
        / prod_{r != k} (x_k - x_r) * (1/2 pi i) oint_{c(x2)}
        prod_{r != k} (w - x_r) / (w - x2)^{m-n2+1} dw``

    with ``C = (m-n2)! / (m-n1-1)!``: the ``z`` integral is done by residues
    at the top-row points, the ``w`` integral on a circle around ``x2``.

    Raises:
        InvalidLevels: Unless ``1 <= n1 <= m-1`` and ``1 <= n2 <= m``.
    """
    m = cfg.m
    if not (1 <= q.n1 <= m - 1 and 1 <= q.n2 <= m):
        raise ex.InvalidLevels(q.n1, q.n2, f"1 <= n1 <= {m - 1}, 1 <= n2 <= {m}")
    pts = cfg.as_array()
    C = math.factorial(m - q.n2) / math.factorial(m - q.n1 - 1)
    radius = max(1.0, float(np.ptp(pts)) / 2) if m > 1 else 1.0
    circle = Circle(q.x2, radius)

    total = 0.0
    for k, xk in enumerate(pts):
        if xk < q.x1:
            continue
        others = np.delete(pts, k)

        def f(w, others=others):
            return np.prod(w[:, None] - others[None, :], axis=1) / (w - q.x2) ** (
                m - q.n2 + 1
            )

        contour = complex(integrate_closed(f, circle, quad)) / (2j * math.pi)
        weight = (xk - q.x1) ** (m - q.n1 - 1) / float(np.prod(xk - others))
        total += weight * contour.real
    return -float(phi_conv(q.n1, q.n2, q.x1, q.x2)) + C * total


###############################################################################
# Kernel callables and grids
###############################################################################
@dataclass(frozen=True)
class FixedStartKernel:
    cfg: Configuration
    quad: QuadratureSettings

    def __call__(self, q: KernelQuery) -> complex:
        return eval_fixed_start(self.cfg, q, self.quad)


@dataclass(frozen=True)
class FixedStartTermSumKernel:
    cfg: Configuration

    def __call__(self, q: KernelQuery) -> complex:
        return eval_fixed_start_termsum(self.cfg, q)


@dataclass(frozen=True)
class RescaledFixedStartKernel:
    """Fixed-start kernel in local levels and offsets around ``X``."""

    cfg: Configuration
    X: float
    T: int
    quad: QuadratureSettings
    saddle: Optional[complex] = None

    def __call__(self, q: KernelQuery) -> complex:
        return eval_fixed_start_rescaled(
            self.cfg, self.X, self.T, q, self.quad, self.saddle
        )


@dataclass(frozen=True)
class GUELevelKernel:
    """Fixed-level kernel; levels of the query are ignored."""

    n: int
    quad: QuadratureSettings
    form: str = "contour"

    def __call__(self, q: KernelQuery) -> complex:
        if self.form == "hermite":
            return gue_level_hermite_sum(self.n, q.x1, q.x2)
        return eval_gue_level(self.n, q.x1, q.x2, self.quad)


@dataclass(frozen=True)
class ExtendedSineKernel:
    params: ExtendedSineParams
    quad: QuadratureSettings
    method: str = "deformed"

    def __call__(self, q: KernelQuery) -> complex:
        return eval_extended_sine(self.params, q, self.quad, self.method)


@dataclass(frozen=True)
class SineKernel:
    phi: float = math.pi

    def __call__(self, q: KernelQuery) -> complex:
        return eval_sine(self.phi, q.x1, q.x2)


@dataclass(frozen=True)
class MetcalfeKernel:
    cfg: Configuration
    quad: QuadratureSettings

    def __call__(self, q: KernelQuery) -> complex:
        return eval_metcalfe(self.cfg, q, self.quad)


@dataclass(frozen=True)
class BulkRescaledKernel:
    """Any kernel seen through a :class:`BulkScaling`."""

    kernel: Any
    scaling: BulkScaling

    def __call__(self, q: KernelQuery) -> complex:
        absolute, transform = rescale_bulk(self.scaling, q)
        return transform(self.kernel(absolute))


def grid_queries(
    n1: int, n2: int, xs1: Sequence[float], xs2: Sequence[float]
) -> List[KernelQuery]:
    """All queries ``(n1, x1; n2, x2)`` for ``x1`` in ``xs1``, ``x2`` in ``xs2``."""
    return [KernelQuery(n1, float(a), n2, float(b)) for a in xs1 for b in xs2]


def eval_kernel_grid(
    kernel: Any, queries: Sequence[KernelQuery], workers: int = 1
) -> List[Union[complex, Estimate]]:
    """
    Evaluates a kernel callable on every query, in a process pool when
    ``workers > 1``; results follow the order of ``queries``.
    """
    log.debug("Evaluating %s on %d queries", type(kernel).__name__, len(queries))
    return run_ordered(kernel, list(queries), workers)
