"""
Uniformly random lozenge tilings of the polygon that embeds a fixed-start
configuration, through their Gelfand-Tsetlin particle picture.

Level ``n`` of the polygon (``1 <= n <= N``) carries ``n + m`` particles on
the integers; the top level ``N`` is frozen to the slots of the
:class:`PolygonSpec`, and consecutive levels interlace as
``y[i+1] < x[i] <= y[i]``. The correlation kernel of the particles is a
double contour integral with Pochhammer products; rescaled by ``sqrt(N/2)``
it converges to the fixed-start kernel up to gauge.
"""

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from . import exceptions as ex
from .configuration import Configuration
from .contours import (
    Circle,
    Estimate,
    InfiniteLine,
    QuadratureSettings,
    integrate_contour,
    integrate_double,
)
from .kernels import KernelQuery, eval_fixed_start
from .parallel import run_ordered
from .special_fns import SignedLog, log_pochhammer, log_pochhammer_complex
from .statistics import KernelDistanceReport, compare_kernel_matrices

log = logging.getLogger(__name__)

METHODS = ("residue", "contour")
EXACT_MAX_N = 8
EXACT_MAX_M = 1


###############################################################################
# Polygon
###############################################################################
@dataclass(frozen=True)
class PolygonSpec:
    """
    The top-level slots ``(A_i, B_i)`` of the polygon, half-integers with
    ``A_1 < B_1 < ... < A_{m+2} < B_{m+2}``; the frozen top particles are the
    integers inside them.

    Raises:
        ConfigError: For odd ``N``, non half-integer or unordered endpoints,
            or a total slot width other than ``N + m``.
    """

    N: int
    m: int
    A: Tuple[float, ...]
    B: Tuple[float, ...]
    top: Tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 2 or self.N % 2:
            raise ex.ConfigError("N", f"must be a positive even integer, got {self.N}")
        if not len(self.A) == len(self.B) == self.m + 2:
            raise ex.ConfigError("A/B", f"need {self.m + 2} slots")
        ends = [e for pair in zip(self.A, self.B) for e in pair]
        if any(not (e - 0.5).is_integer() for e in ends):
            raise ex.ConfigError("A/B", "endpoints must be half-integers")
        if any(lo >= hi for lo, hi in zip(ends, ends[1:])):
            raise ex.ConfigError("A/B", f"endpoints not increasing: {ends}")
        width = sum(b - a for a, b in zip(self.A, self.B))
        if width != self.N + self.m:
            raise ex.ConfigError("A/B", f"slot widths sum to {width}, not N + m")

        top = [
            int(x)
            for a, b in zip(self.A, self.B)
            for x in range(int(a + 0.5), int(b + 0.5))
        ]
        object.__setattr__(self, "top", tuple(sorted(top, reverse=True)))

    @property
    def scale(self) -> float:
        """``sqrt(N/2)``, lattice units per unit of GUE position."""
        return math.sqrt(self.N / 2)

    @property
    def interior(self) -> Tuple[int, ...]:
        """The lattice sites of the configuration points, largest first."""
        return tuple(int(a + 0.5) for a in reversed(self.A[1:-1]))

    def particles(self, n: int) -> int:
        return n + self.m


def build_polygon_spec(cfg: Configuration, N: int) -> PolygonSpec:
    """
    Embeds ``cfg`` into the polygon of size ``N``: two outer slots of width
    ``N/2`` and one unit slot at ``floor(sqrt(N/2) * x)`` per configuration
    point.

    Raises:
        ConfigError: For odd ``N``.
        SlotCollision: When two points share a lattice site or a site falls
            outside ``[-N/2, N/2 - 1]``.
    """
    if N < 2 or N % 2:
        raise ex.ConfigError("N", f"must be a positive even integer, got {N}")
    s = math.sqrt(N / 2)
    sites = [math.floor(s * x) for x in reversed(cfg.values)]
    for i, p in enumerate(sites):
        if not -N // 2 <= p <= N // 2 - 1 or (i and p <= sites[i - 1]):
            raise ex.SlotCollision(N, p)

    A = (-N - 0.5,) + tuple(p - 0.5 for p in sites) + (N / 2 - 0.5,)
    B = (-N / 2 - 0.5,) + tuple(p + 0.5 for p in sites) + (N - 0.5,)
    return PolygonSpec(N, cfg.m, A, B)


@dataclass(frozen=True)
class DiscreteKernelQuery:
    n1: int
    x1: int
    n2: int
    x2: int

    def check(self, spec: PolygonSpec) -> None:
        """
        Raises:
            RangeError: Unless ``1 <= n1 <= N`` and ``1 <= n2 <= N - 1``.
        """
        if not 1 <= self.n1 <= spec.N:
            raise ex.RangeError("n1", self.n1, 1, spec.N)
        if not 1 <= self.n2 <= spec.N - 1:
            raise ex.RangeError("n2", self.n2, 1, spec.N - 1)


###############################################################################
# Kernel
###############################################################################
class _PolygonParts:
    """
    The pieces of the kernel integrand

        C * G(z) Q(w) / (H(w) Q(z) (w - z))

    with ``G(z) = prod_{l=1}^{N-n2-1} (z - x2 + l)``,
    ``H(w) = prod_{l=0}^{N-n1} (w - x1 + l)``,
    ``Q(u) = prod_{top} (t - u)`` and ``C = (N-n1)! / (N-n2-1)!``.
    """

    def __init__(self, spec: PolygonSpec, q: DiscreteKernelQuery):
        self.spec = spec
        self.q = q
        self.g_len = spec.N - q.n2 - 1
        self.h_len = spec.N - q.n1 + 1
        self.log_c = float(gammaln(spec.N - q.n1 + 1) - gammaln(self.g_len + 1))
        self.h_zeros = [q.x1 - k for k in range(self.h_len)]
        self._top = set(spec.top)

    def log_g(self, z: np.ndarray) -> np.ndarray:
        return log_pochhammer_complex(z - self.q.x2 + 1, self.g_len)

    def log_h(self, w: np.ndarray) -> np.ndarray:
        return log_pochhammer_complex(w - self.q.x1, self.h_len)

    def log_q(self, u: np.ndarray) -> np.ndarray:
        N, u = self.spec.N, np.asarray(u, dtype=complex)
        out = log_pochhammer_complex(-N - u, N // 2)
        out = out + log_pochhammer_complex(N // 2 - u, N // 2)
        for p in self.spec.interior:
            out = out + np.log(p - u)
        return out

    def signed_log_q(self, a: int) -> SignedLog:
        if a in self._top:
            return SignedLog(-math.inf, 0)
        N = self.spec.N
        parts = [log_pochhammer(-N - a, N // 2), log_pochhammer(N // 2 - a, N // 2)]
        parts += [
            SignedLog(math.log(abs(p - a)), 1 if p > a else -1)
            for p in self.spec.interior
        ]
        return SignedLog(
            sum(p.log for p in parts), int(np.prod([p.sign for p in parts]))
        )

    def signed_log_h_prime(self, k: int) -> SignedLog:
        """``H'`` at its zero ``x1 - k``: ``(-1)^k k! (h_len - 1 - k)!``."""
        return SignedLog(
            float(gammaln(k + 1) + gammaln(self.h_len - k)), -1 if k % 2 else 1
        )

    def indicator(self) -> Fraction:
        """``-(x1 - x2 + 1)_{n1-n2-1} / (n1-n2-1)!`` when ``n2 < n1``, ``x2 <= x1``."""
        q = self.q
        d = q.n1 - q.n2
        if d <= 0 or q.x2 > q.x1:
            return Fraction(0)
        num = math.prod(q.x1 - q.x2 + k for k in range(1, d))
        return -Fraction(num, math.factorial(d - 1))

    def exact_terms(self) -> Fraction:
        """
        The indicator term plus ``C * sum G(a) / H'(a)`` over the zeros
        ``a >= x2`` of ``H``, in exact arithmetic.
        """
        q = self.q
        boundary = Fraction(0)
        for k, a in enumerate(self.h_zeros):
            if a < q.x2:
                break
            g = math.prod(a - q.x2 + j for j in range(1, self.g_len + 1))
            h_prime = math.factorial(k) * math.factorial(self.h_len - 1 - k)
            boundary += Fraction(-g if k % 2 else g, h_prime)
        c = Fraction(math.factorial(self.spec.N - q.n1), math.factorial(self.g_len))
        return self.indicator() + c * boundary


def eval_polygon_kernel(
    spec: PolygonSpec,
    q: DiscreteKernelQuery,
    quad: QuadratureSettings,
    method: str = "residue",
    radius: Optional[float] = None,
) -> Estimate:
    """
    The polygon kernel ``K(n1, x1; n2, x2)``.

    The ``z`` contour encloses exactly the frozen top particles ``>= x2`` and
    the ``w`` contour encloses it together with ``x1, x1 - 1, ..., x1 - N + n1``.

    Args:
        spec: The polygon.
        q: The query.
        quad: Quadrature settings.
        method: ``"residue"`` sums the ``w`` residues exactly and opens the
            ``z`` contour into the line ``Re z = x2 - 1/2``, picking up the
            finitely many residues it crosses in exact arithmetic;
            ``"contour"`` integrates over two nested circles and is only
            usable for small ``N``.
        radius: Radius of the ``w`` circle for ``"contour"``.
    Raises:
        RangeError, ConfigError, NonConvergence
    """
    q.check(spec)
    if method not in METHODS:
        raise ex.ConfigError("method", f"unknown method {method!r}")
    parts = _PolygonParts(spec, q)
    exact = parts.exact_terms()
    if method == "residue":
        value = _line_integral(parts, quad)
        log.debug("Polygon kernel at %s: exact part %s", q, exact)
        return Estimate(float(exact) + complex(value), value.error)

    value = _nested_circles(parts, quad, radius)
    return Estimate(float(parts.indicator()) + complex(value), value.error)


def _line_integral(parts: _PolygonParts, quad: QuadratureSettings) -> Estimate:
    """
    ``-(1 / 2 pi i) * int C G(z) R(z) / Q(z) dz`` upwards along
    ``Re z = x2 - 1/2`` with ``R(z) = sum_a Q(a) / (H'(a) (a - z))`` over the
    zeros of ``H`` that are not top particles.
    """
    a_vals, a_logs, a_signs = [], [], []
    for k, a in enumerate(parts.h_zeros):
        qa = parts.signed_log_q(a)
        if qa.sign == 0:
            continue
        hp = parts.signed_log_h_prime(k)
        a_vals.append(a)
        a_logs.append(qa.log - hp.log)
        a_signs.append(qa.sign * hp.sign)
    if not a_vals:
        return Estimate(0.0, 0.0)

    av = np.array(a_vals, dtype=float)
    al = np.array(a_logs) + parts.log_c
    asg = np.array(a_signs, dtype=float)

    def f(z: np.ndarray) -> np.ndarray:
        lz = parts.log_g(z) - parts.log_q(z)
        terms = asg * np.exp(al[None, :] + lz[:, None]) / (av[None, :] - z[:, None])
        return terms.sum(axis=1)

    line = InfiniteLine(parts.q.x2 - 0.5, max(1.0, parts.spec.scale))
    value = integrate_contour(f, line, quad)
    factor = -1 / (2j * math.pi)
    return Estimate(complex(value) * factor, value.error / (2 * math.pi))


def _nested_circles(
    parts: _PolygonParts, quad: QuadratureSettings, radius: Optional[float]
) -> Estimate:
    spec, q = parts.spec, parts.q
    upper = [t for t in spec.top if t >= q.x2]
    if not upper:
        return Estimate(0.0, 0.0)
    lo, hi = q.x2 - 0.5, max(upper) + 0.5
    z_circle = Circle((lo + hi) / 2, (hi - lo) / 2)

    outer = max(abs(lo), abs(hi), abs(q.x1) + 1, abs(q.x1 - spec.N + q.n1) + 1)
    R = max(spec.N + 1, outer) + 0.5 if radius is None else radius
    if not R > outer:
        raise ex.ConfigError("radius", f"w circle of radius {R} must exceed {outer}")
    w_circle = Circle(0.0, R)

    def f(z: np.ndarray, w: np.ndarray) -> np.ndarray:
        lz = parts.log_g(z) - parts.log_q(z)
        lw = parts.log_q(w) - parts.log_h(w)
        return np.exp(parts.log_c + lz + lw) / (w - z)

    value = integrate_double(f, z_circle, w_circle, quad)
    factor = -1 / (4 * math.pi**2)
    return Estimate(complex(value) * factor, value.error / (4 * math.pi**2))


@dataclass(frozen=True)
class PolygonKernel:
    spec: PolygonSpec
    quad: QuadratureSettings
    method: str = "residue"

    def __call__(self, q: DiscreteKernelQuery) -> complex:
        return eval_polygon_kernel(self.spec, q, self.quad, self.method)


###############################################################################
# Pochhammer asymptotics
###############################################################################
def pochhammer_ratio(N: int, z: complex, w: complex) -> complex:
    """
    ``(-N - w s)_{N/2} (N/2 - w s)_{N/2} / ((-N - z s)_{N/2} (N/2 - z s)_{N/2})``
    with ``s = sqrt(N/2)``, which tends to ``exp(-w^2/2 + z^2/2)``.
    """
    if N < 2 or N % 2:
        raise ex.ConfigError("N", f"must be a positive even integer, got {N}")
    s, k = math.sqrt(N / 2), N // 2

    def log_side(u: complex) -> complex:
        u = complex(u) * s
        return complex(
            log_pochhammer_complex(-N - u, k) + log_pochhammer_complex(k - u, k)
        )

    return complex(np.exp(log_side(w) - log_side(z)))


###############################################################################
# Limit toward the fixed-start kernel
###############################################################################
def lattice_site(spec: PolygonSpec, x: float) -> int:
    return math.floor(spec.scale * x)


def limit_position(spec: PolygonSpec, site: int, level: int) -> float:
    """
    The GUE position a lattice site at GUE level ``level`` stands for,
    corrected for the half-site offset of the Gaussian factor and the
    level-dependent offset of the products.
    """
    return (site + 0.5 - (level - spec.m) / 2) / spec.scale


def limit_configuration(spec: PolygonSpec) -> Configuration:
    return Configuration(tuple(limit_position(spec, p, spec.m) for p in spec.interior))


def discrete_query(spec: PolygonSpec, q: KernelQuery) -> DiscreteKernelQuery:
    """Maps GUE levels ``n > m`` and positions onto the polygon."""
    top = spec.N + spec.m
    return DiscreteKernelQuery(
        top - q.n1, lattice_site(spec, q.x1), top - q.n2, lattice_site(spec, q.x2)
    )


@dataclass(frozen=True)
class RescaledPolygonKernel:
    """``sqrt(N/2) K_P`` in GUE levels and positions."""

    spec: PolygonSpec
    quad: QuadratureSettings
    method: str = "residue"

    def __call__(self, q: KernelQuery) -> complex:
        d = discrete_query(self.spec, q)
        return self.spec.scale * complex(
            eval_polygon_kernel(self.spec, d, self.quad, self.method)
        )


def tiling_limit_distance(
    cfg: Configuration,
    N: int,
    points: Sequence[Tuple[int, float]],
    quad: QuadratureSettings,
    method: str = "residue",
) -> KernelDistanceReport:
    """
    Gauge-invariant distance between the rescaled polygon kernel and the
    fixed-start kernel of the discretized configuration, on GUE points
    ``(level, position)``.
    """
    spec = build_polygon_spec(cfg, N)
    polygon = RescaledPolygonKernel(spec, quad, method)
    limit_cfg = limit_configuration(spec)
    mapped = [
        (n, limit_position(spec, lattice_site(spec, x), n)) for n, x in points
    ]
    n = len(points)
    A = np.empty((n, n), dtype=complex)
    B = np.empty((n, n), dtype=complex)
    for i, j in itertools.product(range(n), repeat=2):
        (n1, x1), (n2, x2) = points[i], points[j]
        A[i, j] = polygon(KernelQuery(n1, x1, n2, x2))
        (_, y1), (_, y2) = mapped[i], mapped[j]
        limit_query = KernelQuery(n1, y1, n2, y2)
        B[i, j] = complex(eval_fixed_start(limit_cfg, limit_query, quad))
    return compare_kernel_matrices(A, B, points)


@dataclass(frozen=True)
class TilingSweepRow:
    N: int
    report: KernelDistanceReport

    def as_dict(self) -> Dict[str, Any]:
        return {"N": self.N, **self.report.as_dict()}


def _sweep_job(job: Tuple[Configuration, int, Tuple, QuadratureSettings, str]):
    cfg, N, points, quad, method = job
    return TilingSweepRow(N, tiling_limit_distance(cfg, N, points, quad, method))


def tiling_sweep(
    cfg: Configuration,
    Ns: Sequence[int],
    points: Sequence[Tuple[int, float]],
    quad: QuadratureSettings,
    method: str = "residue",
    workers: int = 1,
) -> List[TilingSweepRow]:
    """:func:`tiling_limit_distance` for each ``N``, in parallel over ``N``."""
    jobs = [(cfg, N, tuple(points), quad, method) for N in Ns]
    rows = run_ordered(_sweep_job, jobs, workers)
    for row in rows:
        log.info("N = %d: distance %.3e", row.N, row.report.max_deviation)
    return rows


###############################################################################
# Exact correlations
###############################################################################
def dimension(x: Sequence[int]) -> int:
    """
    Number of interlacing arrays below a strictly decreasing integer level
    ``x``: ``prod_{i<j} (x_i - x_j) / (j - i)``.
    """
    num, den = 1, 1
    for i, j in itertools.combinations(range(len(x)), 2):
        num *= x[i] - x[j]
        den *= j - i
    return num // den


def _children(y: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    ranges = [range(y[i + 1] + 1, y[i] + 1) for i in range(len(y) - 1)]
    return itertools.product(*ranges)


def tiling_correlations_exact(
    spec: PolygonSpec, points: Sequence[Tuple[int, int]]
) -> Fraction:
    """
    Probability that every ``(level, site)`` in ``points`` is occupied under
    the uniform measure, by a dynamic program over levels from the top down.

    Raises:
        SizeLimit: Beyond ``N = 8`` or ``m = 1``.
        RangeError: For levels outside ``[1, N]``.
    """
    if spec.N > EXACT_MAX_N:
        raise ex.SizeLimit("N", spec.N, EXACT_MAX_N)
    if spec.m > EXACT_MAX_M:
        raise ex.SizeLimit("m", spec.m, EXACT_MAX_M)
    required: Dict[int, set] = defaultdict(set)
    for n, x in points:
        if not 1 <= n <= spec.N:
            raise ex.RangeError("level", n, 1, spec.N)
        required[n].add(x)

    def allowed(level: int, x: Tuple[int, ...]) -> bool:
        return required[level].issubset(x)

    top = spec.top
    if not allowed(spec.N, top):
        return Fraction(0)
    states: Dict[Tuple[int, ...], int] = {top: 1}
    lowest = min(required) if required else spec.N
    for level in range(spec.N - 1, lowest - 1, -1):
        nxt: Dict[Tuple[int, ...], int] = defaultdict(int)
        for y, weight in states.items():
            for x in _children(y):
                if allowed(level, x):
                    nxt[x] += weight
        states = nxt
    total = sum(weight * dimension(x) for x, weight in states.items())
    return Fraction(total, dimension(top))


def level_density_exact(spec: PolygonSpec, level: int) -> Dict[int, Fraction]:
    """One-point densities of a level, for every site of ``[-N, N - 1]``."""
    return {
        x: tiling_correlations_exact(spec, [(level, x)])
        for x in range(-spec.N, spec.N)
    }
