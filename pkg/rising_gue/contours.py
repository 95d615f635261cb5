"""
Complex path quadrature: circles (trapezoid rule), truncated vertical lines,
rays, ray pairs and segments (composite Gauss-Legendre), and the nested double
integral behind every kernel formula.

Every contour exposes ``nodes(panels, q)`` returning ``(points, weights)`` with
``sum(f(points) * weights)`` approximating the contour integral. The
integrators refine by doubling the number of panels until two successive
estimates agree.
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from . import exceptions as ex

log = logging.getLogger(__name__)

Nodes = Tuple[np.ndarray, np.ndarray]


###############################################################################
# Settings and results
###############################################################################
@dataclass(frozen=True)
class QuadratureSettings:
    """
    Node counts and tolerances shared by all integrators.

    Args:
        nodes_per_panel: Gauss-Legendre nodes per panel; also the trapezoid
            node count per panel on circles.
        max_panels: Refinement stops with :class:`NonConvergence` beyond this.
        abs_tol: Absolute tolerance between successive refinements.
        rel_tol: Relative tolerance between successive refinements.
        initial_panels: Panels of the coarsest level.
    """

    nodes_per_panel: int = 16
    max_panels: int = 1024
    abs_tol: float = 1e-11
    rel_tol: float = 1e-11
    initial_panels: int = 4

    def __post_init__(self):
        if self.nodes_per_panel < 4 or self.nodes_per_panel % 2:
            raise ex.ConfigError(
                "nodes_per_panel", f"must be even and >= 4, got {self.nodes_per_panel}"
            )
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ex.ConfigError("abs_tol/rel_tol", "tolerances must be positive")
        if self.initial_panels < 1 or self.max_panels < self.initial_panels:
            raise ex.ConfigError("max_panels", "must be at least initial_panels")

    def tightened(self, factor: float = 10.0) -> "QuadratureSettings":
        return replace(
            self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor
        )

    def tolerance(self, scale: float) -> float:
        return max(self.abs_tol, self.rel_tol * scale)


class Estimate(complex):
    """
    A complex quadrature result that carries its error estimate as ``.error``.
    """

    def __new__(cls, value: complex, error: float = 0.0):
        obj = super().__new__(cls, value)
        obj.error = float(error)
        return obj

    def __getnewargs__(self):
        return (complex(self), self.error)

    def __repr__(self) -> str:
        return f"Estimate({complex(self)!r}, error={self.error:.2e})"


@lru_cache(maxsize=64)
def _leggauss(n: int) -> Nodes:
    return np.polynomial.legendre.leggauss(n)


def _gauss_panels(lo: float, hi: float, panels: int, n: int) -> Nodes:
    """Composite Gauss-Legendre nodes and weights on ``[lo, hi]``."""
    x, w = _leggauss(n)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges)[:, None] / 2
    mid = (edges[:-1] + edges[1:])[:, None] / 2
    return (mid + half * x).ravel(), (half * w).ravel()


###############################################################################
# Contours
###############################################################################
@dataclass(frozen=True)
class Circle:
    """
    Trapezoid nodes on a circle. The nodes are rotated by ``phase`` node
    spacings, so with the default half spacing none of them lies on the real
    axis when the center is real.
    """

    center: complex
    radius: float
    orientation: int = 1
    phase: float = 0.5

    def __post_init__(self):
        if not self.radius > 0:
            raise ex.ConfigError("radius", f"must be positive, got {self.radius}")
        if self.orientation not in (1, -1):
            raise ex.ConfigError("orientation", "must be +1 or -1")

    def nodes(self, panels: int, q: QuadratureSettings) -> Nodes:
        n = panels * q.nodes_per_panel
        theta = 2 * np.pi * (np.arange(n) + self.phase) / n
        e = np.exp(1j * theta)
        z = self.center + self.radius * e
        return z, self.orientation * 1j * self.radius * e * (2 * np.pi / n)


@dataclass(frozen=True)
class VerticalLine:
    """
    The line ``Re z = abscissa`` oriented upwards, truncated at
    ``|Im z| <= half_height``. Nodes are placed uniformly in ``s`` with
    ``Im z = scale * sinh(s)``, which clusters them near the real axis.

    Args:
        abscissa: ``b`` in ``b + iR``.
        half_height: Truncation; derived from the tolerance when ``None``.
        scale: Length scale of the sinh map, the distance to the nearest
            singularity is a good choice.
        degree: Polynomial degree of the integrand's prefactor, used by the
            truncation rule.
    """

    abscissa: float
    half_height: Optional[float] = None
    scale: float = 1.0
    degree: int = 0

    def __post_init__(self):
        if self.half_height is not None and not self.half_height > 0:
            raise ex.ConfigError("half_height", "must be positive")
        if not self.scale > 0:
            raise ex.ConfigError("scale", "must be positive")

    def height(self, q: QuadratureSettings) -> float:
        if self.half_height is not None:
            return self.half_height
        return truncation_half_height(self.abscissa, q.abs_tol, self.degree)

    def nodes(self, panels: int, q: QuadratureSettings) -> Nodes:
        S = math.asinh(self.height(q) / self.scale)
        s, ws = _gauss_panels(-S, S, panels, q.nodes_per_panel)
        z = self.abscissa + 1j * self.scale * np.sinh(s)
        return z, 1j * self.scale * np.cosh(s) * ws


@dataclass(frozen=True)
class RayPair:
    """
    The two pieces ``b + i[-outer, -inner]`` and ``b + i[inner, outer]``,
    both oriented upwards.
    """

    abscissa: float
    inner_cut: float
    outer_height: float

    def __post_init__(self):
        if not 0 < self.inner_cut < self.outer_height:
            raise ex.ConfigError(
                "outer_height", "need 0 < inner_cut < outer_height for a ray pair"
            )

    def nodes(self, panels: int, q: QuadratureSettings) -> Nodes:
        t, wt = _gauss_panels(
            self.inner_cut, self.outer_height, panels, q.nodes_per_panel
        )
        z = np.concatenate([self.abscissa - 1j * t[::-1], self.abscissa + 1j * t])
        return z, 1j * np.concatenate([wt[::-1], wt])


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def nodes(self, panels: int, q: QuadratureSettings) -> Nodes:
        t, wt = _gauss_panels(0.0, 1.0, panels, q.nodes_per_panel)
        d = self.end - self.start
        return self.start + d * t, d * wt


@dataclass(frozen=True)
class Ray:
    """
    ``start + direction * t`` for ``t`` in ``[0, length]``, with a sinh map of
    the given scale so that nodes cluster at the start point.
    """

    start: complex
    direction: complex
    length: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.length > 0 or not self.scale > 0:
            raise ex.ConfigError("length", "ray length and scale must be positive")

    def nodes(self, panels: int, q: QuadratureSettings) -> Nodes:
        unit = self.direction / abs(self.direction)
        S = math.asinh(self.length / self.scale)
        s, ws = _gauss_panels(0.0, S, panels, q.nodes_per_panel)
        return (
            self.start + unit * self.scale * np.sinh(s),
            unit * self.scale * np.cosh(s) * ws,
        )


@dataclass(frozen=True)
class InfiniteLine:
    """
    The whole line ``Re z = abscissa`` oriented upwards, parametrized by
    ``Im z = scale * tan(theta)``. Only for integrands decaying at least like
    ``|z|^-2``, which the map turns into bounded ones.
    """

    abscissa: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ex.ConfigError("scale", "must be positive")

    def nodes(self, panels: int, q: QuadratureSettings) -> Nodes:
        theta, wt = _gauss_panels(-np.pi / 2, np.pi / 2, panels, q.nodes_per_panel)
        z = self.abscissa + 1j * self.scale * np.tan(theta)
        return z, 1j * self.scale * wt / np.cos(theta) ** 2


Contour = Union[Circle, VerticalLine, InfiniteLine, RayPair, Segment, Ray]


###############################################################################
# Contour choices
###############################################################################
def truncation_half_height(b: float, abs_tol: float, degree: int = 0) -> float:
    """
    Height beyond which ``|exp(z^2/2)| * |z|^degree`` on ``b + iR`` drops below
    ``abs_tol``, from two fixed-point iterations of
    ``H = sqrt(2 (b^2/2 + W + p log(1 + H)))`` with ``W = -log(abs_tol)``.
    """
    W = -math.log(abs_tol)
    H = math.sqrt(2 * (b * b / 2 + W))
    for _ in range(2):
        H = math.sqrt(2 * (b * b / 2 + W + max(degree, 0) * math.log1p(H)))
    return H


def default_abscissa(x1: float, x2: float, points: Sequence[float]) -> float:
    """
    ``x2 + delta`` where ``delta`` is half the distance from ``x2`` to the
    nearest point above it (including ``x1``), floored at ``1e-3``.
    """
    above = [p - x2 for p in list(points) + [x1] if p > x2]
    delta = max(min(above) / 2, 1e-3) if above else 1.0
    return x2 + delta


def default_circle_radius(
    x1: float, x2: float, points: Sequence[float], b: float
) -> float:
    """
    Half the smallest positive distance from ``x1`` to the configuration, ``x2``
    and the abscissa ``b``, floored at ``1e-3``.
    """
    dists = [abs(p - x1) for p in list(points) + [x2, b]]
    positive = [d for d in dists if d > 0]
    return max(min(positive) / 2, 1e-3) if positive else 1.0


def extend_half_height(
    log_abs: Callable[[np.ndarray], np.ndarray],
    b: float,
    H: float,
    target: float,
    max_height: float = 1e4,
) -> float:
    """
    Grows ``H`` until ``log|f(b +- iH)| + log(H)`` is below ``target``.

    Args:
        log_abs: Log-magnitude of the integrand, vectorized.
        b: Abscissa of the line.
        H: Starting half-height.
        target: Log of the acceptable tail contribution.
        max_height: Upper bound on the returned height.
    """
    while H < max_height:
        edge = log_abs(np.array([b + 1j * H, b - 1j * H]))
        if np.max(edge) + math.log(H) < target:
            break
        H *= 1.5
    return min(H, max_height)


###############################################################################
# Integrators
###############################################################################
def _refine(
    evaluate: Callable[[int], np.ndarray],
    q: QuadratureSettings,
    method: str,
    start_panels: Optional[int] = None,
) -> Tuple[np.ndarray, float, int]:
    """
    Doubles the panel count until successive values agree.

    Returns:
        ``(value, error, panels)`` where ``panels`` is the coarser of the two
        agreeing levels.
    Raises:
        NonConvergence, NonFiniteValue
    """

    def finite(panels: int) -> np.ndarray:
        value = evaluate(panels)
        if not np.all(np.isfinite(value)):
            raise ex.NonFiniteValue(method, panels)
        return value

    panels = start_panels or q.initial_panels
    prev = finite(panels)
    while True:
        if 2 * panels > q.max_panels:
            cur = finite(q.max_panels) if panels < q.max_panels else prev
            raise ex.NonConvergence(method, prev, cur)
        cur = finite(2 * panels)
        err = float(np.max(np.abs(cur - prev)))
        if err <= q.tolerance(float(np.max(np.abs(cur)))):
            log.debug("%s converged with %d panels, error %.2e", method, panels, err)
            return cur, err, panels
        panels *= 2
        prev = cur


def integrate_contour(
    f: Callable[[np.ndarray], np.ndarray], contour: Contour, q: QuadratureSettings
) -> Estimate:
    """
    Integrates a vectorized ``f`` along any contour.
    """

    def evaluate(panels: int) -> np.ndarray:
        z, w = contour.nodes(panels, q)
        return np.sum(f(z) * w)

    value, err, _ = _refine(evaluate, q, f"integral over {contour}")
    return Estimate(complex(value), err)


def integrate_closed(
    f: Callable[[np.ndarray], np.ndarray], c: Circle, q: QuadratureSettings
) -> Estimate:
    """
    ``∮ f(z) dz`` over a circle by the trapezoid rule.

    Args:
        f: Vectorized integrand, analytic on the circle.
        c: The circle.
        q: Quadrature settings.
    Returns:
        The integral as an :class:`Estimate`.
    Raises:
        NonConvergence
    """
    return integrate_contour(f, c, q)


def integrate_segment(
    f: Callable[[np.ndarray], np.ndarray],
    seg: Union[Segment, Ray, RayPair],
    q: QuadratureSettings,
) -> Estimate:
    return integrate_contour(f, seg, q)


def integrate_vertical(
    f: Callable[[np.ndarray], np.ndarray], line: VerticalLine, q: QuadratureSettings
) -> Estimate:
    """
    ``∫ f(z) dz`` upwards along a truncated vertical line.

    Issues :class:`TruncationWarning` when the outermost panels still
    contribute more than ``abs_tol``.
    """
    result = integrate_contour(f, line, q)

    z, w = line.nodes(q.initial_panels, q)
    n = q.nodes_per_panel
    edge = np.concatenate([np.arange(n), np.arange(len(z) - n, len(z))])
    tail = float(np.sum(np.abs(f(z[edge]) * w[edge])))
    if tail > q.abs_tol:
        log.debug("Tail contribution %.2e on %s", tail, line)
        warnings.warn(
            ex.TruncationWarning(
                f"Outer panels of {line} contribute {tail:.2e} > {q.abs_tol:.1e}"
            )
        )
    return result


def integrate_double(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    z_contour: Contour,
    w_contour: Contour,
    q: QuadratureSettings,
    allow_crossing: bool = False,
) -> Estimate:
    """
    Iterated quadrature: outer over ``w``, inner over ``z`` with ten times
    tighter tolerances.

    Args:
        f: Integrand, called as ``f(z[:, None], w[None, :])``.
        z_contour: Inner contour.
        w_contour: Outer contour.
        q: Quadrature settings of the outer integral.
        allow_crossing: Skip the intersection check, for integrands that are
            regular where the contours meet.
    Raises:
        ContourIntersection, NonConvergence
    """
    if not allow_crossing:
        _check_disjoint(z_contour, w_contour)

    qi = q.tightened()
    state = {"z_panels": qi.initial_panels}

    def outer(w_panels: int) -> np.ndarray:
        w, ww = w_contour.nodes(w_panels, q)

        def inner(z_panels: int) -> np.ndarray:
            z, wz = z_contour.nodes(z_panels, qi)
            return wz @ f(z[:, None], w[None, :])

        values, _, state["z_panels"] = _refine(
            inner, qi, f"inner integral over {z_contour}", state["z_panels"]
        )
        return values @ ww

    value, err, _ = _refine(outer, q, f"outer integral over {w_contour}")
    return Estimate(complex(value), err)


def _check_disjoint(a: Contour, b: Contour) -> None:
    for circle, line in ((a, b), (b, a)):
        if isinstance(circle, Circle) and isinstance(line, VerticalLine):
            if abs(circle.center.real - line.abscissa) <= circle.radius:
                raise ex.ContourIntersection(
                    circle.center, circle.radius, line.abscissa
                )
