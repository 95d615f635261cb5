"""
The action of the rescaled fixed-start kernel and its limit, the critical
point solver, local statistics of a starting configuration, and checks of
the local density and intermediate scale conditions.

Upper half-plane logarithms use ``log_H(z) = log(z e^{-i pi/2}) + i pi/2``,
whose cut is the negative imaginary axis.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from . import exceptions as ex
from .configuration import Configuration, semicircle_quantiles
from .special_fns import semicircle_cdf, semicircle_density

log = logging.getLogger(__name__)

NEWTON_MAX_ITER = 200
MIN_IMAG = 0.01
MAX_HALVINGS = 60


def log_upper(z):
    """``log_H``: a logarithm continuous on the closed upper half-plane minus 0."""
    return np.log(np.asarray(z) * np.exp(-0.5j * np.pi)) + 0.5j * np.pi


def limit_critical_point(X: float) -> complex:
    """``-X/2 + i sqrt(1 - X^2/4)``"""
    return complex(-X / 2, math.sqrt(1 - X * X / 4))


###############################################################################
# Actions
###############################################################################
@dataclass(frozen=True)
class ActionParams:
    """
    Parameters of the action: the level-``m`` configuration, the energy ``X``
    and the time ``T``. The rescaled configuration is
    ``u_r = (x_r / sqrt(m) - X) / (T / m)``.

    Raises:
        EdgeEnergy, ConfigError
    """

    cfg: Configuration
    X: float
    T: int
    u: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not abs(self.X) < 2:
            raise ex.EdgeEnergy(self.X)
        if self.T < 1:
            raise ex.ConfigError("T", f"must be at least 1, got {self.T}")
        m = self.cfg.m
        u = np.zeros(0)
        if m:
            u = (self.cfg.as_array() / math.sqrt(m) - self.X) / (self.T / m)
        object.__setattr__(self, "u", u)

    @property
    def m(self) -> int:
        return self.cfg.m

    @property
    def ratio(self) -> float:
        """``T/m``, taken as 0 for the empty configuration."""
        return self.T / self.m if self.m else 0.0

    @property
    def error_scale(self) -> float:
        """``log(m)^2 / T + T / m``"""
        if not self.m:
            return math.inf
        return math.log(self.m) ** 2 / self.T + self.T / self.m


def _check_upper(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    bad = z.imag <= 0
    if np.any(bad):
        raise ex.LowerHalfPlane(complex(z[bad].flat[0]))
    return z


def eval_action(p: ActionParams, z, order: int = 0):
    """
    ``S_m`` and its first three derivatives,

        ``S_m(z) = X z + log_H(z) + (T/m) z^2 / 2 - (1/T) sum_r log_H(z - u_r)``

    Raises:
        LowerHalfPlane
    """
    z = _check_upper(z)
    d = z[..., None] - p.u
    if order == 0:
        out = (
            p.X * z
            + log_upper(z)
            + p.ratio * z * z / 2
            - log_upper(d).sum(axis=-1) / p.T
        )
    elif order == 1:
        out = p.X + 1 / z + p.ratio * z - (1 / d).sum(axis=-1) / p.T
    elif order == 2:
        out = -1 / z**2 + p.ratio + (1 / d**2).sum(axis=-1) / p.T
    elif order == 3:
        out = 2 / z**3 - 2 * (1 / d**3).sum(axis=-1) / p.T
    else:
        raise ex.ConfigError("order", f"must be 0, 1, 2 or 3, got {order}")
    return out if out.ndim else complex(out)


def eval_limit_action(X: float, z, order: int = 0):
    """
    ``S_*(z) = X (z + i) / 2 + log_H(z) + i pi rho_sc(X) (z - i)`` and its
    derivative. The constant makes ``S_*(i) = i (X + pi/2)``; ``S_m`` matches
    ``S_*`` only up to a configuration-dependent constant.

    Raises:
        LowerHalfPlane
    """
    if not abs(X) < 2:
        raise ex.EdgeEnergy(X)
    z = _check_upper(z)
    rho = float(semicircle_density(X))
    slope = X / 2 + 1j * math.pi * rho
    if order == 0:
        out = X * (z + 1j) / 2 + log_upper(z) + 1j * math.pi * rho * (z - 1j)
    elif order == 1:
        out = slope + 1 / z
    else:
        raise ex.ConfigError("order", f"must be 0 or 1, got {order}")
    return out if out.ndim else complex(out)


def derivative_gap(p: ActionParams, zs: Sequence[complex]) -> np.ndarray:
    """``|S_m'(z) - S_*'(z)|`` at each point."""
    zs = np.asarray(zs, dtype=complex)
    return np.abs(eval_action(p, zs, 1) - eval_limit_action(p.X, zs, 1))


###############################################################################
# Critical points
###############################################################################
@dataclass(frozen=True)
class SaddleResult:
    z0: complex
    residual: float
    iterations: int
    limit_reference: complex

    @property
    def distance_to_limit(self) -> float:
        return abs(self.z0 - self.limit_reference)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "z0": [self.z0.real, self.z0.imag],
            "residual": self.residual,
            "iterations": self.iterations,
            "limit": [self.limit_reference.real, self.limit_reference.imag],
            "distance_to_limit": self.distance_to_limit,
        }


def find_critical_point(
    p: ActionParams, tol: float = 1e-10, start: Optional[complex] = None
) -> SaddleResult:
    """
    The zero of ``S_m'`` in the upper half-plane by damped Newton iteration
    from the limit critical point. Steps are halved until the iterate stays
    above ``Im z = 0.01``.

    Raises:
        NonConvergence: After 200 iterations.
        HalfPlaneEscape: When no damped step stays in the upper half-plane.
    """
    limit = limit_critical_point(p.X)
    z = limit if start is None else complex(start)
    trajectory = [z]
    f = eval_action(p, z, 1)
    for it in range(1, NEWTON_MAX_ITER + 1):
        step = f / eval_action(p, z, 2)
        for _ in range(MAX_HALVINGS):
            candidate = z - step
            if candidate.imag > MIN_IMAG:
                break
            step /= 2
        else:
            raise ex.HalfPlaneEscape(trajectory + [z - step])
        z = candidate
        trajectory.append(z)
        previous, f = f, eval_action(p, z, 1)
        if abs(f) < tol:
            log.debug("Critical point %s after %d Newton steps", z, it)
            return SaddleResult(z, abs(f), it, limit)
    raise ex.NonConvergence("newton", previous, f)


def _edge_winding(
    f: Callable[[np.ndarray], np.ndarray], a: complex, b: complex, depth: int = 0
) -> float:
    t = np.linspace(0.0, 1.0, 17)
    values = f(a + (b - a) * t)
    steps = np.angle(values[1:] / values[:-1])
    if depth < 12 and np.max(np.abs(steps)) > np.pi / 4:
        mid = (a + b) / 2
        return _edge_winding(f, a, mid, depth + 1) + _edge_winding(f, mid, b, depth + 1)
    return float(np.sum(steps))


def winding_number(
    f: Callable[[np.ndarray], np.ndarray], lo: complex, hi: complex
) -> int:
    """Zeros minus poles of ``f`` in the rectangle with corners ``lo``, ``hi``."""
    corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag), lo]
    total = sum(_edge_winding(f, a, b) for a, b in zip(corners, corners[1:]))
    return int(round(total / (2 * math.pi)))


def scan_critical_points(
    p: ActionParams,
    re_range: Tuple[float, float] = (-3.0, 3.0),
    im_range: Tuple[float, float] = (0.05, 3.0),
    cells: int = 60,
) -> List[Tuple[complex, int]]:
    """
    Cells of a ``cells x cells`` grid in the upper half-plane around which
    ``S_m'`` winds, with their winding numbers. ``S_m'`` has no poles off
    the real axis, so the windings count critical points.
    """
    res = np.linspace(*re_range, cells + 1)
    ims = np.linspace(*im_range, cells + 1)

    def deriv(z):
        return eval_action(p, z, 1)

    found = []
    for i in range(cells):
        for j in range(cells):
            lo, hi = complex(res[i], ims[j]), complex(res[i + 1], ims[j + 1])
            w = winding_number(deriv, lo, hi)
            if w:
                found.append(((lo + hi) / 2, w))
    log.debug("Winding scan found %d cells", len(found))
    return found


def default_time(m: int, exponent: float = 0.4) -> int:
    """``ceil(m^exponent)``"""
    return max(1, math.ceil(m**exponent))


def saddle_sweep(
    ms: Sequence[int],
    Xs: Sequence[float],
    Ts: Optional[Sequence[int]] = None,
    tol: float = 1e-10,
) -> List[Dict[str, Any]]:
    """
    Critical points for semicircle-quantile configurations over a grid of
    ``m`` and ``X``; ``T`` defaults to ``ceil(m^0.4)`` for each ``m``.
    """
    rows = []
    for i, m in enumerate(ms):
        cfg = semicircle_quantiles(m)
        T = default_time(m) if Ts is None else Ts[i]
        for X in Xs:
            result = find_critical_point(ActionParams(cfg, X, T), tol)
            rows.append({"m": m, "X": X, "T": T, **result.as_dict()})
    return rows


###############################################################################
# Local statistics
###############################################################################
@dataclass(frozen=True)
class LocalStats:
    """
    Test-function integrals against the rescaled empirical measure with their
    semicircle references, the truncated Stieltjes sums ``d_m(R)`` with
    theirs, and the sup distance of the empirical CDF to the semicircle CDF.
    """

    mu: Dict[str, float]
    mu_reference: Dict[str, float]
    d: Dict[float, float]
    d_reference: Dict[float, float]
    rigidity: float


def truncated_stieltjes(p: ActionParams, R: float) -> float:
    """
    ``d_m(R) = (1/m) sum over |X - y_r| >= R T/m of 1 / (X - y_r)`` with
    ``y = x / sqrt(m)``.
    """
    y = p.cfg.as_array() / math.sqrt(p.m)
    far = np.abs(p.X - y) >= R * p.T / p.m
    return float(np.sum(1 / (p.X - y[far])) / p.m)


def truncated_stieltjes_reference(X: float, cut: float) -> float:
    """``int_{|v - X| >= cut} rho_sc(v) / (X - v) dv``"""
    total = 0.0
    if X - cut > -2:
        total += quad(lambda v: semicircle_density(v) / (X - v), -2, X - cut)[0]
    if X + cut < 2:
        total += quad(lambda v: semicircle_density(v) / (X - v), X + cut, 2)[0]
    return total


def rigidity_distance(cfg: Configuration) -> float:
    """Sup distance between the CDF of ``x / sqrt(m)`` and the semicircle CDF."""
    m = cfg.m
    y = np.sort(cfg.as_array()) / math.sqrt(m)
    F = semicircle_cdf(y)
    i = np.arange(1, m + 1)
    return float(max(np.max(np.abs(F - i / m)), np.max(np.abs(F - (i - 1) / m))))


def local_stats(
    cfg: Configuration,
    X: float,
    T: int,
    test_functions: Mapping[str, Callable[[np.ndarray], np.ndarray]],
    Rs: Sequence[float],
) -> LocalStats:
    """
    ``(1/T) sum_r f(u_r)`` against ``int f(u) rho_sc(X + u T/m) du`` for each
    test function, and ``d_m(R)`` against its principal-value reference for
    each ``R``.
    """
    p = ActionParams(cfg, X, T)
    mu, mu_ref = {}, {}
    lo, hi = (-2 - X) * p.m / T, (2 - X) * p.m / T
    for name, f in test_functions.items():
        mu[name] = float(np.sum(f(p.u)) / T)
        mu_ref[name] = float(
            quad(
                lambda u, f=f: float(f(np.array([u]))[0])
                * semicircle_density(X + u * T / p.m),
                lo,
                hi,
                limit=500,
                points=[0.0] if lo < 0 < hi else None,
            )[0]
        )
    d = {float(R): truncated_stieltjes(p, R) for R in Rs}
    d_ref = {float(R): truncated_stieltjes_reference(X, R * T / p.m) for R in Rs}
    return LocalStats(mu, mu_ref, d, d_ref, rigidity_distance(cfg))


###############################################################################
# Assumption checks
###############################################################################
@dataclass(frozen=True)
class ClauseResult:
    name: str
    passed: bool
    value: float
    bound: Tuple[float, float]
    window: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class AssumptionReport:
    clauses: Tuple[ClauseResult, ...]
    stieltjes_bound: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        return next(c for c in self.clauses if c.name == name)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "stieltjes_bound": self.stieltjes_bound,
            "clauses": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "value": c.value,
                    "bound": list(c.bound),
                    "window": None if c.window is None else list(c.window),
                }
                for c in self.clauses
            ],
        }


def _window_counts(
    y: np.ndarray, lo: float, hi: float, length: float
) -> Tuple[Tuple[float, int], Tuple[float, int]]:
    """
    Smallest count over open windows and largest count over closed windows of
    the given length inside ``[lo, hi]``, with the start of each.
    """
    starts = np.concatenate([[lo, hi - length], y, y - length])
    starts = starts[(starts >= lo) & (starts <= hi - length)]
    closed = np.searchsorted(y, starts + length, "right") - np.searchsorted(
        y, starts, "left"
    )
    opened = np.searchsorted(y, starts + length, "left") - np.searchsorted(
        y, starts, "right"
    )
    i, j = int(np.argmin(opened)), int(np.argmax(closed))
    return (float(starts[i]), int(opened[i])), (float(starts[j]), int(closed[j]))


def check_assumptions(
    cfg: Configuration,
    X: float,
    T: int,
    D: float,
    Q: float,
    rho_star: float,
    rho_upper: float,
    R: float,
    delta: float,
) -> AssumptionReport:
    """
    Checks the local density condition on ``y = x / sqrt(m)``:

    * every window of length ``D/m`` inside ``(X - Q/m, X + Q/m)`` holds
      between ``rho_star D`` and ``rho_upper D`` points,
    * every window of length ``Q/m`` holds at most ``rho_upper Q`` points,

    and computes the intermediate scale sum
    ``|(1/m) sum over R T/m <= |X - y_r| <= delta of 1 / (X - y_r)|``.
    """
    if not D < T < Q < cfg.m:
        log.debug("Scales D=%s, T=%s, Q=%s, m=%d are not ordered", D, T, Q, cfg.m)
    m = cfg.m
    y = np.sort(cfg.as_array() / math.sqrt(m))
    clauses = []

    lo, hi = X - Q / m, X + Q / m
    if 2 * Q <= D:
        raise ex.ConfigError("D", "window longer than the local range")
    (s_min, n_min), (s_max, n_max) = _window_counts(y, lo, hi, D / m)
    bound = (rho_star * D, rho_upper * D)
    clauses.append(
        ClauseResult(
            "local_lower", n_min >= bound[0], n_min, bound, (s_min, s_min + D / m)
        )
    )
    clauses.append(
        ClauseResult(
            "local_upper", n_max <= bound[1], n_max, bound, (s_max, s_max + D / m)
        )
    )

    span_lo, span_hi = min(y[0], lo) - Q / m, max(y[-1], hi) + Q / m
    _, (s_q, n_q) = _window_counts(y, span_lo, span_hi, Q / m)
    clauses.append(
        ClauseResult(
            "global_upper",
            n_q <= rho_upper * Q,
            n_q,
            (0.0, rho_upper * Q),
            (s_q, s_q + Q / m),
        )
    )

    dist = np.abs(X - y)
    middle = (dist >= R * T / m) & (dist <= delta)
    A = float(abs(np.sum(1 / (X - y[middle])) / m))
    for c in clauses:
        log.debug("Clause %s: %s (%s in %s)", c.name, c.passed, c.value, c.bound)
    return AssumptionReport(tuple(clauses), A)
