"""
Log-magnitude/phase forms of the integrands shared by the kernel evaluators,
the resummation checks and the polygon kernel.
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

log = logging.getLogger(__name__)

_CHUNK = 256


def sum_log_diff(z: np.ndarray, points: Sequence[float]) -> np.ndarray:
    """
    ``sum_r log(z - points[r])`` with principal logs, for any array ``z``.

    Only the exponential of the result is meaningful. Points are processed in
    chunks to bound memory for configurations with thousands of points.
    """
    z = np.asarray(z, dtype=complex)
    pts = np.asarray(points, dtype=float)
    out = np.zeros(z.shape, dtype=complex)
    for i in range(0, len(pts), _CHUNK):
        out += np.log(z[..., None] - pts[i : i + _CHUNK]).sum(axis=-1)
    return out


@dataclass(frozen=True)
class FixedStartIntegrand:
    """
    The fixed-start double contour integrand split as
    ``exp(log_c + log_a(z) + log_b(w)) / (w - z)`` with

    * ``log_a(z) = (n2-m-1) log(z-x2) + z^2/2 - sum_r log(z-x_r)``
    * ``log_b(w) = -w^2/2 + sum_r log(w-x_r) - (n1-m+1) log(w-x1)``
    * ``log_c = log((n1-m)!) - log((n2-m-1)!)``

    When ``x1`` coincides with a configuration point the matching zero and
    one order of the pole at ``x1`` are cancelled exactly.
    """

    points: Sequence[float]
    n1: int
    x1: float
    n2: int
    x2: float
    w_points: Sequence[float] = field(init=False)
    w_order: int = field(init=False)

    def __post_init__(self):
        m = len(self.points)
        w_points = [p for p in self.points if p != self.x1]
        object.__setattr__(self, "w_points", tuple(w_points))
        object.__setattr__(self, "w_order", self.n1 - m + 1 - (m - len(w_points)))
        if len(w_points) < m:
            log.debug("x1 = %s is a configuration point, pole order reduced", self.x1)

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def log_c(self) -> float:
        return float(gammaln(self.n1 - self.m + 1) - gammaln(self.n2 - self.m))

    def log_a(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = z * z / 2 - sum_log_diff(z, self.points)
        if self.n2 - self.m - 1:
            out = out + (self.n2 - self.m - 1) * np.log(z - self.x2)
        return out

    def log_b(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        out = -w * w / 2 + sum_log_diff(w, self.w_points)
        if self.w_order:
            out = out - self.w_order * np.log(w - self.x1)
        return out

    def subtracted(self, log_shift: float = 0.0):
        """
        The integrand ``(E(z, w) - E(z, z)) / (w - z)``, regular at ``w = z``,
        as a function of broadcast arrays ``z[:, None]`` and ``w[None, :]``.
        ``log_shift`` is added to every exponent.
        """
        base = self.log_c + log_shift

        def f(z: np.ndarray, w: np.ndarray) -> np.ndarray:
            la = self.log_a(z)
            diag = np.exp(base + la + self.log_b(z))
            return (np.exp(base + la + self.log_b(w)) - diag) / (w - z)

        return f
