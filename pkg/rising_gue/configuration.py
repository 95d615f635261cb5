import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from . import exceptions as ex
from .special_fns import semicircle_cdf

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Configuration:
    """
    A strictly decreasing tuple of real positions, the points of one level.

    Args:
        values: The positions, largest first.
    Raises:
        InvalidConfiguration
    """

    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not all(math.isfinite(v) for v in values):
            raise ex.InvalidConfiguration(values, "all values must be finite")
        for i in range(len(values) - 1):
            if not values[i] > values[i + 1]:
                raise ex.InvalidConfiguration(
                    values, f"not strictly decreasing at index {i}"
                )

    @classmethod
    def from_unsorted(cls, values: Iterable[float]) -> "Configuration":
        return cls(tuple(sorted(values, reverse=True)))

    @property
    def m(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def min_gap(self) -> float:
        if self.m < 2:
            return math.inf
        return float(np.min(-np.diff(self.as_array())))

    def __len__(self) -> int:
        return self.m

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


@dataclass(frozen=True)
class KernelQuery:
    """
    A pair of space-time points ``(n1, x1)`` and ``(n2, x2)``.
    """

    n1: int
    x1: float
    n2: int
    x2: float

    def swapped(self) -> "KernelQuery":
        return KernelQuery(self.n2, self.x2, self.n1, self.x1)


def interlaces(lower: Sequence[float], upper: Sequence[float]) -> bool:
    """
    Whether ``lower ≺ upper``: ``upper`` has one more point and
    ``upper[i] >= lower[i] >= upper[i + 1]`` for every ``i``.
    """
    if len(upper) != len(lower) + 1:
        return False
    return all(upper[i] >= lower[i] >= upper[i + 1] for i in range(len(lower)))


def semicircle_quantiles(m: int) -> Configuration:
    """
    The configuration ``sqrt(m) * gamma_j`` where ``gamma_j`` is the
    ``(m - j + 1/2) / m`` quantile of the semicircle law, ``j = 1..m``.
    """
    if m < 0:
        raise ex.ConfigError("m", f"must be nonnegative, got {m}")
    levels = (m - np.arange(1, m + 1) + 0.5) / m if m else np.array([])
    gammas = [brentq(lambda x, p=p: semicircle_cdf(x) - p, -2.0, 2.0) for p in levels]
    log.debug("Built %d semicircle quantiles", m)
    return Configuration(tuple(math.sqrt(m) * g for g in gammas))
