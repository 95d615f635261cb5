"""
Empirical correlation functions, counting and spacing statistics of sampled
configurations, and the determinantal and gauge-invariant functionals that
compare them to kernels.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import exceptions as ex
from .kernels import BulkScaling, KernelQuery
from .parallel import run_ordered
from .sampling import SampleBatch

log = logging.getLogger(__name__)

MAX_ORDER = 3
DEFAULT_BINS = 32
BOOTSTRAP_RESAMPLES = 200
IMAGINARY_TOL = 1e-8

Point = Tuple[int, float]
Kernel = Callable[[KernelQuery], complex]


###############################################################################
# Correlation estimates
###############################################################################
@dataclass(frozen=True)
class CorrelationGrid:
    """
    Binned estimate of the rescaled ``k``-point correlation function of one
    level.

    ``estimates`` and ``std_errors`` have shape ``(bins,) * k``; ``counts``
    holds the total tuple census over all replicas.
    """

    k: int
    level: int
    edges: np.ndarray
    counts: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    replicas: int
    scaling: BulkScaling
    prediction: Optional[np.ndarray] = None

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def within(self, n_se: float = 3.0, atol: float = 1e-12) -> np.ndarray:
        """
        Bins whose estimate is within ``n_se`` standard errors of the prediction,
        plus ``atol`` for bins whose standard error vanishes.
        """
        if self.prediction is None:
            raise ex.ConfigError("prediction", "no kernel prediction attached")
        gap = np.abs(self.estimates - self.prediction)
        return gap <= n_se * self.std_errors + atol

    def rows(self) -> List[Tuple[Any, ...]]:
        """
        One row per bin: the bin centers, the estimate, its standard error and
        the prediction (``nan`` when absent).
        """
        out = []
        for idx in itertools.product(range(len(self.centers)), repeat=self.k):
            pred = math.nan if self.prediction is None else float(self.prediction[idx])
            out.append(
                tuple(float(self.centers[i]) for i in idx)
                + (float(self.estimates[idx]), float(self.std_errors[idx]), pred)
            )
        return out


def _tuple_census(job: Tuple[np.ndarray, int, np.ndarray]) -> np.ndarray:
    """Histogram of the ordered distinct ``k``-tuples of one configuration."""
    points, k, edges = job
    bins = len(edges) - 1
    inside = points[(points >= edges[0]) & (points < edges[-1])]
    if len(inside) < k:
        return np.zeros((bins,) * k)
    idx = np.array(list(itertools.permutations(range(len(inside)), k)))
    counts, _ = np.histogramdd(inside[idx], bins=[edges] * k)
    return counts


def bootstrap_se(
    per_replica: np.ndarray, resamples: int = BOOTSTRAP_RESAMPLES, seed: int = 0
) -> np.ndarray:
    """
    Standard error of the mean over the first axis by resampling replicas
    with replacement.
    """
    R = per_replica.shape[0]
    if R < 2:
        return np.full(per_replica.shape[1:], math.inf)
    rng = np.random.default_rng(seed)
    flat = per_replica.reshape(R, -1)
    means = np.empty((resamples, flat.shape[1]))
    for b in range(resamples):
        weights = rng.multinomial(R, np.full(R, 1 / R))
        means[b] = weights @ flat / R
    return means.std(axis=0, ddof=1).reshape(per_replica.shape[1:])


def estimate_correlation(
    batch: SampleBatch,
    level: int,
    k: int,
    scaling: BulkScaling,
    bins: Union[int, Sequence[float], None] = None,
    window: Tuple[float, float] = (-2.0, 2.0),
    resamples: int = BOOTSTRAP_RESAMPLES,
    workers: int = 1,
) -> CorrelationGrid:
    """
    Bins the ordered distinct ``k``-tuples of rescaled level-``level`` points
    and divides by the number of replicas and the bin volume.

    Args:
        batch: The samples.
        level: Level to use.
        k: Correlation order, at most 3.
        scaling: Maps absolute positions to local ones.
        bins: Bin count over ``window`` or explicit edges; defaults to
            ``window / 32``.
        window: Local window, used when ``bins`` is not a sequence.
        resamples: Bootstrap resamples over replicas for the standard errors.
        workers: Processes for the tuple census.
    Raises:
        EmptyWindow, SizeLimit
    """
    if not 1 <= k <= MAX_ORDER:
        raise ex.SizeLimit("k", k, MAX_ORDER)
    if bins is None or isinstance(bins, int):
        edges = np.linspace(window[0], window[1], (bins or DEFAULT_BINS) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    if len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ex.ConfigError("bins", "edges must be increasing")

    local = [scaling.to_local(p) for p in batch.level(level)]
    per_replica = np.array(
        run_ordered(_tuple_census, [(p, k, edges) for p in local], workers)
    )
    counts = per_replica.sum(axis=0)
    if not counts.any():
        raise ex.EmptyWindow((float(edges[0]), float(edges[-1])))

    volume = np.ones((len(edges) - 1,) * k)
    for axis in range(k):
        shape = [1] * k
        shape[axis] = -1
        volume = volume * np.diff(edges).reshape(shape)
    per_replica = per_replica / volume
    log.debug(
        "Correlation of order %d at level %d from %d replicas", k, level, len(local)
    )
    return CorrelationGrid(
        k,
        level,
        edges,
        counts,
        per_replica.mean(axis=0),
        bootstrap_se(per_replica, resamples, seed=batch.seed),
        batch.n_replicas,
        scaling,
    )


def predict_one_point(
    grid: CorrelationGrid, kernel: Kernel, nodes: int = 4
) -> CorrelationGrid:
    """
    Attaches the bin averages of ``kernel`` on the diagonal, with ``kernel``
    taking local queries at ``grid.level``.
    """
    if grid.k != 1:
        raise ex.SizeLimit("k", grid.k, 1)
    x, w = np.polynomial.legendre.leggauss(nodes)
    prediction = np.empty(len(grid.centers))
    for i, (c, h) in enumerate(zip(grid.centers, grid.widths)):
        values = [
            complex(kernel(KernelQuery(grid.level, p, grid.level, p))).real
            for p in c + h / 2 * x
        ]
        prediction[i] = float(np.dot(w, values)) / 2
    return replace(grid, prediction=prediction)


###############################################################################
# Determinantal functionals
###############################################################################
def kernel_matrix(
    kernel: Kernel, points: Sequence[Point], workers: int = 1
) -> np.ndarray:
    """``[K(p_i, p_j)]`` for points ``(level, position)``."""
    queries = [KernelQuery(a[0], a[1], b[0], b[1]) for a in points for b in points]
    values = run_ordered(kernel, queries, workers)
    n = len(points)
    return np.array([complex(v) for v in values]).reshape(n, n)


def determinantal_correlation(
    kernel: Kernel, points: Sequence[Point], tol: float = IMAGINARY_TOL
) -> float:
    """
    ``det[K(p_i, p_j)]``, the correlation function of a determinantal process
    at the given points.

    Raises:
        NonNegligibleImaginaryPart: If the determinant is not real to ``tol``.
    """
    value = complex(np.linalg.det(kernel_matrix(kernel, points)))
    if abs(value.imag) > tol * max(1.0, abs(value.real)):
        raise ex.NonNegligibleImaginaryPart(value, tol)
    return value.real


@dataclass(frozen=True)
class KernelDistanceReport:
    points: Tuple[Point, ...]
    diagonal: float
    cycles: float
    determinants: float
    max_deviation: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "max_deviation", max(self.diagonal, self.cycles, self.determinants)
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "points": [list(p) for p in self.points],
            "diagonal": self.diagonal,
            "cycles": self.cycles,
            "determinants": self.determinants,
            "max_deviation": self.max_deviation,
        }


def _minor_dets(M: np.ndarray, size: int) -> np.ndarray:
    n = M.shape[0]
    if n < size:
        return np.zeros(0)
    if size == n or math.comb(n, size) <= 2000:
        subsets = itertools.combinations(range(n), size)
    else:
        subsets = (tuple(range(i, i + size)) for i in range(n - size + 1))
    return np.array([np.linalg.det(M[np.ix_(s, s)]) for s in subsets])


def compare_kernel_matrices(
    A: np.ndarray, B: np.ndarray, points: Sequence[Point] = ()
) -> KernelDistanceReport:
    """
    Gauge-invariant comparison of two kernel matrices on the same points:
    diagonals, all two-cycle products ``A_ij A_ji`` and principal minors of
    size 2 and 3 (consecutive ones when there are too many).
    """
    if A.shape != B.shape:
        raise ex.DimensionMismatch(A.shape[0], B.shape[0], "kernel matrix")
    diagonal = float(np.max(np.abs(np.diag(A) - np.diag(B))))
    cycles = float(np.max(np.abs(A * A.T - B * B.T)))
    dets = [0.0]
    for size in (2, 3):
        da, db = _minor_dets(A, size), _minor_dets(B, size)
        if len(da):
            dets.append(float(np.max(np.abs(da - db))))
    return KernelDistanceReport(tuple(points), diagonal, cycles, max(dets))


def gauge_invariant_distance(
    A: Kernel, B: Kernel, points: Sequence[Point], workers: int = 1
) -> KernelDistanceReport:
    """
    Compares two kernels through quantities unchanged by
    ``K(x, y) -> f(x) K(x, y) / f(y)``.

    Raises:
        ConfigError: For fewer than two points.
    """
    if len(points) < 2:
        raise ex.ConfigError("points", "need at least two points")
    MA = kernel_matrix(A, points, workers)
    MB = kernel_matrix(B, points, workers)
    return compare_kernel_matrices(MA, MB, points)


###############################################################################
# Counting and spacings
###############################################################################
@dataclass(frozen=True)
class GapStatistics:
    count_mean: float
    count_variance: float
    spacing_edges: np.ndarray
    spacing_density: np.ndarray
    spacings: np.ndarray


def counting_and_gaps(
    batch: SampleBatch,
    level: int,
    scaling: BulkScaling,
    window: Tuple[float, float],
    bins: int = DEFAULT_BINS,
    max_spacing: Optional[float] = None,
) -> GapStatistics:
    """
    Per-replica point counts in a local window and the histogram of
    nearest-neighbour spacings of the rescaled points inside it.

    Raises:
        EmptyWindow
    """
    lo, hi = window
    if not lo < hi:
        raise ex.ConfigError("window", f"empty window {window}")
    for end in (lo, hi):
        if not abs(float(scaling.to_absolute(end)) / math.sqrt(scaling.n)) < 2:
            raise ex.EdgeEnergy(float(scaling.to_absolute(end)) / math.sqrt(scaling.n))

    counts, spacings = [], []
    for points in batch.level(level):
        local = np.sort(scaling.to_local(points))
        inside = local[(local >= lo) & (local < hi)]
        counts.append(len(inside))
        spacings.append(np.diff(inside))
    if not sum(counts):
        raise ex.EmptyWindow(window)

    gaps = np.concatenate(spacings)
    top = max_spacing or (4 * float(np.mean(gaps)) if len(gaps) else 1.0)
    density, edges = np.histogram(
        gaps, bins=bins, range=(0.0, top), density=len(gaps) > 0
    )
    log.debug("%d spacings in window %s", len(gaps), window)
    return GapStatistics(
        float(np.mean(counts)),
        float(np.var(counts, ddof=1)) if len(counts) > 1 else 0.0,
        edges,
        density,
        gaps,
    )
