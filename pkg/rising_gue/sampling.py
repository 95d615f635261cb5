"""
Exact Monte Carlo samplers for the minor processes of Wigner and GUE
matrices, the rising process from a fixed configuration, uniform
Gelfand-Tsetlin patterns with a fixed top row and ``(m, T)``-pairs.

Every replica draws from its own generator, derived from the batch seed and
the replica index, so batches do not depend on how replicas are scheduled.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exceptions as ex
from .configuration import Configuration, interlaces
from .parallel import run_ordered

log = logging.getLogger(__name__)

COINCIDENCE_SHIFT = 1e-14

VARIANTS = ("gue_complex", "rademacher_complex", "heavy_tail")


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """The generator of replica ``replica`` in a batch seeded with ``seed``."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(replica,))
    )


def stream_seed(seed: int, stream: int) -> int:
    """
    The batch seed of the ``stream``-th independent sample set of an experiment
    seeded with ``seed``. Unlike ``seed + stream`` it shares no replica
    generators with other seeds or streams.
    """
    state = np.random.SeedSequence(entropy=(seed, stream)).generate_state(1, np.uint64)
    return int(state[0])


###############################################################################
# Entry laws
###############################################################################
@dataclass(frozen=True)
class EntryDistribution:
    """
    Law of the entries of a Wigner matrix.

    Off-diagonal entries have independent real and imaginary parts of mean 0
    and variance 1/2, diagonal entries are real with variance 1:

    * ``gue_complex``: Gaussian.
    * ``rademacher_complex``: parts ``+-1/sqrt(2)``, diagonal ``+-1``.
    * ``heavy_tail``: symmetrized Pareto with tail index ``4 + 2 epsilon``,
      standardized, so exactly the moments of order below ``4 + 2 epsilon``
      are finite.

    Raises:
        InvalidDistribution
    """

    variant: str = "gue_complex"
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ex.InvalidDistribution(
                self.variant, f"unknown variant, expected one of {VARIANTS}"
            )
        if self.variant == "heavy_tail":
            if self.epsilon is None or not self.epsilon > 0:
                raise ex.InvalidDistribution(
                    self.variant,
                    f"needs epsilon > 0, got {self.epsilon}",
                )
        elif self.epsilon is not None:
            raise ex.InvalidDistribution(
                self.variant, "epsilon only applies to heavy_tail"
            )

    @property
    def tail_index(self) -> float:
        return 4 + 2 * self.epsilon if self.epsilon else math.inf

    def _standard_real(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Symmetric real variables with mean 0 and variance 1."""
        if self.variant == "gue_complex":
            return rng.standard_normal(size)
        if self.variant == "rademacher_complex":
            return rng.choice(np.array([-1.0, 1.0]), size)
        alpha = self.tail_index
        magnitude = (1 - rng.random(size)) ** (-1 / alpha)
        sign = rng.choice(np.array([-1.0, 1.0]), size)
        return sign * magnitude / math.sqrt(alpha / (alpha - 2))

    def off_diagonal(self, rng: np.random.Generator, size: int) -> np.ndarray:
        re = self._standard_real(rng, size)
        im = self._standard_real(rng, size)
        return (re + 1j * im) / math.sqrt(2)

    def diagonal(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self._standard_real(rng, size)

    def as_dict(self) -> Dict[str, Any]:
        return {"variant": self.variant, "epsilon": self.epsilon}


GUE = EntryDistribution("gue_complex")


def hermitian_matrix(
    n: int, dist: EntryDistribution, rng: np.random.Generator
) -> np.ndarray:
    """An ``n x n`` Hermitian matrix with independent entries of law ``dist``."""
    H = np.zeros((n, n), dtype=complex)
    upper = np.triu_indices(n, k=1)
    H[upper] = dist.off_diagonal(rng, len(upper[0]))
    H = H + H.conj().T
    H[np.diag_indices(n)] = dist.diagonal(rng, n)
    return H


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    A Haar-distributed unitary from the QR decomposition of a complex Ginibre
    matrix, with the phases of ``diag(R)`` moved into ``Q``.
    """
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


###############################################################################
# Batches
###############################################################################
@dataclass(frozen=True)
class SampleBatch:
    """
    Eigenvalue configurations of several levels for each replica.

    Args:
        seed: The batch seed.
        model: Name of the sampler.
        levels: Level index of each stored level, increasing.
        replicas: Per replica, one :class:`Configuration` per entry of
            ``levels``.
        params: Model parameters, for the artifact sidecar.
    """

    seed: int
    model: str
    levels: Tuple[int, ...]
    replicas: Tuple[Tuple[Configuration, ...], ...]
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_replicas(self) -> int:
        return len(self.replicas)

    def level(self, n: int) -> List[np.ndarray]:
        """The level-``n`` configuration of every replica."""
        try:
            idx = self.levels.index(n)
        except ValueError:
            raise ex.IndexOutOfRange("level", n, f"one of {self.levels}")
        return [rep[idx].as_array() for rep in self.replicas]

    def is_valid(self) -> bool:
        """Level ``n`` has ``n`` points and consecutive levels interlace."""
        for rep in self.replicas:
            for n, cfg in zip(self.levels, rep):
                if len(cfg) != n:
                    return False
            for k in range(len(self.levels) - 1):
                if self.levels[k + 1] == self.levels[k] + 1:
                    if not interlaces(rep[k].values, rep[k + 1].values):
                        return False
        return True


@dataclass(frozen=True)
class MTPair:
    """
    Two Hermitian matrices of size ``m + T`` sharing the top-left ``m x m``
    block: ``a`` is Wigner throughout, ``b`` has a Gaussian border.
    """

    m: int
    T: int
    a: np.ndarray
    b: np.ndarray


def _to_configuration(eigs: np.ndarray, context: str) -> Configuration:
    values = np.sort(np.asarray(eigs, dtype=float))[::-1]
    gaps = -np.diff(values)
    if np.any(gaps <= 0):
        log.debug("Coincident eigenvalues in %s, perturbing", context)
        warnings.warn(
            ex.CoincidenceWarning(
                f"Coincident eigenvalues in {context} perturbed by {COINCIDENCE_SHIFT}"
            )
        )
        values = values - COINCIDENCE_SHIFT * np.arange(len(values))
        for i in range(1, len(values)):
            if values[i] >= values[i - 1]:
                values[i] = np.nextafter(values[i - 1], -np.inf)
    return Configuration(tuple(values))


def minor_spectra(
    H: np.ndarray, levels: Sequence[int], context: str = "matrix"
) -> Tuple[Configuration, ...]:
    """Eigenvalues of the top-left ``n x n`` minors of ``H``, decreasing."""
    return tuple(
        _to_configuration(
            np.linalg.eigvalsh(H[:n, :n]), f"{context}, level {n}"
        )
        for n in levels
    )


def _wigner_replica(job: Tuple[int, EntryDistribution, int, int, Tuple[int, ...]]):
    n, dist, seed, i, levels = job
    H = hermitian_matrix(n, dist, replica_rng(seed, i))
    return minor_spectra(H, levels, f"replica {i}")


def _bordered_replica(job: Tuple[Tuple[float, ...], int, int, int]):
    values, T, seed, i = job
    m = len(values)
    H = hermitian_matrix(m + T, GUE, replica_rng(seed, i))
    H[:m, :m] = np.diag(values)
    return minor_spectra(H, range(m + 1, m + T + 1), f"replica {i}")


def _gt_replica(job: Tuple[Tuple[float, ...], int, int]):
    top, seed, i = job
    m = len(top)
    U = haar_unitary(m, replica_rng(seed, i))
    M = (U * np.asarray(top)) @ U.conj().T
    lower = minor_spectra(M, range(1, m), f"replica {i}")
    return lower + (Configuration(top),)


def _check_replicas(replicas: int) -> None:
    if replicas < 1:
        raise ex.ConfigError("replicas", f"must be at least 1, got {replicas}")


###############################################################################
# Samplers
###############################################################################
def sample_wigner(
    n: int,
    dist: EntryDistribution,
    replicas: int,
    seed: int,
    workers: int = 1,
    levels: Optional[Sequence[int]] = None,
) -> SampleBatch:
    """
    Draws ``replicas`` Wigner matrices of size ``n`` and returns the spectra of
    their principal minors ``levels`` (all of ``1..n`` by default).
    """
    if n < 1:
        raise ex.ConfigError("n", f"must be at least 1, got {n}")
    _check_replicas(replicas)
    levels = tuple(range(1, n + 1)) if levels is None else tuple(sorted(levels))
    if not levels or levels[0] < 1 or levels[-1] > n:
        raise ex.IndexOutOfRange("levels", levels, f"subset of 1..{n}")
    log.debug("Sampling %d Wigner %s matrices of size %d", replicas, dist.variant, n)
    jobs = [(n, dist, seed, i, levels) for i in range(replicas)]
    return SampleBatch(
        seed,
        "wigner",
        levels,
        tuple(run_ordered(_wigner_replica, jobs, workers)),
        {"n": n, "distribution": dist.as_dict()},
    )


def sample_gue_minors(
    n: int, replicas: int, seed: int, workers: int = 1
) -> SampleBatch:
    """The GUE corners process up to level ``n``."""
    batch = sample_wigner(n, GUE, replicas, seed, workers)
    return SampleBatch(seed, "gue_minors", batch.levels, batch.replicas, {"n": n})


def sample_gue_configuration(m: int, seed: int) -> Configuration:
    """One GUE spectrum of size ``m``, as a starting configuration."""
    if m < 1:
        raise ex.ConfigError("m", f"must be at least 1, got {m}")
    H = hermitian_matrix(m, GUE, replica_rng(seed, 0))
    return _to_configuration(np.linalg.eigvalsh(H), "starting configuration")


def sample_rising_from_config(
    cfg: Configuration, T: int, replicas: int, seed: int, workers: int = 1
) -> SampleBatch:
    """
    The rising GUE process started from ``cfg`` at level ``m``, levels
    ``m+1..m+T``.

    Each replica borders ``diag(cfg)`` with ``T`` rows and columns of GUE
    entries. Conjugating by ``diag(U, I)`` shows that the law of the higher
    minors given the level-``m`` spectrum depends on that spectrum only, so
    this is exact.
    """
    if T < 1:
        raise ex.ConfigError("T", f"must be at least 1, got {T}")
    _check_replicas(replicas)
    log.debug("Sampling %d rising processes from m=%d, T=%d", replicas, cfg.m, T)
    jobs = [(cfg.values, T, seed, i) for i in range(replicas)]
    return SampleBatch(
        seed,
        "rising_from_config",
        tuple(range(cfg.m + 1, cfg.m + T + 1)),
        tuple(run_ordered(_bordered_replica, jobs, workers)),
        {"cfg": list(cfg.values), "T": T},
    )


def sample_gt_uniform(
    top: Configuration, replicas: int, seed: int, workers: int = 1
) -> SampleBatch:
    """
    Uniform Gelfand-Tsetlin patterns with top row ``top``, as the minor
    spectra of ``U diag(top) U*`` for Haar ``U``. The top level is stored
    exactly.
    """
    if top.m < 1:
        raise ex.ConfigError("top", "needs at least one point")
    _check_replicas(replicas)
    jobs = [(top.values, seed, i) for i in range(replicas)]
    return SampleBatch(
        seed,
        "gt_uniform",
        tuple(range(1, top.m + 1)),
        tuple(run_ordered(_gt_replica, jobs, workers)),
        {"top": list(top.values)},
    )


def sample_mt_pair(
    m: int, T: int, dist: EntryDistribution, seed: int, replica: int = 0
) -> MTPair:
    """
    An ``(m, T)``-pair: ``a`` is Wigner of size ``m + T`` with entries of law
    ``dist``; ``b`` copies the top-left ``m x m`` block of ``a`` and has
    independent GUE entries everywhere else. Drawn from the generator of
    replica ``replica`` of ``seed``.
    """
    if m < 0 or T < 1:
        raise ex.ConfigError("m/T", f"need m >= 0 and T >= 1, got m={m}, T={T}")
    rng = replica_rng(seed, replica)
    a = hermitian_matrix(m + T, dist, rng)
    b = hermitian_matrix(m + T, GUE, rng)
    b[:m, :m] = a[:m, :m]
    return MTPair(m, T, a, b)


def sample_mt_spectra(
    m: int, T: int, dist: EntryDistribution, replicas: int, seed: int
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Top-level spectra of ``a`` and ``b`` over independent pairs."""
    _check_replicas(replicas)
    spec_a, spec_b = [], []
    for i in range(replicas):
        pair = sample_mt_pair(m, T, dist, seed, replica=i)
        spec_a.append(np.sort(np.linalg.eigvalsh(pair.a))[::-1])
        spec_b.append(np.sort(np.linalg.eigvalsh(pair.b))[::-1])
    return spec_a, spec_b


###############################################################################
# Transition density
###############################################################################
def _vandermonde(x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return 1.0
    i, j = np.triu_indices(len(x), k=1)
    return float(np.prod(x[i] - x[j]))


def transition_density(
    lower: Sequence[float], upper: Sequence[float]
) -> float:
    """
    The GUE transition density from level ``n`` to level ``n + 1``,

        ``(2 pi)^{-1/2} 1[lower < upper] Delta(upper) / Delta(lower)
        exp(-|upper|^2/2 + |lower|^2/2)``

    with both configurations decreasing.

    Raises:
        DimensionMismatch
    """
    lower, upper = tuple(lower), tuple(upper)
    if len(upper) != len(lower) + 1:
        raise ex.DimensionMismatch(len(lower) + 1, len(upper), "upper level")
    if not interlaces(lower, upper):
        return 0.0
    exponent = -sum(y * y for y in upper) / 2 + sum(x * x for x in lower) / 2
    return (
        _vandermonde(upper)
        / _vandermonde(lower)
        * math.exp(exponent)
        / math.sqrt(2 * math.pi)
    )
