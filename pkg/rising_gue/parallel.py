import logging
import os
from multiprocessing import Pool, cpu_count
from typing import Callable, List, Optional, Sequence, TypeVar

from . import exceptions as ex

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "MK_THREADS"


def resolve_workers(threads: Optional[int] = None) -> int:
    """
    Number of worker processes: ``threads`` if given, else ``MK_THREADS``,
    else the available parallelism.

    Raises:
        ConfigError: If the value is not a positive integer.
    """
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return cpu_count()
        try:
            threads = int(env)
        except ValueError:
            raise ex.ConfigError(THREADS_ENV, f"not an integer: {env!r}")
    if threads < 1:
        raise ex.ConfigError("threads", f"must be at least 1, got {threads}")
    return threads


def run_ordered(
    fn: Callable[[T], R], items: Sequence[T], workers: int = 1
) -> List[R]:
    """
    ``[fn(item) for item in items]``, spread over a process pool when
    ``workers > 1``. Results keep the order of ``items`` whatever the
    scheduling, so reductions over them are deterministic.

    ``fn`` and the items must be picklable when a pool is used.
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]

    processes = min(workers, len(items))
    log.debug("Mapping %d items over %d processes", len(items), processes)
    with Pool(processes=processes) as pool:
        return pool.map(fn, items)
