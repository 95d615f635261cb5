"""
Writers for the files the experiments produce. Every file is written to a
temporary file next to its target and moved into place, so readers never see
a partial artifact, and every artifact gets a ``<name>.meta.json`` sidecar with
the resolved configuration that produced it.

Floats are written with ``repr``, which round-trips exactly; reruns with the
same configuration therefore give byte-identical files.
"""

import csv
import dataclasses
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np

from . import exceptions as ex
from .contours import Estimate
from .kernels import KernelQuery
from .sampling import SampleBatch
from .statistics import CorrelationGrid

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

KERNEL_GRID_COLUMNS = ("n1", "x1", "n2", "x2", "re", "im", "abs_err_estimate")
SAMPLE_COLUMNS = ("replica", "level", "index", "value")
SADDLE_COLUMNS = (
    "m",
    "X",
    "T",
    "z0_re",
    "z0_im",
    "residual",
    "iterations",
    "limit_re",
    "limit_im",
    "distance_to_limit",
)
TILING_COLUMNS = ("N", "diagonal", "cycles", "determinants", "max_deviation")


def format_value(value: Any) -> str:
    """CSV cell text: ``repr`` for floats, ``str`` for everything else."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def to_jsonable(obj: Any) -> Any:
    """
    Converts numpy scalars and arrays, complex numbers, dataclasses, tuples
    and paths into plain JSON types.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "as_dict"):
            return to_jsonable(obj.as_dict())
        return {
            f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


###############################################################################
# Atomic writes
###############################################################################
def write_atomic(path: PathLike, text: str) -> Path:
    """
    Writes ``text`` to ``path`` through a temporary file in the same
    directory and ``os.replace``.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.debug("Wrote %s (%d bytes)", target, len(text))
    return target


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_json(path: PathLike, obj: Any) -> Path:
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"
    return write_atomic(path, text)


def write_csv(
    path: PathLike,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    meta: Mapping[str, Any],
) -> Path:
    """
    Writes a header row and ``rows`` as UTF-8 CSV, then the sidecar holding
    ``meta``.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    n = 0
    for row in rows:
        if len(row) != len(columns):
            raise ex.DimensionMismatch(len(columns), len(row), f"row {n}")
        writer.writerow([format_value(v) for v in row])
        n += 1
    target = write_atomic(path, buf.getvalue())
    write_json(sidecar_path(target), {"columns": list(columns), "rows": n, **meta})
    return target


def write_report(path: PathLike, report: Any, meta: Mapping[str, Any]) -> Path:
    """A JSON artifact and its sidecar."""
    target = write_json(path, report)
    write_json(sidecar_path(target), dict(meta))
    return target


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


###############################################################################
# Serializers
###############################################################################
def kernel_grid_rows(
    queries: Sequence[KernelQuery], values: Sequence[complex]
) -> List[tuple]:
    """Rows ``n1, x1, n2, x2, re, im, abs_err_estimate``."""
    rows = []
    for q, v in zip(queries, values):
        err = v.error if isinstance(v, Estimate) else 0.0
        z = complex(v)
        rows.append((q.n1, float(q.x1), q.n2, float(q.x2), z.real, z.imag, err))
    return rows


def write_kernel_grid(
    path: PathLike,
    queries: Sequence[KernelQuery],
    values: Sequence[complex],
    meta: Mapping[str, Any],
) -> Path:
    return write_csv(path, KERNEL_GRID_COLUMNS, kernel_grid_rows(queries, values), meta)


def sample_rows(batch: SampleBatch) -> Iterable[tuple]:
    """Rows ``replica, level, index, value``; index 0 is the largest point."""
    for r, rep in enumerate(batch.replicas):
        for level, cfg in zip(batch.levels, rep):
            for i, value in enumerate(cfg.values):
                yield (r, level, i, value)


def write_sample_batch(path: PathLike, batch: SampleBatch, meta: Mapping[str, Any]):
    info = {
        "seed": batch.seed,
        "model": batch.model,
        "levels": list(batch.levels),
        "replicas": batch.n_replicas,
        "params": batch.params,
        **meta,
    }
    return write_csv(path, SAMPLE_COLUMNS, sample_rows(batch), info)


def correlation_columns(grid: CorrelationGrid) -> tuple:
    """``x1..xk, estimate, std_error, prediction``."""
    return tuple(f"x{i + 1}" for i in range(grid.k)) + (
        "estimate",
        "std_error",
        "prediction",
    )


def write_correlation_grid(
    path: PathLike, grid: CorrelationGrid, meta: Mapping[str, Any]
) -> Path:
    info = {
        "k": grid.k,
        "level": grid.level,
        "replicas": grid.replicas,
        "edges": grid.edges,
        "scaling": grid.scaling,
        **meta,
    }
    return write_csv(path, correlation_columns(grid), grid.rows(), info)


def saddle_rows(rows: Sequence[Mapping[str, Any]]) -> List[tuple]:
    return [
        (
            r["m"],
            float(r["X"]),
            r["T"],
            r["z0"][0],
            r["z0"][1],
            r["residual"],
            r["iterations"],
            r["limit"][0],
            r["limit"][1],
            r["distance_to_limit"],
        )
        for r in rows
    ]


def write_saddle_sweep(
    path: PathLike, rows: Sequence[Mapping[str, Any]], meta: Mapping[str, Any]
) -> Path:
    return write_csv(path, SADDLE_COLUMNS, saddle_rows(rows), meta)


def write_tiling_sweep(path: PathLike, rows: Sequence[Any], meta: Mapping[str, Any]):
    """Rows ``N, diagonal, cycles, determinants, max_deviation``."""
    cells = [
        (
            row.N,
            row.report.diagonal,
            row.report.cycles,
            row.report.determinants,
            row.report.max_deviation,
        )
        for row in rows
    ]
    return write_csv(path, TILING_COLUMNS, cells, meta)
