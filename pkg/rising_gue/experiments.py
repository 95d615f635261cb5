"""
Experiment configurations and the runners behind the command line.

A configuration is one JSON document naming a ``command`` and its
parameters. It is validated completely, ranges and cross-field requirements
included, before anything is computed, so a bad field never leaves partial
artifacts behind.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, stats

from . import __version__, artifacts, exceptions as ex
from .asymptotics import (
    ActionParams,
    default_time,
    find_critical_point,
    local_stats,
    saddle_sweep,
)
from .configuration import Configuration, KernelQuery, semicircle_quantiles
from .contours import Circle, QuadratureSettings, integrate_closed
from .expressions import compile_function, compile_functions, normalize
from .eynard_mehta import GRAM_MAX_L, GRAM_MAX_M, gram_matrix, verify_resummation
from .kernels import (
    BulkRescaledKernel,
    BulkScaling,
    ExtendedSineKernel,
    ExtendedSineParams,
    FixedStartKernel,
    FixedStartTermSumKernel,
    GUELevelKernel,
    MetcalfeKernel,
    RescaledFixedStartKernel,
    SineKernel,
    eval_kernel_grid,
    grid_queries,
)
from .parallel import resolve_workers
from .sampling import (
    GUE,
    EntryDistribution,
    replica_rng,
    sample_gt_uniform,
    sample_gue_configuration,
    sample_gue_minors,
    sample_rising_from_config,
    sample_wigner,
    stream_seed,
    transition_density,
)
from .special_fns import hermite_eval, hermite_explicit_sum, hermite_shift_expand
from .statistics import (
    CorrelationGrid,
    compare_kernel_matrices,
    determinantal_correlation,
    estimate_correlation,
    gauge_invariant_distance,
    kernel_matrix,
    predict_one_point,
)
from .tiling import (
    DiscreteKernelQuery,
    PolygonKernel,
    RescaledPolygonKernel,
    build_polygon_spec,
    level_density_exact,
    tiling_sweep,
)

log = logging.getLogger(__name__)

COMMANDS = (
    "eval-kernel",
    "sample",
    "corr",
    "converge",
    "saddle",
    "verify",
    "tiling",
    "compare-wigner",
)
STOCHASTIC = {"sample", "corr", "verify", "compare-wigner"}

KERNELS = (
    "fixed_start",
    "fixed_start_termsum",
    "fixed_start_rescaled",
    "gue_level",
    "gue_level_hermite",
    "extended_sine",
    "sine",
    "metcalfe",
    "tiling_rescaled",
)
SAMPLERS = ("gue_minors", "wigner", "rising_from_config", "gt_uniform")
START_SOURCES = ("explicit", "semicircle_quantiles", "from_sample")

# Tolerances of the identity suite
GRAM_TOL = 1e-5
TERMSUM_TOL = 1e-6
RESUMMATION_TOL = 1e-7
HERMITE_TOL = 1e-8
TRANSITION_TOL = 1e-8
KS_LEVEL = 0.01
SE_MULTIPLE = 3.0
MIN_AGREEMENT = 0.95
TREND_RATIO = 0.9

_REQUIRED = object()


###############################################################################
# Parameter schema
###############################################################################
@dataclass(frozen=True)
class Param:
    """
    One config field: its kind, default (required when absent) and range.

    Kinds: ``int``, ``float``, ``str``, ``ints``, ``floats``,
    ``grid`` (``[lo, hi, count]``), ``window`` (``[lo, hi]``), ``points``
    (``[[level, x], ...]``), ``start``, ``distribution`` and ``expressions``.
    """

    kind: str
    default: Any = _REQUIRED
    low: Optional[float] = None
    high: Optional[float] = None
    choices: Tuple[str, ...] = ()

    @property
    def required(self) -> bool:
        return self.default is _REQUIRED


_START = Param("start", None)
_QUAD_FIELDS = {
    "nodes_per_panel": Param("int", 16, 4, 256),
    "max_panels": Param("int", 1024, 1, 1 << 20),
    "abs_tol": Param("float", 1e-11, 0.0),
    "rel_tol": Param("float", 1e-11, 0.0),
    "initial_panels": Param("int", 4, 1, 1 << 20),
}

SCHEMAS: Dict[str, Dict[str, Param]] = {
    "eval-kernel": {
        "kernel": Param("str", choices=KERNELS),
        "start": _START,
        "n1": Param("int", 1),
        "n2": Param("int", 1),
        "x1": Param("grid", [-2.0, 2.0, 41]),
        "x2": Param("grid", [-2.0, 2.0, 41]),
        "n": Param("int", 1, 1),
        "N": Param("int", None, 2),
        "X": Param("float", 0.0, -2.0, 2.0),
        "T": Param("int", None, 1),
        "phi": Param("float", math.pi, 0.0, math.pi),
        "saddle": Param("str", "finite", choices=("finite", "limit")),
        "method": Param("str", None),
    },
    "sample": {
        "sampler": Param("str", choices=SAMPLERS),
        "start": _START,
        "n": Param("int", None, 1),
        "T": Param("int", None, 1),
        "distribution": Param("distribution", {"variant": "gue_complex"}),
        "replicas": Param("int", low=1),
    },
    "corr": {
        "start": Param("start"),
        "T": Param("int", low=1),
        "level": Param("int", None, 1),
        "k": Param("int", 1, 1, 3),
        "X": Param("float", 0.0, -2.0, 2.0),
        "scale": Param("int", None, 1),
        "scaling": Param("str", "sqrt_n", choices=("sqrt_n", "density")),
        "bins": Param("int", 32, 1, 4096),
        "window": Param("window", [-2.0, 2.0]),
        "replicas": Param("int", low=2),
    },
    "converge": {
        "start": Param("start"),
        "X": Param("float", 0.0, -2.0, 2.0),
        "Ts": Param("ints", low=1),
        "level": Param("int", 0),
        "grid": Param("grid", [-2.0, 2.0, 21]),
        "saddle": Param("str", "finite", choices=("finite", "limit")),
        "method": Param("str", "deformed", choices=("deformed", "ray_pair")),
    },
    "saddle": {
        "ms": Param("ints", low=1),
        "Xs": Param("floats", low=-2.0, high=2.0),
        "Ts": Param("ints", None, 1),
        "tol": Param("float", 1e-10, 0.0),
        "test_functions": Param("expressions", {}),
        "Rs": Param("floats", [2.0], 0.0),
    },
    "verify": {
        "samples": Param("int", 20, 1, 10_000),
        "max_m": Param("int", 3, 1, GRAM_MAX_M),
        "L": Param("int", 2, 1, GRAM_MAX_L),
        "hermite_max_n": Param("int", 12, 0, 40),
        "ks_replicas": Param("int", 2000, 10),
    },
    "tiling": {
        "start": Param("start"),
        "Ns": Param("ints", low=2),
        "points": Param("points", None),
        "method": Param("str", "residue", choices=("residue", "contour")),
        "exact_N": Param("int", None, 2, 8),
    },
    "compare-wigner": {
        "n": Param("int", low=2),
        "distribution": Param("distribution"),
        "replicas": Param("int", low=2),
        "X": Param("float", 0.0, -2.0, 2.0),
        "k": Param("int", 1, 1, 2),
        "scaling": Param("str", "density", choices=("sqrt_n", "density")),
        "bins": Param("int", 32, 1, 4096),
        "window": Param("window", [-2.0, 2.0]),
    },
}

# Fields every command accepts
_COMMON = {"command", "out", "seed", "threads", "quadrature", "description"}


def _check_range(name: str, value: float, p: Param) -> None:
    if p.low is not None and value < p.low:
        raise ex.ConfigError(name, f"must be >= {p.low}, got {value}")
    if p.high is not None and value > p.high:
        raise ex.ConfigError(name, f"must be <= {p.high}, got {value}")


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ex.ConfigError(name, f"expected an integer, got {value!r}")
    return value


def _as_float(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ex.ConfigError(name, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ex.ConfigError(name, f"must be finite, got {value!r}")
    return float(value)


def _as_list(name: str, value: Any, length: Optional[int] = None) -> list:
    if not isinstance(value, (list, tuple)) or not value:
        raise ex.ConfigError(name, f"expected a nonempty list, got {value!r}")
    if length is not None and len(value) != length:
        raise ex.ConfigError(name, f"expected {length} entries, got {len(value)}")
    return list(value)


def _coerce_start(name: str, value: Any) -> Dict[str, Any]:
    if not isinstance(value, Mapping) or len(value) != 1:
        raise ex.ConfigError(name, f"expected exactly one of {START_SOURCES}")
    (source, arg), = value.items()
    if source == "explicit":
        values = [_as_float(f"{name}.explicit", v) for v in _as_list(name, arg)]
        if len(set(values)) != len(values):
            raise ex.ConfigError(f"{name}.explicit", "points must be distinct")
        return {"explicit": sorted(values, reverse=True)}
    if source == "semicircle_quantiles":
        m = _as_int(f"{name}.semicircle_quantiles", arg)
        _check_range(f"{name}.semicircle_quantiles", m, Param("int", low=1))
        return {"semicircle_quantiles": m}
    if source == "from_sample":
        if not isinstance(arg, Mapping) or set(arg) != {"m", "seed"}:
            raise ex.ConfigError(f"{name}.from_sample", "expected keys 'm' and 'seed'")
        m = _as_int(f"{name}.from_sample.m", arg["m"])
        _check_range(f"{name}.from_sample.m", m, Param("int", low=1))
        return {"from_sample": {"m": m, "seed": _as_int(f"{name}.seed", arg["seed"])}}
    raise ex.ConfigError(name, f"unknown source {source!r}, expected {START_SOURCES}")


def _coerce_int(name: str, value: Any, p: Param) -> int:
    value = _as_int(name, value)
    _check_range(name, value, p)
    return value


def _coerce_float(name: str, value: Any, p: Param) -> float:
    value = _as_float(name, value)
    _check_range(name, value, p)
    return value


def _coerce_str(name: str, value: Any, p: Param) -> str:
    if not isinstance(value, str):
        raise ex.ConfigError(name, f"expected a string, got {value!r}")
    if p.choices and value not in p.choices:
        raise ex.ConfigError(name, f"expected one of {p.choices}, got {value!r}")
    return value


def _coerce_ints(name: str, value: Any, p: Param) -> List[int]:
    return [_coerce_int(name, v, p) for v in _as_list(name, value)]


def _coerce_floats(name: str, value: Any, p: Param) -> List[float]:
    return [_coerce_float(name, v, p) for v in _as_list(name, value)]


def _coerce_grid(name: str, value: Any, p: Param) -> List[Any]:
    lo, hi, count = _as_list(name, value, 3)
    lo, hi, count = _as_float(name, lo), _as_float(name, hi), _as_int(name, count)
    if not lo <= hi or count < 1 or (count > 1 and lo == hi):
        raise ex.ConfigError(name, f"expected [lo, hi, count], got {value!r}")
    return [lo, hi, count]


def _coerce_window(name: str, value: Any, p: Param) -> List[float]:
    lo, hi = (_as_float(name, v) for v in _as_list(name, value, 2))
    if not lo < hi:
        raise ex.ConfigError(name, f"expected lo < hi, got {value!r}")
    return [lo, hi]


def _coerce_points(name: str, value: Any, p: Param) -> List[List[Any]]:
    pairs = [_as_list(name, v, 2) for v in _as_list(name, value)]
    return [[_as_int(name, n), _as_float(name, x)] for n, x in pairs]


def _coerce_distribution(name: str, value: Any, p: Param) -> Dict[str, Any]:
    if not isinstance(value, Mapping):
        raise ex.ConfigError(name, f"expected an object, got {value!r}")
    try:
        EntryDistribution(**value)
    except (TypeError, ex.InvalidDistribution) as e:
        raise ex.ConfigError(name, str(e))
    return dict(value)


def _coerce_expressions(name: str, value: Any, p: Param) -> Dict[str, str]:
    if isinstance(value, (list, tuple)):
        value = {text: text for text in value}
    if not isinstance(value, Mapping):
        raise ex.ConfigError(name, f"expected a list or object, got {value!r}")
    normalized = {}
    for label, text in value.items():
        if not isinstance(text, str):
            raise ex.ConfigError(
                f"{name}.{label}", f"expected a string, got {text!r}"
            )
        try:
            compile_function(text)
        except (ex.ExpressionSyntaxError, ex.FunctionCallException) as e:
            raise ex.ConfigError(f"{name}.{label}", str(e))
        normalized[label] = normalize(text)
    return normalized


_COERCERS: Dict[str, Callable[[str, Any, Param], Any]] = {
    "int": _coerce_int,
    "float": _coerce_float,
    "str": _coerce_str,
    "ints": _coerce_ints,
    "floats": _coerce_floats,
    "grid": _coerce_grid,
    "window": _coerce_window,
    "points": _coerce_points,
    "start": lambda name, value, p: _coerce_start(name, value),
    "distribution": _coerce_distribution,
    "expressions": _coerce_expressions,
}


def _coerce(name: str, value: Any, p: Param) -> Any:
    if value is None:
        if p.required:
            raise ex.ConfigError(name, "is required")
        return None
    return _COERCERS[p.kind](name, value, p)


###############################################################################
# Cross-field checks
###############################################################################
def _needs(params: Mapping[str, Any], what: str, *names: str) -> None:
    for name in names:
        if params.get(name) is None:
            raise ex.ConfigError(name, f"is required for {what}")


def _start_size(start: Mapping[str, Any]) -> int:
    if "explicit" in start:
        return len(start["explicit"])
    if "semicircle_quantiles" in start:
        return start["semicircle_quantiles"]
    return start["from_sample"]["m"]


_KERNEL_METHODS = {
    "extended_sine": ("deformed", "ray_pair"),
    "tiling_rescaled": ("residue", "contour"),
}


def _check_eval_kernel(p: Dict[str, Any]) -> None:
    kernel = p["kernel"]
    if kernel.startswith("fixed_start") or kernel == "metcalfe":
        _needs(p, f"kernel {kernel}", "start")
    elif kernel == "tiling_rescaled":
        _needs(p, f"kernel {kernel}", "start", "N")
        if p["N"] % 2:
            raise ex.ConfigError("N", f"must be even, got {p['N']}")

    allowed = _KERNEL_METHODS.get(kernel)
    if allowed is None and p["method"] is not None:
        raise ex.ConfigError("method", f"does not apply to kernel {kernel}")
    if allowed is not None:
        if p["method"] is None:
            p["method"] = allowed[0]
        elif p["method"] not in allowed:
            raise ex.ConfigError("method", f"expected one of {allowed}")

    if kernel in ("fixed_start_rescaled", "extended_sine") and not abs(p["X"]) < 2:
        raise ex.ConfigError("X", "must lie strictly inside (-2, 2)")


def _check_sample(p: Dict[str, Any]) -> None:
    sampler = p["sampler"]
    if sampler in ("gue_minors", "wigner"):
        _needs(p, f"sampler {sampler}", "n")
    elif sampler == "rising_from_config":
        _needs(p, f"sampler {sampler}", "start", "T")
    else:
        _needs(p, f"sampler {sampler}", "start")


def _check_corr(p: Dict[str, Any]) -> None:
    m = _start_size(p["start"])
    if p["level"] is None:
        p["level"] = m + p["T"]
    if not m < p["level"] <= m + p["T"]:
        raise ex.ConfigError("level", f"must lie in {m + 1}..{m + p['T']}")
    if p["scale"] is None:
        p["scale"] = p["level"]


def _check_saddle(p: Dict[str, Any]) -> None:
    if p["Ts"] is not None and len(p["Ts"]) != len(p["ms"]):
        raise ex.ConfigError("Ts", "needs one entry per entry of 'ms'")
    for X in p["Xs"]:
        if not abs(X) < 2:
            raise ex.ConfigError("Xs", f"energies must lie in (-2, 2), got {X}")


def _check_tiling(p: Dict[str, Any]) -> None:
    if "explicit" not in p["start"]:
        raise ex.ConfigError("start", "tiling needs an explicit configuration")
    for N in p["Ns"]:
        if N % 2:
            raise ex.ConfigError("Ns", f"polygon sizes must be even, got {N}")
    if p["exact_N"] is not None and p["exact_N"] % 2:
        raise ex.ConfigError("exact_N", "must be even")

    m = len(p["start"]["explicit"])
    if p["points"] is None:
        p["points"] = [[m + 1, 0.0], [m + 1, 0.5], [m + 2, 0.0], [m + 2, -0.5]]
    top = m + min(p["Ns"]) - 1
    for n, _ in p["points"]:
        if not m < n <= top:
            raise ex.ConfigError("points", f"levels must lie in {m + 1}..{top}")


def _check_compare_wigner(p: Dict[str, Any]) -> None:
    if not abs(p["X"]) < 2:
        raise ex.ConfigError("X", "must lie strictly inside (-2, 2)")


CHECKS: Dict[str, Callable[[Dict[str, Any]], None]] = {
    "eval-kernel": _check_eval_kernel,
    "sample": _check_sample,
    "corr": _check_corr,
    "saddle": _check_saddle,
    "tiling": _check_tiling,
    "compare-wigner": _check_compare_wigner,
}


###############################################################################
# Configuration
###############################################################################
@dataclass(frozen=True)
class ExperimentConfig:
    """
    A validated experiment.

    Args:
        command: One of :data:`COMMANDS`.
        out: Output directory for the artifacts.
        seed: Batch seed; mandatory for stochastic commands.
        threads: Worker cap, ``None`` for ``MK_THREADS`` or all cores.
        quadrature: Quadrature settings shared by all integrals.
        params: The command's parameters, defaults filled in.
    """

    command: str
    out: Path
    seed: Optional[int] = None
    threads: Optional[int] = None
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(
        cls, raw: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None
    ) -> "ExperimentConfig":
        """
        Validates a config document; non-``None`` ``overrides`` (``seed``,
        ``out``, ``threads``, ``command``) replace the document's values.

        Raises:
            ConfigError
        """
        if not isinstance(raw, Mapping):
            raise ex.ConfigError("<root>", "the config must be a JSON object")
        raw = dict(raw)
        for key, value in (overrides or {}).items():
            if value is not None:
                raw[key] = value

        command = raw.get("command")
        if command not in COMMANDS:
            raise ex.ConfigError(
                "command", f"unknown command {command!r}, expected one of {COMMANDS}"
            )
        schema = SCHEMAS[command]
        unknown = sorted(set(raw) - set(schema) - _COMMON)
        if unknown:
            raise ex.ConfigError(unknown[0], f"not a field of command {command!r}")

        seed = raw.get("seed")
        if seed is not None:
            seed = _as_int("seed", seed)
            _check_range("seed", seed, Param("int", low=0))
        threads = raw.get("threads")
        if threads is not None:
            threads = _as_int("threads", threads)
            _check_range("threads", threads, Param("int", low=1))

        params = {
            name: _coerce(name, raw.get(name, None if p.required else p.default), p)
            for name, p in schema.items()
        }
        if command in STOCHASTIC and seed is None:
            raise ex.ConfigError("seed", f"is mandatory for command {command!r}")
        if command in CHECKS:
            CHECKS[command](params)

        return cls(
            command,
            Path(str(raw.get("out", "results"))),
            seed,
            threads,
            _quadrature(raw.get("quadrature", {})),
            params,
        )

    @classmethod
    def from_file(
        cls, path: Path, overrides: Optional[Mapping[str, Any]] = None
    ) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ex.ConfigError("--config", f"cannot read {path}: {e.strerror}")
        except json.JSONDecodeError as e:
            raise ex.ConfigError("--config", f"invalid JSON in {path}: {e}")
        return cls.from_dict(raw, overrides)

    def resolved(self) -> Dict[str, Any]:
        """The complete configuration, defaults included, as recorded in sidecars."""
        return {
            "command": self.command,
            "out": str(self.out),
            "seed": self.seed,
            "threads": self.threads,
            "quadrature": artifacts.to_jsonable(self.quadrature),
            **artifacts.to_jsonable(self.params),
        }

    def meta(self, workers: int) -> Dict[str, Any]:
        return {"config": self.resolved(), "workers": workers, "version": __version__}


def _quadrature(raw: Any) -> QuadratureSettings:
    if not isinstance(raw, Mapping):
        raise ex.ConfigError("quadrature", f"expected an object, got {raw!r}")
    unknown = sorted(set(raw) - set(_QUAD_FIELDS))
    if unknown:
        raise ex.ConfigError(f"quadrature.{unknown[0]}", "unknown setting")
    values = {
        name: _coerce(f"quadrature.{name}", raw.get(name, p.default), p)
        for name, p in _QUAD_FIELDS.items()
    }
    try:
        return QuadratureSettings(**values)
    except ex.ConfigError as e:
        raise ex.ConfigError(f"quadrature.{e.field_name}", e.reason)


###############################################################################
# Helpers
###############################################################################
def resolve_start(start: Mapping[str, Any]) -> Configuration:
    """The starting configuration named by a ``start`` field."""
    if "explicit" in start:
        return Configuration(tuple(start["explicit"]))
    if "semicircle_quantiles" in start:
        return semicircle_quantiles(start["semicircle_quantiles"])
    sample = start["from_sample"]
    return sample_gue_configuration(sample["m"], sample["seed"])


def _linspace(grid: Sequence[Any]) -> np.ndarray:
    lo, hi, count = grid
    return np.linspace(lo, hi, count)


def _extended_sine_params(
    cfg: Optional[Configuration], X: float, T: Optional[int], saddle: str
) -> ExtendedSineParams:
    if cfg is None or saddle == "limit":
        return ExtendedSineParams.from_energy(X)
    T = default_time(cfg.m) if T is None else T
    z0 = find_critical_point(ActionParams(cfg, X, T)).z0
    return ExtendedSineParams.from_saddle(z0)


def build_kernel(p: Mapping[str, Any], quad: QuadratureSettings) -> Any:
    """The kernel callable an ``eval-kernel`` config asks for."""
    kernel = p["kernel"]
    cfg = resolve_start(p["start"]) if p.get("start") else None
    if kernel == "fixed_start":
        return FixedStartKernel(cfg, quad)
    if kernel == "fixed_start_termsum":
        return FixedStartTermSumKernel(cfg)
    if kernel == "metcalfe":
        return MetcalfeKernel(cfg, quad)
    if kernel == "fixed_start_rescaled":
        T = default_time(cfg.m) if p["T"] is None else p["T"]
        saddle = None
        if p["saddle"] == "finite":
            saddle = find_critical_point(ActionParams(cfg, p["X"], T)).z0
        return RescaledFixedStartKernel(cfg, p["X"], T, quad, saddle)
    if kernel == "gue_level":
        return GUELevelKernel(p["n"], quad)
    if kernel == "gue_level_hermite":
        return GUELevelKernel(p["n"], quad, form="hermite")
    if kernel == "extended_sine":
        params = _extended_sine_params(cfg, p["X"], p["T"], p["saddle"])
        return ExtendedSineKernel(params, quad, p["method"])
    if kernel == "sine":
        return SineKernel(p["phi"])
    return RescaledPolygonKernel(build_polygon_spec(cfg, p["N"]), quad, p["method"])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: Dict[str, Any] = field(default_factory=dict)


def _check(name: str, value: float, tolerance: float, **detail) -> CheckResult:
    passed = bool(value <= tolerance)
    log.info("%s: %.3e, tolerance %.1e, passed: %s", name, value, tolerance, passed)
    return CheckResult(name, passed, float(value), tolerance, detail)


def random_configuration(rng: np.random.Generator, m: int) -> Configuration:
    """``m`` points with gaps in ``[0.3, 1.5)``, centered at 0."""
    values = np.cumsum(rng.uniform(0.3, 1.5, m))
    return Configuration.from_unsorted(values - values.mean())


###############################################################################
# Runners
###############################################################################
def run_eval_kernel(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    kernel = build_kernel(p, config.quadrature)
    queries = grid_queries(p["n1"], p["n2"], _linspace(p["x1"]), _linspace(p["x2"]))
    values = eval_kernel_grid(kernel, queries, workers)
    path = config.out / "kernel_grid.csv"
    return [artifacts.write_kernel_grid(path, queries, values, config.meta(workers))]


def run_sample(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    sampler, seed, replicas = p["sampler"], config.seed, p["replicas"]
    if sampler == "gue_minors":
        batch = sample_gue_minors(p["n"], replicas, seed, workers)
    elif sampler == "wigner":
        dist = EntryDistribution(**p["distribution"])
        batch = sample_wigner(p["n"], dist, replicas, seed, workers)
    elif sampler == "rising_from_config":
        cfg = resolve_start(p["start"])
        batch = sample_rising_from_config(cfg, p["T"], replicas, seed, workers)
    else:
        batch = sample_gt_uniform(resolve_start(p["start"]), replicas, seed, workers)
    path = config.out / "samples.csv"
    return [artifacts.write_sample_batch(path, batch, config.meta(workers))]


def _predict_centers(grid: CorrelationGrid, kernel: Any) -> CorrelationGrid:
    centers = grid.centers
    prediction = np.empty((len(centers),) * grid.k)
    for idx in np.ndindex(*prediction.shape):
        points = [(grid.level, float(centers[i])) for i in idx]
        if len(set(idx)) < len(idx):
            prediction[idx] = 0.0
        else:
            prediction[idx] = determinantal_correlation(kernel, points)
    return replace(grid, prediction=prediction)


def _agreement(grid: CorrelationGrid) -> Dict[str, Any]:
    within = grid.within(SE_MULTIPLE)
    fraction = float(np.mean(within))
    return {
        "bins": int(within.size),
        "within_se": int(np.sum(within)),
        "se_multiple": SE_MULTIPLE,
        "fraction": fraction,
        "passed": fraction >= MIN_AGREEMENT,
    }


def run_corr(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    cfg = resolve_start(p["start"])
    batch = sample_rising_from_config(cfg, p["T"], p["replicas"], config.seed, workers)
    scaling = BulkScaling(p["X"], p["scale"], p["scaling"])
    grid = estimate_correlation(
        batch,
        p["level"],
        p["k"],
        scaling,
        bins=p["bins"],
        window=tuple(p["window"]),
        workers=workers,
    )
    kernel = BulkRescaledKernel(FixedStartKernel(cfg, config.quadrature), scaling)
    if grid.k == 1:
        grid = predict_one_point(grid, kernel)
    else:
        grid = _predict_centers(grid, kernel)
    summary = _agreement(grid)
    log.info("corr: %d of %d bins agree", summary["within_se"], summary["bins"])
    meta = config.meta(workers)
    return [
        artifacts.write_correlation_grid(config.out / "corr.csv", grid, meta),
        artifacts.write_report(config.out / "corr_summary.json", summary, meta),
    ]


def converge_errors(
    cfg: Configuration,
    X: float,
    T: int,
    level: int,
    xs: Sequence[float],
    quad: QuadratureSettings,
    saddle: str = "finite",
    method: str = "deformed",
    workers: int = 1,
) -> Dict[str, float]:
    """
    Sup distance over ``xs x xs`` between the rescaled fixed-start kernel at
    local level ``level`` and the extended sine kernel, raw and through the
    gauge-invariant functionals.
    """
    z0 = find_critical_point(ActionParams(cfg, X, T)).z0
    if saddle == "limit":
        params = ExtendedSineParams.from_energy(X)
        rescaled = RescaledFixedStartKernel(cfg, X, T, quad)
    else:
        params = ExtendedSineParams.from_saddle(z0)
        rescaled = RescaledFixedStartKernel(cfg, X, T, quad, z0)
    limit = ExtendedSineKernel(params, quad, method)
    points = [(level, float(x)) for x in xs]
    A = kernel_matrix(rescaled, points, workers)
    B = kernel_matrix(limit, points, workers)
    report = compare_kernel_matrices(A, B, points)
    return {
        "T": T,
        "sup_error": float(np.max(np.abs(A - B))),
        "gauge_invariant": report.max_deviation,
    }


def run_converge(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    cfg = resolve_start(p["start"])
    xs = _linspace(p["grid"])
    rows, prev = [], None
    for T in p["Ts"]:
        err = converge_errors(
            cfg,
            p["X"],
            T,
            p["level"],
            xs,
            config.quadrature,
            saddle=p["saddle"],
            method=p["method"],
            workers=workers,
        )
        ratio = math.nan if prev is None else err["sup_error"] / prev
        prev = err["sup_error"]
        log.info("converge: T=%d sup error %.3e", T, err["sup_error"])
        rows.append((T, err["sup_error"], err["gauge_invariant"], ratio))
    ratios = [r[3] for r in rows[1:]]
    summary = {
        "ratios": ratios,
        "max_ratio": TREND_RATIO,
        "decreasing": all(r <= TREND_RATIO for r in ratios),
    }
    meta = config.meta(workers)
    columns = ("T", "sup_error", "gauge_invariant_error", "ratio")
    return [
        artifacts.write_csv(config.out / "converge.csv", columns, rows, meta),
        artifacts.write_report(config.out / "converge_summary.json", summary, meta),
    ]


def run_saddle(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    rows = saddle_sweep(p["ms"], p["Xs"], p["Ts"], p["tol"])
    meta = config.meta(workers)
    paths = [artifacts.write_saddle_sweep(config.out / "saddle.csv", rows, meta)]
    if p["test_functions"]:
        functions = compile_functions(p["test_functions"])
        reports = []
        for row in rows:
            cfg = semicircle_quantiles(row["m"])
            result = local_stats(cfg, row["X"], row["T"], functions, p["Rs"])
            key = {"m": row["m"], "X": row["X"], "T": row["T"]}
            reports.append({**key, **artifacts.to_jsonable(result)})
        path = config.out / "local_stats.json"
        paths.append(artifacts.write_report(path, reports, meta))
    return paths


###############################################################################
# Identity suite
###############################################################################
def hermite_contour(n: int, x: float, quad: QuadratureSettings) -> float:
    """
    ``h_n(x) = n!/(2 pi i) ∮ exp(x z - z^2/2) z^{-n-1} dz``, on the circle of
    radius ``sqrt(n + 1)`` where the integrand is smallest.
    """
    scale = float(math.factorial(n))
    value = integrate_closed(
        lambda z: scale * np.exp(x * z - z * z / 2) / z ** (n + 1),
        Circle(0j, math.sqrt(n + 1)),
        quad,
    )
    return (complex(value) / (2j * math.pi)).real


def check_hermite(max_n: int, quad: QuadratureSettings) -> CheckResult:
    worst = 0.0
    for n in range(max_n + 1):
        for x in np.linspace(-3, 3, 13):
            ref = float(hermite_eval(n, x))
            scale = max(1.0, abs(ref))
            forms = (
                hermite_explicit_sum(n, x),
                hermite_shift_expand(n, x - 0.5, 0.5),
                hermite_contour(n, x, quad),
            )
            worst = max(worst, *(abs(v - ref) / scale for v in forms))
    return _check("hermite_forms", worst, HERMITE_TOL, max_n=max_n)


def transition_mass(lower: Sequence[float]) -> float:
    """
    Integral of the transition density over all upper configurations; the
    interlacing region is a product of intervals.
    """
    lower = tuple(lower)
    ranges = (
        [(lower[0], math.inf)]
        + [(lower[i], lower[i - 1]) for i in range(1, len(lower))]
        + [(-math.inf, lower[-1])]
    )

    def density(*upper):
        return transition_density(lower, upper)

    value, _ = integrate.nquad(density, ranges, opts={"epsabs": 1e-12, "limit": 200})
    return value


def check_transition() -> CheckResult:
    lowers = [(0.3,), (1.1, -0.4)]
    masses = [transition_mass(x) for x in lowers]
    worst = max(abs(v - 1.0) for v in masses)
    return _check("transition_density_mass", worst, TRANSITION_TOL, masses=masses)


def check_haar_corners(replicas: int, seed: int, workers: int) -> CheckResult:
    """Level 1 of a uniform pattern with top row ``(1, -1)`` is uniform on [-1, 1]."""
    batch = sample_gt_uniform(Configuration((1.0, -1.0)), replicas, seed, workers)
    level_one = np.concatenate(batch.level(1))
    result = stats.kstest(level_one, stats.uniform(loc=-1.0, scale=2.0).cdf)
    return CheckResult(
        "haar_corners_uniformity",
        bool(result.pvalue >= KS_LEVEL),
        float(result.pvalue),
        KS_LEVEL,
        {"statistic": float(result.statistic), "replicas": replicas},
    )


def check_gram(p, seed: int, quad: QuadratureSettings, workers: int) -> CheckResult:
    worst = 0.0
    for i in range(p["samples"]):
        rng = replica_rng(seed, i)
        cfg = random_configuration(rng, int(rng.integers(1, p["max_m"] + 1)))
        gram = gram_matrix(cfg, p["L"], quad, workers)
        worst = max(worst, gram.deviation_from_identity())
    return _check("gram_identity", worst, GRAM_TOL, samples=p["samples"])


def _random_instance(rng: np.random.Generator, max_m: int):
    m = int(rng.integers(1, min(max_m, 3) + 1))
    cfg = random_configuration(rng, m)
    n1, n2 = (int(v) for v in rng.integers(m + 1, m + 4, 2))
    x1, x2 = (float(v) for v in rng.normal(0.0, 1.5, 2))
    return cfg, n1, x1, n2, x2


def check_termsum(p, seed: int, quad: QuadratureSettings, workers: int) -> CheckResult:
    worst = 0.0
    for i in range(p["samples"]):
        rng = replica_rng(seed, i)
        cfg, n1, x1, n2, x2 = _random_instance(rng, p["max_m"])
        points = [(n1, x1), (n2, x2)]
        report = gauge_invariant_distance(
            FixedStartKernel(cfg, quad), FixedStartTermSumKernel(cfg), points, workers
        )
        worst = max(worst, report.max_deviation)
    return _check("termsum_agreement", worst, TERMSUM_TOL, samples=p["samples"])


def check_resummation(p, seed: int, quad: QuadratureSettings) -> CheckResult:
    worst, failures = 0.0, []
    for i in range(p["samples"]):
        rng = replica_rng(seed, i)
        cfg, n1, x1, n2, x2 = _random_instance(rng, p["max_m"])
        for c in verify_resummation(cfg, KernelQuery(n1, x1, n2, x2), quad):
            worst = max(worst, c.abs_diff)
            if c.abs_diff > RESUMMATION_TOL:
                failures.append(c.as_dict())
    return _check(
        "resummation_identities", worst, RESUMMATION_TOL, failures=failures
    )


def run_verify(config: ExperimentConfig, workers: int) -> List[Path]:
    p, seed, quad = config.params, config.seed, config.quadrature
    gram, termsum, resummation, haar = (stream_seed(seed, k) for k in range(4))
    checks = [
        check_gram(p, gram, quad, workers),
        check_termsum(p, termsum, quad, workers),
        check_resummation(p, resummation, quad),
        check_hermite(p["hermite_max_n"], quad),
        check_transition(),
        check_haar_corners(p["ks_replicas"], haar, workers),
    ]
    report = {
        "passed": all(c.passed for c in checks),
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "value": c.value,
                "tolerance": c.tolerance,
                "detail": c.detail,
            }
            for c in checks
        ],
    }
    path = config.out / "verify.json"
    return [artifacts.write_report(path, report, config.meta(workers))]


###############################################################################
# Tiling and universality
###############################################################################
def tiling_exact_deviation(
    cfg: Configuration, N: int, quad: QuadratureSettings, method: str = "residue"
) -> float:
    """
    Largest difference between the exact one-point densities of the uniform
    tiling and the polygon kernel diagonal over all levels below the top.
    """
    spec = build_polygon_spec(cfg, N)
    kernel = PolygonKernel(spec, quad, method)
    worst = 0.0
    for level in range(1, N):
        for x, exact in level_density_exact(spec, level).items():
            value = complex(kernel(DiscreteKernelQuery(level, x, level, x))).real
            worst = max(worst, abs(value - float(exact)))
    return worst


def run_tiling(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    cfg = resolve_start(p["start"])
    points = [tuple(pt) for pt in p["points"]]
    rows = tiling_sweep(cfg, p["Ns"], points, config.quadrature, p["method"], workers)
    meta = config.meta(workers)
    paths = [artifacts.write_tiling_sweep(config.out / "tiling.csv", rows, meta)]
    if p["exact_N"] is not None:
        deviation = tiling_exact_deviation(
            cfg, p["exact_N"], config.quadrature, p["method"]
        )
        report = {"N": p["exact_N"], "max_deviation": deviation}
        path = config.out / "tiling_exact.json"
        paths.append(artifacts.write_report(path, report, meta))
    return paths


def compare_grids(a: CorrelationGrid, b: CorrelationGrid) -> List[Tuple[Any, ...]]:
    """
    Rows ``x1..xk, a, a_se, b, b_se, z`` with ``z`` the difference in units of
    the combined standard error (``nan`` where both errors vanish).
    """
    rows = []
    for idx in np.ndindex(*a.estimates.shape):
        se = math.hypot(a.std_errors[idx], b.std_errors[idx])
        diff = float(a.estimates[idx] - b.estimates[idx])
        z = abs(diff) / se if se > 0 else (0.0 if diff == 0 else math.inf)
        rows.append(
            tuple(float(a.centers[i]) for i in idx)
            + (
                float(a.estimates[idx]),
                float(a.std_errors[idx]),
                float(b.estimates[idx]),
                float(b.std_errors[idx]),
                z,
            )
        )
    return rows


def run_compare_wigner(config: ExperimentConfig, workers: int) -> List[Path]:
    p = config.params
    n, replicas = p["n"], p["replicas"]
    dist = EntryDistribution(**p["distribution"])
    scaling = BulkScaling(p["X"], n, p["scaling"])
    window, k = tuple(p["window"]), p["k"]
    wigner_seed, gue_seed = stream_seed(config.seed, 0), stream_seed(config.seed, 1)
    wigner = sample_wigner(n, dist, replicas, wigner_seed, workers, levels=[n])
    gue = sample_wigner(n, GUE, replicas, gue_seed, workers, levels=[n])
    a = estimate_correlation(wigner, n, k, scaling, p["bins"], window, workers=workers)
    b = estimate_correlation(gue, n, k, scaling, p["bins"], window, workers=workers)
    rows = compare_grids(a, b)
    zs = np.array([r[-1] for r in rows])
    fraction = float(np.mean(zs <= SE_MULTIPLE))
    summary = {
        "bins": len(rows),
        "se_multiple": SE_MULTIPLE,
        "fraction": fraction,
        "passed": fraction >= MIN_AGREEMENT,
    }
    log.info("compare-wigner: %.3f of bins within %.0f SE", fraction, SE_MULTIPLE)
    columns = tuple(f"x{i + 1}" for i in range(k)) + (
        "wigner",
        "wigner_se",
        "gue",
        "gue_se",
        "z",
    )
    meta = config.meta(workers)
    return [
        artifacts.write_csv(config.out / "compare_wigner.csv", columns, rows, meta),
        artifacts.write_report(
            config.out / "compare_wigner_summary.json", summary, meta
        ),
    ]


RUNNERS: Dict[str, Callable[[ExperimentConfig, int], List[Path]]] = {
    "eval-kernel": run_eval_kernel,
    "sample": run_sample,
    "corr": run_corr,
    "converge": run_converge,
    "saddle": run_saddle,
    "verify": run_verify,
    "tiling": run_tiling,
    "compare-wigner": run_compare_wigner,
}


def run(config: ExperimentConfig) -> List[Path]:
    """
    Runs one experiment and returns the artifacts it wrote.

    Raises:
        ConfigError, NonConvergence: and any library error of the command.
    """
    workers = resolve_workers(config.threads)
    log.info("Running %s with %d workers into %s", config.command, workers, config.out)
    paths = RUNNERS[config.command](config, workers)
    for path in paths:
        log.info("Wrote %s", path)
    return paths
