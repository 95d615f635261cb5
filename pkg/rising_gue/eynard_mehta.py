"""
The ingredients of the Eynard-Mehta construction for the rising GUE process
started at a fixed level-``m`` configuration: the interlacing functions
``phi``/``phi_tilde`` and their convolutions, the final-level functions
``psi``, the initial-level functions ``upsilon`` (and ``rho`` for the
fixed-top process), the change of basis between monomials and Hermite
polynomials, the weight of an interlacing chain and the Gram matrix.

The module also evaluates both sides of the three resummation identities that
turn the four-term kernel into a double contour integral.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import erfc, pbdv

from . import exceptions as ex
from .configuration import Configuration, KernelQuery, interlaces
from .contours import (
    Circle,
    QuadratureSettings,
    Ray,
    VerticalLine,
    integrate_contour,
    integrate_double,
    integrate_vertical,
    truncation_half_height,
)
from .integrands import FixedStartIntegrand
from .parallel import run_ordered
from .special_fns import elem_symmetric_all, hermite_eval

log = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2 * math.pi)

EXACT_LIMIT = 12
TERMSUM_MAX_M = 6
TERMSUM_MAX_DEPTH = 8
GRAM_MAX_M = 6
GRAM_MAX_L = 3
RESUMMATION_MAX_M = 3
RESUMMATION_MAX_DEPTH = 5
DEGENERACY_GAP = 1e-12


###############################################################################
# Single-variable functions
###############################################################################
def kappa(x):
    """
    The Gaussian tail ``(2 pi)^{-1/2} int_x^inf exp(-z^2/2) dz``.
    """
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2))
    return out if np.ndim(out) else float(out)


def gaussian_tail_moment(p: int, x):
    """
    ``(1/p!) int_0^inf u^p exp(-(u + x)^2 / 2) du``.

    For ``x <= 0`` every term of the recurrence
    ``I_p = (p-1) I_{p-2} - x I_{p-1}`` is positive and it is used directly;
    for ``x > 0`` the value is ``exp(-x^2/4) D_{-p-1}(x)`` with the parabolic
    cylinder function, which avoids the cancellation of the recurrence.
    """
    if p < 0:
        raise ex.IndexOutOfRange("gaussian_tail_moment", p, ">= 0")
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x)
    out = np.empty_like(flat)

    neg = flat <= 0
    xn = flat[neg]
    prev = math.sqrt(math.pi / 2) * erfc(xn / math.sqrt(2))
    if p == 0:
        val = prev
    else:
        cur = np.exp(-xn * xn / 2) - xn * prev
        for q in range(2, p + 1):
            prev, cur = cur, (q - 1) * prev - xn * cur
        val = cur
    out[neg] = val / math.factorial(p)

    xp = flat[~neg]
    if xp.size:
        out[~neg] = np.exp(-xp * xp / 4) * pbdv(-p - 1, xp)[0]

    return out.reshape(x.shape) if x.ndim else float(out[0])


def phi_conv(a: int, b: int, x, y):
    """
    ``phi^{(a,b)}(x, y) = 1_{a<b} 1_{x<=y} (y-x)^{b-a-1} / (b-a-1)!``, the
    ``(b-a)``-fold convolution of the interlacing indicator.
    """
    y = np.asarray(y, dtype=float)
    if a >= b:
        out = np.zeros_like(y)
    else:
        gap = y - x
        out = np.where(gap >= 0, np.abs(gap) ** (b - a - 1), 0.0) / math.factorial(
            b - a - 1
        )
    return out if out.ndim else float(out)


def psi(k: int, n: int, x):
    """
    ``psi_k(x|n)``: ``h_{n-k}(x) exp(-x^2/2)`` for ``n >= k``, the normalized
    Gaussian tail moment of order ``k-n-1`` otherwise.
    """
    if k < 1 or n < 0:
        raise ex.IndexOutOfRange("psi", (k, n), "k >= 1, n >= 0")
    if n >= k:
        x = np.asarray(x, dtype=float)
        out = hermite_eval(n - k, x) * np.exp(-x * x / 2)
        return out if np.ndim(out) else float(out)
    return gaussian_tail_moment(k - n - 1, x)


def psi_tilde(k: int, n: int, x):
    """
    ``psi_k`` truncated to the Hermite regime: zero when ``n < k``.
    """
    if k < 1 or n < 0:
        raise ex.IndexOutOfRange("psi_tilde", (k, n), "k >= 1, n >= 0")
    if n < k:
        out = np.zeros_like(np.asarray(x, dtype=float))
        return out if out.ndim else 0.0
    return psi(k, n, x)


def phi_tilde_conv(a: int, b: int, x: Optional[float], y):
    """
    The shifted interlacing function ``phi_tilde^{(a,b)}`` in closed form,

        ``phi^{(a,b)}(x,y) - 1_{a<b} sum_{k=a+1}^{b} h_{b-k}(y) psi_k(x|a)
        / (sqrt(2 pi) (b-k)!)``.

    ``x = None`` stands for the virtual variable, for which the value is
    ``1_{a<=b} h_{b-a}(y) / (sqrt(2 pi) (b-a)!)``.
    """
    y = np.asarray(y, dtype=float)
    if x is None:
        if a > b:
            out = np.zeros_like(y)
        else:
            out = hermite_eval(b - a, y) / (SQRT_2PI * math.factorial(b - a))
        return out if np.ndim(out) else float(out)

    out = np.asarray(phi_conv(a, b, x, y), dtype=float)
    for k in range(a + 1, b + 1):
        out = out - hermite_eval(b - k, y) * psi(k, a, x) / (
            SQRT_2PI * math.factorial(b - k)
        )
    return out if np.ndim(out) else float(out)


def phi_tilde_series(x: float, y: float, terms: int = 2000) -> float:
    """
    Partial sums of the Hermite expansion
    ``exp(-x^2/2) sum_k h_k(x) h_{k+1}(y) / (sqrt(2 pi) (k+1)!)``, Fejer
    averaged.

    The series converges only conditionally (it expands a step function), so
    this is a slowly converging oracle for :func:`phi_tilde_conv` with
    ``b = a + 1``, not a production path.
    """
    # Normalized Hermite values e^{-x^2/4} h_k(x)/sqrt(k!) stay bounded.
    hx_prev, hx = 0.0, math.exp(-x * x / 4)
    hy_prev, hy = math.exp(-y * y / 4), y * math.exp(-y * y / 4)
    partial = 0.0
    fejer = 0.0
    for k in range(terms):
        partial += hx * hy / math.sqrt(k + 1)
        fejer += partial
        hx_prev, hx = hx, (x * hx - math.sqrt(k) * hx_prev) / math.sqrt(k + 1)
        hy_prev, hy = hy, (y * hy - math.sqrt(k + 1) * hy_prev) / math.sqrt(k + 2)
    return math.exp((y * y - x * x) / 4) * fejer / terms / SQRT_2PI


###############################################################################
# Initial-level coefficients
###############################################################################
class InitialLevelCoefficients(NamedTuple):
    v_inverse: np.ndarray
    r: np.ndarray
    r_inverse: np.ndarray
    h_matrix: np.ndarray


def change_of_basis(m: int, inverse: bool = False, exact: bool = True) -> list:
    """
    The upper triangular matrix ``R`` with ``h(x) = R V(x)`` (or its inverse),
    as nested lists. Entries are :class:`~fractions.Fraction` when ``exact``.

    ``R[k][j] = (m-k)! (-1/2)^{(j-k)/2} / (((j-k)/2)! (m-j)!)`` for even
    ``j - k >= 0``; the inverse drops the sign.
    """
    if exact and m > EXACT_LIMIT:
        raise ex.SizeLimit("m", m, EXACT_LIMIT)
    out: list = [[0] * m for _ in range(m)]
    for k in range(1, m + 1):
        for j in range(k, m + 1, 2):
            half = (j - k) // 2
            sign = 1 if inverse or half % 2 == 0 else -1
            num = sign * math.factorial(m - k)
            den = 2**half * math.factorial(half) * math.factorial(m - j)
            out[k - 1][j - 1] = Fraction(num, den) if exact else num / den
    return out


def initial_level_coefficients(cfg: Configuration) -> InitialLevelCoefficients:
    """
    Vandermonde inverse, change of basis and Hermite matrix of a
    configuration.

    Args:
        cfg: The level-``m`` configuration.
    Returns:
        ``V^{-1}`` from the elementary symmetric residue formula, ``R`` and
        ``R^{-1}`` (exact rationals for ``m <= 12``, converted to floats) and
        ``h = [h_{m-k}(x_j)]``.
    Raises:
        DegenerateConfiguration: If two points are closer than ``1e-12``.
    """
    m = cfg.m
    x = cfg.as_array()
    for i in range(m - 1):
        if x[i] - x[i + 1] < DEGENERACY_GAP:
            raise ex.DegenerateConfiguration(i, i + 1, float(x[i] - x[i + 1]))

    v_inv = np.empty((m, m))
    for k in range(m):
        others = np.delete(x, k)
        e = elem_symmetric_all(list(others))
        denom = float(np.prod(x[k] - others))
        for j in range(m):
            v_inv[k, j] = (-1) ** j * e[j] / denom

    exact = m <= EXACT_LIMIT
    r = np.array(change_of_basis(m, exact=exact), dtype=float).reshape(m, m)
    r_inv = np.array(
        change_of_basis(m, inverse=True, exact=exact), dtype=float
    ).reshape(m, m)
    h = np.array([[hermite_eval(m - k, xj) for xj in x] for k in range(1, m + 1)])
    return InitialLevelCoefficients(v_inv, r, r_inv, h.reshape(m, m))


def upsilon_matrix(cfg: Configuration) -> np.ndarray:
    """
    ``U[k-1, j] = upsilon_k(x_j|m) = [h^{-1}]_{jk} exp(x_j^2/2)``.
    """
    coeffs = initial_level_coefficients(cfg)
    h_inv = coeffs.v_inverse @ coeffs.r_inverse
    return h_inv.T * np.exp(cfg.as_array() ** 2 / 2)[None, :]


def upsilon(k: int, n: int, x: float, cfg: Configuration) -> float:
    """
    ``upsilon_k(x|n)``. At ``n = m`` the argument must be a configuration
    point; above it the function is the convolution with ``phi^{(m,n)}``.
    """
    m = cfg.m
    if not 1 <= k <= m or n < m:
        raise ex.IndexOutOfRange("upsilon", (k, n), f"1 <= k <= {m}, n >= {m}")
    row = upsilon_matrix(cfg)[k - 1]
    if n == m:
        idx = _point_index(cfg, x, "upsilon")
        return float(row[idx])
    return float(np.sum(row * phi_conv(m, n, cfg.as_array(), x)))


def rho(i: int, x: float, cfg: Configuration) -> float:
    """
    ``rho_i(x_j|m) = [h^{-1}]_{ji}``, the top-level functions of the
    fixed-top process.
    """
    m = cfg.m
    if not 1 <= i <= m:
        raise ex.IndexOutOfRange("rho", i, f"1 <= i <= {m}")
    coeffs = initial_level_coefficients(cfg)
    h_inv = coeffs.v_inverse @ coeffs.r_inverse
    return float(h_inv[_point_index(cfg, x, "rho"), i - 1])


def _point_index(cfg: Configuration, x: float, family: str) -> int:
    for j, v in enumerate(cfg):
        if v == x:
            return j
    raise ex.IndexOutOfRange(family, x, f"a point of {cfg.values}")


###############################################################################
# Basis function dispatch
###############################################################################
@dataclass(frozen=True)
class BasisFunctionId:
    """
    Names one basis function: ``family`` and its integer indices.

    Families and indices: ``phi (a, b)``, ``phi_tilde (a, b)``,
    ``psi (k, n)``, ``psi_tilde (k, n)``, ``upsilon (k, n)``, ``rho (i,)``,
    ``kappa ()``.
    """

    family: str
    indices: Tuple[int, ...] = ()


def _check_conv(fid: BasisFunctionId) -> None:
    a, b = fid.indices
    if a < 0 or a > b:
        raise ex.IndexOutOfRange(fid.family, fid.indices, "0 <= a <= b")


_DISPATCH: Dict[str, Callable[..., Any]] = {
    "phi": lambda fid, args, cfg: phi_conv(*fid.indices, *args),
    "phi_tilde": lambda fid, args, cfg: phi_tilde_conv(*fid.indices, *args),
    "psi": lambda fid, args, cfg: psi(*fid.indices, *args),
    "psi_tilde": lambda fid, args, cfg: psi_tilde(*fid.indices, *args),
    "upsilon": lambda fid, args, cfg: upsilon(*fid.indices, *args, cfg),
    "rho": lambda fid, args, cfg: rho(*fid.indices, *args, cfg),
    "kappa": lambda fid, args, cfg: kappa(*args),
}

_ARITY = {
    "phi": 2,
    "phi_tilde": 2,
    "psi": 2,
    "psi_tilde": 2,
    "upsilon": 2,
    "rho": 1,
    "kappa": 0,
}


def eval_basis_function(
    fid: BasisFunctionId, args: Sequence[Any], cfg: Optional[Configuration] = None
) -> float:
    """
    Evaluates any basis function by its id.

    Args:
        fid: Which function.
        args: Positions; ``(x, y)`` for the two-variable families (``x`` may be
            ``None``, the virtual variable, for ``phi_tilde``), ``(x,)``
            otherwise.
        cfg: The initial configuration, required by ``upsilon`` and ``rho``.
    Raises:
        IndexOutOfRange
    """
    if fid.family not in _DISPATCH:
        raise ex.IndexOutOfRange("family", fid.family, f"one of {sorted(_DISPATCH)}")
    if len(fid.indices) != _ARITY[fid.family]:
        raise ex.IndexOutOfRange(
            fid.family, fid.indices, f"{_ARITY[fid.family]} indices"
        )
    if fid.family in ("phi", "phi_tilde"):
        _check_conv(fid)
    if fid.family in ("upsilon", "rho") and cfg is None:
        raise ex.IndexOutOfRange(fid.family, fid.indices, "a configuration")
    return _DISPATCH[fid.family](fid, tuple(args), cfg)


###############################################################################
# Interlacing chains and weights
###############################################################################
@dataclass(frozen=True)
class InterlacingChain:
    """
    Configurations at levels ``m, m+1, ..., m+L``; consecutive lengths must
    grow by one. Interlacing itself is not enforced, a violating chain simply
    has weight zero.
    """

    levels: Tuple[Configuration, ...]

    def __post_init__(self):
        levels = tuple(
            lv if isinstance(lv, Configuration) else Configuration(tuple(lv))
            for lv in self.levels
        )
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise ex.DimensionMismatch(2, len(levels), "chain length")
        for r in range(1, len(levels)):
            if len(levels[r]) != len(levels[r - 1]) + 1:
                raise ex.DimensionMismatch(
                    len(levels[r - 1]) + 1, len(levels[r]), f"level {r} of the chain"
                )

    @property
    def m(self) -> int:
        return len(self.levels[0])

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def is_interlacing(self) -> bool:
        return all(
            interlaces(self.levels[r - 1].values, self.levels[r].values)
            for r in range(1, len(self.levels))
        )


def interlacing_block(
    lower: Sequence[float],
    upper: Sequence[float],
    shift: Optional[Callable[[float], float]] = None,
) -> np.ndarray:
    """
    ``[phi(lower_k, upper_j)]`` with ``phi(x, y) = 1_{x<=y}``, the kernel of
    :func:`phi_conv`, and the virtual row of ones appended. With ``shift``,
    ``shift(lower_k)`` times the virtual row is subtracted from each row.
    """
    lo = np.asarray(lower, dtype=float)
    up = np.asarray(upper, dtype=float)
    block = (lo[:, None] <= up[None, :]).astype(float)
    if shift is not None:
        block = block - np.array([shift(v) for v in lo])[:, None]
    return np.vstack([block, np.ones((1, len(up)))])


def check_row_shift(
    lower: Sequence[float],
    upper: Sequence[float],
    shift: Callable[[float], float] = kappa,
) -> Tuple[float, float]:
    """
    Determinants of the interlacing block before and after the row shift;
    they agree for any ``shift``.
    """
    plain = float(np.linalg.det(interlacing_block(lower, upper)))
    shifted = float(np.linalg.det(interlacing_block(lower, upper, shift)))
    return plain, shifted


def weight_eval(chain: InterlacingChain, cfg: Configuration) -> float:
    """
    The unnormalized weight of an interlacing chain started at ``cfg``:
    the initial ``upsilon`` determinant, the final ``psi`` determinant and the
    product of the interlacing determinants.

    Raises:
        DimensionMismatch: If the chain does not start at ``cfg``.
    """
    if chain.levels[0].values != cfg.values:
        raise ex.DimensionMismatch(cfg.m, chain.m, "initial level of the chain")
    if not chain.is_interlacing:
        return 0.0

    m, top = cfg.m, chain.levels[-1]
    n_top = m + chain.depth
    initial = float(np.linalg.det(upsilon_matrix(cfg))) if m else 1.0
    final = float(
        np.linalg.det(
            np.array(
                [[psi(k, n_top, xj) for xj in top] for k in range(1, n_top + 1)]
            )
        )
    )
    steps = 1.0
    for r in range(1, len(chain.levels)):
        steps *= float(
            np.linalg.det(
                interlacing_block(chain.levels[r - 1].values, chain.levels[r].values)
            )
        )
    return initial * final * steps


###############################################################################
# Gram matrix
###############################################################################
@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    errors: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def deviation_from_identity(self) -> float:
        return float(np.max(np.abs(self.entries - np.eye(self.size))))

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.entries))


def _gram_entry(
    job: Tuple[Tuple[float, ...], int, int, int, float]
) -> Tuple[float, float]:
    values, L, k, j, abs_tol = job
    m = len(values)
    n_top = m + L
    degree = 2 * n_top
    cut = truncation_half_height(0.0, abs_tol / 10, degree)

    def final(y):
        return psi_tilde(j, n_top, y)

    if k > m:
        norm = SQRT_2PI * math.factorial(n_top - k)
        val, err = integrate.quad(
            lambda y: hermite_eval(n_top - k, y) * final(y) / norm,
            -cut,
            cut,
            epsabs=abs_tol / 10,
            epsrel=0,
            limit=200,
        )
        return val, err

    cfg = Configuration(values)
    row = upsilon_matrix(cfg)[k - 1]
    total, total_err = 0.0, 0.0
    for xr, coeff in zip(values, row):
        lo, hi = -max(cut, abs(xr) + 1), max(cut, abs(xr) + 1)
        val, err = integrate.quad(
            lambda y: phi_tilde_conv(m, n_top, xr, y) * final(y),
            lo,
            hi,
            points=[xr],
            epsabs=abs_tol / 10,
            epsrel=0,
            limit=200,
        )
        total += coeff * val
        total_err += abs(coeff) * err
    return total, total_err


def gram_matrix(
    cfg: Configuration, L: int, quad: QuadratureSettings, workers: int = 1
) -> GramMatrix:
    """
    The ``(m+L) x (m+L)`` Gram matrix of the shifted construction.

    Rows ``k <= m`` pair ``upsilon_k`` through ``phi_tilde^{(m, m+L)}`` with
    the final functions; rows ``k > m`` pair the virtual starts. Each entry is
    a one-dimensional quadrature; entries are independent and may be spread
    over ``workers`` processes.

    Raises:
        SizeLimit: For ``m > 6`` or ``L > 3``.
    """
    if cfg.m > GRAM_MAX_M:
        raise ex.SizeLimit("m", cfg.m, GRAM_MAX_M)
    if not 1 <= L <= GRAM_MAX_L:
        raise ex.SizeLimit("L", L, GRAM_MAX_L)

    size = cfg.m + L
    jobs = [
        (cfg.values, L, k, j, quad.abs_tol)
        for k in range(1, size + 1)
        for j in range(1, size + 1)
    ]
    results = run_ordered(_gram_entry, jobs, workers)
    entries = np.array([r[0] for r in results]).reshape(size, size)
    errors = np.array([r[1] for r in results]).reshape(size, size)
    log.debug(
        "Gram matrix of size %d, deviation %.2e",
        size,
        np.max(np.abs(entries - np.eye(size))),
    )
    return GramMatrix(entries, errors)


###############################################################################
# The four-term kernel
###############################################################################
class FixedStartTerms(NamedTuple):
    """
    The pieces of the four-term kernel: ``first = -phi^{(n1,n2)}``, ``middle``
    (the ``upsilon * phi`` sum) and ``final`` (the two sums that end at
    ``n2``).
    """

    first: float
    middle: float
    final: float

    @property
    def total(self) -> float:
        return self.first + self.middle + self.final


def _final_level_sum(m: int, n2: int, x2: float, n: int, y) -> Any:
    """``sum_{k=m+1}^{n2} h_{n2-k}(x2) psi_k(y|n) / (sqrt(2 pi) (n2-k)!)``"""
    total = 0.0
    for k in range(m + 1, n2 + 1):
        total = total + hermite_eval(n2 - k, x2) * psi(k, n, y) / (
            SQRT_2PI * math.factorial(n2 - k)
        )
    return total


def fixed_start_terms(
    cfg: Configuration, n1: int, x1: float, n2: int, x2: float
) -> FixedStartTerms:
    """
    Evaluates the four-term kernel in closed form.

    Raises:
        InvalidLevels: Unless ``n1, n2 > m``.
    """
    m = cfg.m
    if n1 <= m or n2 <= m:
        raise ex.InvalidLevels(n1, n2, f"n1, n2 > {m}")

    first = -float(phi_conv(n1, n2, x1, x2))
    final = float(_final_level_sum(m, n2, x2, n1, x1))
    middle = 0.0
    if m:
        pts = cfg.as_array()
        U = upsilon_matrix(cfg)
        gauss1 = math.exp(-x1 * x1 / 2)
        to_x2 = phi_conv(m, n2, pts, x2)
        at_points = np.asarray(_final_level_sum(m, n2, x2, m, pts))
        for ell in range(1, m + 1):
            h1 = hermite_eval(n1 - ell, x1) * gauss1
            middle += float(np.sum(U[ell - 1] * to_x2)) * h1
            final -= float(np.sum(U[ell - 1] * at_points)) * h1
    return FixedStartTerms(first, middle, final)


###############################################################################
# Resummation identities
###############################################################################
@dataclass(frozen=True)
class ResummationCheck:
    name: str
    params: Dict[str, Any]
    lhs: complex
    rhs: complex
    abs_diff: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "abs_diff", abs(complex(self.lhs) - complex(self.rhs)))

    def as_dict(self) -> Dict[str, Any]:
        return {
            "identity": self.name,
            "params": self.params,
            "lhs": [complex(self.lhs).real, complex(self.lhs).imag],
            "rhs": [complex(self.rhs).real, complex(self.rhs).imag],
            "abs_diff": self.abs_diff,
        }


def _check_size(cfg: Configuration, n2: int) -> None:
    if cfg.m > RESUMMATION_MAX_M:
        raise ex.SizeLimit("m", cfg.m, RESUMMATION_MAX_M)
    if n2 - cfg.m > RESUMMATION_MAX_DEPTH:
        raise ex.SizeLimit("n2 - m", n2 - cfg.m, RESUMMATION_MAX_DEPTH)


def _raw_integrand(integrand: FixedStartIntegrand):
    log_c = integrand.log_c

    def f(z, w):
        return np.exp(log_c + integrand.log_a(z) + integrand.log_b(w)) / (w - z)

    return f


def _separation(points: Sequence[float]) -> float:
    distinct = sorted(set(points))
    gaps = [b - a for a, b in zip(distinct, distinct[1:])]
    return min(gaps) if gaps else 1.0


def check_middle_term(
    cfg: Configuration, n1: int, x1: float, n2: int, x2: float, quad: QuadratureSettings
) -> ResummationCheck:
    """
    The ``upsilon`` sum of the four-term kernel against its double contour
    form, with ``z`` on small circles around the points ``<= x2`` and ``w``
    on a circle around ``x1``.
    """
    _check_size(cfg, n2)
    m = cfg.m
    middle = fixed_start_terms(cfg, n1, x1, n2, x2).middle

    integrand = FixedStartIntegrand(cfg.values, n1, x1, n2, x2)
    f = _raw_integrand(integrand)
    sep = _separation(list(cfg.values) + [x1])
    rz = 0.3 * sep
    rw = 2 * rz if x1 in cfg.values else rz

    total = 0j
    for xj in cfg:
        if xj <= x2:
            total += integrate_double(f, Circle(xj, rz), Circle(x1, rw), quad)
    rhs = (-1) ** (n2 - n1 - 1) * total / (2j * math.pi) ** 2
    return ResummationCheck(
        "middle_term",
        {"cfg": list(cfg.values), "n1": n1, "x1": x1, "n2": n2, "x2": x2, "m": m},
        middle,
        rhs,
    )


def check_final_terms(
    cfg: Configuration,
    n1: int,
    x1: float,
    n2: int,
    x2: float,
    quad: QuadratureSettings,
    d: Optional[float] = None,
) -> ResummationCheck:
    """
    The two sums ending at ``n2`` against the double integral with ``z`` on
    the vertical line ``Re z = d`` left of everything and ``w`` on a circle
    around ``x1``.

    Raises:
        ConfigError: When ``d`` is not left of the points and the circle, or so
            far left that ``e^(d^2/2)`` on the line exceeds its size at the
            leftmost point by more than ``abs_tol / eps``; the integral is then
            lost to cancellation.
    """
    _check_size(cfg, n2)
    final = fixed_start_terms(cfg, n1, x1, n2, x2).final

    others = [p for p in list(cfg.values) + [x2] if p != x1]
    rw = 0.3 * min((abs(p - x1) for p in others), default=1.0)
    lo = min(list(cfg.values) + [x1, x2])
    if d is None:
        d = lo - 1.0 - rw
    if not (d < x1 - rw and all(d < p for p in list(cfg.values) + [x2])):
        raise ex.ConfigError(
            "d", f"must lie left of every point and the circle, got {d}"
        )
    gain = (d * d - lo * lo) / 2
    if gain > math.log(quad.abs_tol / np.finfo(float).eps):
        raise ex.ConfigError(
            "d", f"line at {d} too far left for abs_tol = {quad.abs_tol}"
        )

    integrand = FixedStartIntegrand(cfg.values, n1, x1, n2, x2)
    degree = max(0, n2 - 2 * cfg.m - 2)
    line = VerticalLine(d, truncation_half_height(d, quad.abs_tol / 100, degree))
    total = integrate_double(_raw_integrand(integrand), line, Circle(x1, rw), quad)
    rhs = (-1) ** (n1 - n2 - 1) * total / (2j * math.pi) ** 2
    return ResummationCheck(
        "final_terms",
        {"cfg": list(cfg.values), "n1": n1, "x1": x1, "n2": n2, "x2": x2, "d": d},
        final,
        rhs,
    )


def check_vertical_line_transform(
    r: complex, d: float, depth: int, x2: float, quad: QuadratureSettings
) -> ResummationCheck:
    """
    ``(1/2 pi i) int_{d+iR} (z-x2)^{p-1} e^{z^2/2} / (z-r) dz`` against the
    Laplace-type integral over ``y > 0``, for ``p = depth = n2 - m >= 1`` and
    ``Re r > d``.
    """
    if depth < 1:
        raise ex.IndexOutOfRange("depth", depth, ">= 1")
    if depth > RESUMMATION_MAX_DEPTH:
        raise ex.SizeLimit("n2 - m", depth, RESUMMATION_MAX_DEPTH)
    if not r.real > d:
        raise ex.ConfigError("r", f"need Re(r) > d = {d}, got {r}")

    def line_integrand(z):
        return (z - x2) ** (depth - 1) * np.exp(z * z / 2) / (z - r)

    scale = min(1.0, r.real - d)
    line = VerticalLine(
        d, truncation_half_height(d, quad.abs_tol / 100, depth - 2), scale=scale
    )
    lhs = integrate_vertical(line_integrand, line, quad) / (2j * math.pi)

    coeffs = [
        hermite_eval(depth - ell, x2)
        / (math.factorial(depth - ell) * math.factorial(ell - 1))
        for ell in range(1, depth + 1)
    ]

    def ray_integrand(y):
        poly = sum(c * y ** (ell - 1) for ell, c in enumerate(coeffs, start=1))
        return np.exp(-r * y - y * y / 2) * poly

    length = max(0.0, -r.real) + math.sqrt(-2 * math.log(quad.abs_tol / 100)) + 10
    rays = integrate_contour(ray_integrand, Ray(0.0, 1.0, length), quad)
    rhs = math.factorial(depth - 1) * (-1) ** depth / SQRT_2PI * rays
    return ResummationCheck(
        "vertical_line_transform",
        {"r": [r.real, r.imag], "d": d, "depth": depth, "x2": x2},
        complex(lhs),
        complex(rhs),
    )


def verify_resummation(
    cfg: Configuration,
    q: KernelQuery,
    quad: QuadratureSettings,
    r: complex = 1 + 0.5j,
) -> List[ResummationCheck]:
    """
    Runs the three resummation checks on one query; the vertical line
    transform uses ``depth = n2 - m``, the query's ``x2`` and ``d`` left of
    ``Re r``.

    Raises:
        SizeLimit: For ``m > 3`` or ``n2 - m > 5``.
    """
    n1, x1, n2, x2 = q.n1, q.x1, q.n2, q.x2
    _check_size(cfg, n2)
    checks = [
        check_middle_term(cfg, n1, x1, n2, x2, quad),
        check_final_terms(cfg, n1, x1, n2, x2, quad),
        check_vertical_line_transform(r, r.real - 1.0, n2 - cfg.m, x2, quad),
    ]
    for c in checks:
        log.debug("%s: |lhs - rhs| = %.2e", c.name, c.abs_diff)
    return checks
