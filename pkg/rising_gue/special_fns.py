"""
Scalar special functions shared by the kernels: probabilists' Hermite
polynomials, elementary symmetric polynomials, the semicircle law and
Pochhammer symbols in log-sign form.

All functions accept numpy arrays where that makes sense and are pure.
"""

import math
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.special import comb, gammaln, loggamma

from . import exceptions as ex

ArrayLike = Union[float, np.ndarray]


###############################################################################
# Hermite polynomials
###############################################################################
def hermite_eval(n: int, x: ArrayLike) -> ArrayLike:
    """
    Evaluates the probabilists' Hermite polynomial ``h_n(x)`` by the
    three-term recurrence ``h_{k+1} = x h_k - k h_{k-1}``.

    Args:
        n: The degree, ``n >= 0``.
        x: Point(s) of evaluation.
    Returns:
        ``h_n(x)``, with the shape of ``x``.
    """
    if n < 0:
        raise ex.IndexOutOfRange("hermite", n, "n >= 0")
    x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else prev.item()
    cur = x.copy()
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur if cur.ndim else cur.item()


def hermite_table(nmax: int, x: ArrayLike) -> np.ndarray:
    """
    All of ``h_0(x), ..., h_nmax(x)`` stacked along a new leading axis.
    """
    x = np.asarray(x)
    out = np.empty((nmax + 1,) + x.shape, dtype=np.result_type(x, float))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(1, nmax):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def hermite_normalized_table(nmax: int, x: ArrayLike) -> np.ndarray:
    """
    ``h_k(x) / sqrt(k!)`` for ``k = 0..nmax``, computed by the normalized
    recurrence so that it neither overflows nor loses accuracy for degrees in
    the thousands.
    """
    x = np.asarray(x)
    out = np.empty((nmax + 1,) + x.shape, dtype=np.result_type(x, float))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(1, nmax):
        out[k + 1] = (x * out[k] - math.sqrt(k) * out[k - 1]) / math.sqrt(k + 1)
    return out


def hermite_explicit_sum(n: int, x: float) -> float:
    """
    ``h_n(x)`` from the finite sum
    ``sum_r (-1)^r 2^{-r} n! / (r! (n-2r)!) x^{n-2r}``.

    Prone to cancellation for large ``n``; used as an oracle only.
    """
    total = 0.0
    for r in range(n // 2 + 1):
        coeff = math.factorial(n) / (
            math.factorial(r) * math.factorial(n - 2 * r) * 2**r
        )
        total += (-1) ** r * coeff * x ** (n - 2 * r)
    return total


def hermite_shift_expand(n: int, x: float, y: float) -> float:
    """
    ``sum_{r=0}^{n} C(n, r) y^{n-r} h_r(x)``, which equals ``h_n(x + y)``.
    """
    table = hermite_table(n, x)
    return float(
        sum(comb(n, r, exact=True) * y ** (n - r) * table[r] for r in range(n + 1))
    )


###############################################################################
# Elementary symmetric polynomials
###############################################################################
def elem_symmetric_all(args: Sequence) -> list:
    """
    Returns ``[e_0(args), ..., e_m(args)]`` by multiplying out ``prod(t + a)``.

    Integer (or :class:`fractions.Fraction`) inputs stay exact.
    """
    coeffs = [1]
    for a in args:
        nxt = coeffs + [0]
        for r in range(len(coeffs), 0, -1):
            nxt[r] = nxt[r] + a * coeffs[r - 1]
        coeffs = nxt
    return coeffs


def elem_symmetric(r: int, args: Sequence) -> float:
    """
    The ``r``-th elementary symmetric polynomial of ``args``.
    Zero when ``r > len(args)``, one when ``r == 0``.
    """
    if r < 0 or r > len(args):
        return 0
    return elem_symmetric_all(args)[r]


###############################################################################
# Semicircle law
###############################################################################
def semicircle_density(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.clip(4.0 - x**2, 0.0, None)) / (2 * np.pi)
    return out if out.ndim else float(out)


def semicircle_cdf(x: ArrayLike) -> ArrayLike:
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    out = 0.5 + x * np.sqrt(4.0 - x**2) / (4 * np.pi) + np.arcsin(x / 2) / np.pi
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def semicircle(x: ArrayLike):
    """
    Returns ``(density, cdf)`` of the semicircle law on ``[-2, 2]``.
    """
    return semicircle_density(x), semicircle_cdf(x)


###############################################################################
# Pochhammer symbols
###############################################################################
class SignedLog(NamedTuple):
    """
    A real number stored as ``sign * exp(log)``. ``sign == 0`` is an exact zero.
    """

    log: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log)


def log_pochhammer(a: float, k: int) -> SignedLog:
    """
    ``log|prod_{j<k} (a + j)|`` together with the sign of the product.

    The negative factors and the positive factors are each collapsed into a
    log-gamma difference, so ``k`` can be in the tens of thousands.

    Args:
        a: Real base.
        k: Number of factors, ``k >= 0``.
    Returns:
        A :class:`SignedLog`; sign ``0`` flags an exactly vanishing factor.
    """
    if k < 0:
        raise ex.IndexOutOfRange("pochhammer", k, "k >= 0")
    if k == 0:
        return SignedLog(0.0, 1)
    if a <= 0 and float(a).is_integer() and a + k - 1 >= 0:
        return SignedLog(-math.inf, 0)

    n_neg = int(min(max(math.ceil(-a), 0), k))
    log_abs = 0.0
    if n_neg:
        log_abs += gammaln(1 - a) - gammaln(1 - a - n_neg)
    if n_neg < k:
        log_abs += gammaln(a + k) - gammaln(a + n_neg)
    return SignedLog(float(log_abs), -1 if n_neg % 2 else 1)


def log_pochhammer_complex(a: Union[complex, np.ndarray], k: int) -> np.ndarray:
    """
    A branch of ``log prod_{j<k} (a + j)`` for complex ``a`` off the real axis;
    only its exponential is meaningful.
    """
    a = np.asarray(a, dtype=complex)
    if k == 0:
        return np.zeros_like(a)
    return loggamma(a + k) - loggamma(a)
