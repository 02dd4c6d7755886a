"""
Number-theoretic and coefficient-algebra kernel for specdisp.

Möbius sieve, Lambert/Taylor coefficient conversions, 2-adic arithmetic
inverses, reciprocals of trigonometric polynomials and the reduction of
periodic Lambert series to rational functions.
"""
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from ..models.base import (
    CoeffSeq, Polynomial, SingularInversionError, TrigPoly, TwoAdicSeq, ValidationError,
)
from ..models.enums import LambertDirection
from ..models.results import LambertRational, ReciprocalSeries
from ..utils.logger import get_logger

logger = get_logger("arith")

DEFAULT_SIEVE_BOUND = 10 ** 6
PERIOD_TOLERANCE = 1e-12
RESIDUAL_GRID = 256


@lru_cache(maxsize=8)
def mobius_table(bound: int) -> np.ndarray:
    """Möbius values mu[0..bound] (mu[0] unused) by an Eratosthenes sieve."""
    if bound < 1:
        raise ValidationError("sieve bound must be >= 1", "bound")
    is_prime = np.ones(bound + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(bound ** 0.5) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    mu = np.ones(bound + 1, dtype=np.int8)
    mu[0] = 0
    for p in np.nonzero(is_prime)[0]:
        mu[p::p] *= -1
        square = int(p) * int(p)
        if square <= bound:
            mu[square::square] = 0
    mu.setflags(write=False)
    logger.debug(f"Built Möbius sieve up to {bound}")
    return mu


def _table_for(n: int, bound: int) -> np.ndarray:
    size = 1024
    while size < n:
        size *= 2
    return mobius_table(min(size, bound))


def mobius(n: int, bound: int = DEFAULT_SIEVE_BOUND) -> int:
    """Möbius function for 1 <= n <= bound."""
    if isinstance(n, bool) or int(n) != n:
        raise ValidationError("n must be an integer", "n")
    n = int(n)
    if n < 1:
        raise ValidationError("mobius is defined for n >= 1", "n")
    if n > bound:
        raise ValidationError(f"n={n} exceeds the sieve bound {bound}", "n")
    return int(_table_for(n, bound)[n])


def dirichlet_convolve(a: CoeffSeq, b: CoeffSeq) -> CoeffSeq:
    """Dirichlet product (a * b)(n) = sum_{d | n} a_d b_{n/d}."""
    size = min(a.bound, b.bound)
    out = np.zeros(size, dtype=complex)
    for d in range(1, size + 1):
        count = size // d
        out[d - 1::d] += a.values[d - 1] * b.values[:count]
    return CoeffSeq(out)


def lambert_convert(seq: CoeffSeq, direction: Union[LambertDirection, str]) -> CoeffSeq:
    """Convert between Taylor coefficients A and Lambert coefficients B."""
    direction = LambertDirection(direction)
    size = seq.bound
    if direction is LambertDirection.LAMBERT_TO_TAYLOR:
        kernel = CoeffSeq(np.ones(size))
    else:
        kernel = CoeffSeq(_table_for(size, max(size, DEFAULT_SIEVE_BOUND))[1:size + 1].astype(float))
    return dirichlet_convolve(seq, kernel)


def lambert_derivative(seq: CoeffSeq, order: int) -> CoeffSeq:
    """Per-divisor coefficients of the order-th derivative: A_d (-d)^order."""
    if order < 0:
        raise ValidationError("order must be >= 0", "order")
    d = np.arange(1, seq.bound + 1, dtype=float)
    return CoeffSeq(seq.values * (-d) ** order)


def taylor_eval(seq: CoeffSeq, x: float) -> complex:
    """sum A_n exp(-n x)."""
    n = np.arange(1, seq.bound + 1)
    return complex(np.sum(seq.values * np.exp(-n * x)))


def lambert_eval(seq: CoeffSeq, x: float) -> complex:
    """sum B_n / (exp(n x) - 1)."""
    if x <= 0:
        raise ValidationError("Lambert series need x > 0", "x")
    n = np.arange(1, seq.bound + 1)
    return complex(np.sum(seq.values / np.expm1(n * x)))


def two_adic_convolve(b: TwoAdicSeq, a: CoeffSeq) -> CoeffSeq:
    """n -> sum over 2^k | n of b_k a_{n / 2^k}."""
    out = np.zeros(a.bound, dtype=complex)
    for n in range(1, a.bound + 1):
        k, m = 0, n
        while True:
            out[n - 1] += b[k] * a.values[m - 1]
            if m % 2:
                break
            k, m = k + 1, m // 2
    return CoeffSeq(out)


def two_adic_inverse(b: TwoAdicSeq, N: int) -> CoeffSeq:
    """Solve sum_{2^k | n} b_k a_{n/2^k} = delta_{n,1} for 1 <= n <= N."""
    if N < 1:
        raise ValidationError("N must be >= 1", "N")
    b0 = b[0]
    if b0 == 0:
        raise SingularInversionError("2-adic inverse needs b_0 != 0", {"b0": b0})
    a = np.zeros(N, dtype=complex)
    for n in range(1, N + 1):
        acc = 1.0 + 0j if n == 1 else 0j
        k, m = 1, n
        while m % 2 == 0:
            m //= 2
            acc -= b[k] * a[m - 1]
            k += 1
        a[n - 1] = acc / b0
    return CoeffSeq(a)


def reciprocal_trigpoly(V: TrigPoly, order: int) -> ReciprocalSeries:
    """Truncated power-series reciprocal of V after factoring its lowest frequency."""
    if order < 0:
        raise ValidationError("order must be >= 0", "order")
    if V.is_zero:
        raise SingularInversionError("Cannot invert the zero trigonometric polynomial")
    n0 = min(V.coeffs)
    w = np.zeros(max(V.coeffs) - n0 + 1, dtype=complex)
    for n, c in V.coeffs.items():
        w[n - n0] = c
    if abs(w[0]) < 1e-300:
        raise SingularInversionError("Factored constant term vanishes", {"shift": n0})

    # Normalize the constant term, then solve the triangular convolution
    w = w / w[0]
    scale = 1.0 / V.coeffs[n0]
    star = np.zeros(order + 1, dtype=complex)
    star[0] = 1.0
    for m in range(1, order + 1):
        upper = min(m, w.size - 1)
        star[m] = -np.dot(w[1:upper + 1], star[m - 1::-1][:upper])
    star *= scale

    x = np.arange(RESIDUAL_GRID) * V.period / RESIDUAL_GRID
    result = ReciprocalSeries(star, n0, V.period, 0.0)
    residual = float(np.max(np.abs(V(x) * result.as_trigpoly()(x) - 1.0)))
    logger.debug(f"Reciprocal of order {order}, shift {n0}, grid residual {residual:.3e}")
    return ReciprocalSeries(star, n0, V.period, residual)


def _detect_period(values: np.ndarray) -> Optional[int]:
    size = values.size
    for period in range(1, size // 2 + 1):
        if np.all(np.abs(values[period:] - values[:size - period]) <= PERIOD_TOLERANCE):
            return period
    return None


def lambert_rational(chi: Union[CoeffSeq, Callable[[int], complex]],
                     f: Callable[[int], int], nmax: int) -> LambertRational:
    """Taylor coefficients of sum chi(n) q^f(n) and its rational form when periodic."""
    if nmax < 2:
        raise ValidationError("nmax must be >= 2", "nmax")
    weight = chi.__getitem__ if isinstance(chi, CoeffSeq) else chi
    mu = _table_for(nmax, max(nmax, DEFAULT_SIEVE_BOUND))

    B = np.zeros(nmax, dtype=complex)
    previous = 0
    d = 1
    while True:
        fd = int(f(d))
        if fd <= previous:
            raise ValidationError("f must be positive and strictly increasing", "f")
        if fd > nmax:
            break
        previous = fd
        w = complex(weight(d))
        if w != 0:
            multiples = np.arange(fd, nmax + 1, fd)
            B[multiples - 1] += w * mu[multiples // fd]
        d += 1
    B_seq = CoeffSeq(B)
    A_seq = lambert_convert(B_seq, LambertDirection.LAMBERT_TO_TAYLOR)
    A = A_seq.values

    period = _detect_period(A)
    numerator = denominator = None
    if period is not None:
        numerator = Polynomial(tuple([0j] + [complex(v) for v in A[:period]]))
        denominator = Polynomial(tuple([1.0] + [0.0] * (period - 1) + [-1.0]))
    else:
        nonzero = np.nonzero(np.abs(A) > PERIOD_TOLERANCE)[0]
        last = int(nonzero[-1]) + 1 if nonzero.size else 0
        if last <= nmax // 2:
            numerator = Polynomial(tuple([0j] + [complex(v) for v in A[:last]]))
            denominator = Polynomial((1.0,))
    logger.debug(f"Lambert series period {period} on [1, {nmax}]")
    return LambertRational(A_seq, B_seq, period, numerator, denominator)
