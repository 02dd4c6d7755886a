"""
Special-function kernel for specdisp: complex Gamma, Pochhammer symbols,
Faulhaber antidifferences and numerical Mellin transforms.
"""
import cmath
import math
import warnings
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, List, Tuple

import numpy as np
from scipy import integrate

from ..models.base import DivergenceError, PoleError, Polynomial, ValidationError
from ..models.solver import MellinSample
from ..utils.logger import get_logger

logger = get_logger("specfun")

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

QUADRATURE_ACCEPTANCE = 1e-7


def _sinpi(z: complex) -> complex:
    """sin(pi z) with the integer part reduced first."""
    k = round(z.real)
    value = cmath.sin(math.pi * (z - k))
    return -value if k % 2 else value


def _lanczos(z: complex) -> complex:
    z -= 1
    x = LANCZOS_COEFFICIENTS[0]
    for i, coefficient in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        x += coefficient / (z + i)
    t = z + LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def complex_gamma(z: Any) -> complex:
    """Gamma function for complex z off the poles 0, -1, -2, ..."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise PoleError(f"Gamma has a pole at z={z.real:g}", {"z": z})
    if z.real < 0.5:
        # Reflection formula
        return math.pi / (_sinpi(z) * _lanczos(1 - z))
    return _lanczos(z)


def pochhammer(z: Any, k: int) -> complex:
    """Rising factorial (z)_k = z (z+1) ... (z+k-1)."""
    if k < 0:
        raise ValidationError("k must be >= 0", "k")
    result = 1.0 + 0j
    for j in range(k):
        result *= z + j
    return result


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> Tuple[Fraction, ...]:
    """Bernoulli numbers B_0..B_n as Fractions, with B_1 = -1/2."""
    numbers: List[Fraction] = []
    row = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        # Akiyama-Tanigawa
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        numbers.append(row[0])
    if n >= 1:
        numbers[1] = -numbers[1]
    return tuple(numbers)


@lru_cache(maxsize=None)
def power_sum_polynomial(tau: int) -> Polynomial:
    """Faulhaber polynomial p_tau(n) = sum_{j=0}^{n-1} j^tau."""
    if tau < 0:
        raise ValidationError("tau must be >= 0", "tau")
    bernoulli = bernoulli_numbers(tau)
    coefficients = [Fraction(0)] * (tau + 2)
    for k in range(tau + 1):
        coefficients[tau + 1 - k] += Fraction(math.comb(tau + 1, k)) * bernoulli[k] / (tau + 1)
    return Polynomial(tuple(coefficients))


def faulhaber_R1(R: Polynomial) -> Polynomial:
    """Antidifference R1 with R1(z+1) - R1(z) = R(z) and R1(0) = 0."""
    result = Polynomial(())
    for tau, coefficient in enumerate(R.coefficients):
        if coefficient != 0:
            result = result + power_sum_polynomial(tau).scale(coefficient)
    return result


def _quad_complex(func: Callable[[float], complex], a: float, b: float, **kwargs: Any) -> Tuple[complex, float]:
    """Adaptive quadrature of a complex integrand; unreliable results count as divergence."""
    options = {"limit": 200, "epsabs": 1e-13, "epsrel": 1e-11}
    options.update(kwargs)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        re, re_err = integrate.quad(lambda t: func(t).real, a, b, **options)
        im, im_err = integrate.quad(lambda t: func(t).imag, a, b, **options)
    value = complex(re, im)
    error = re_err + im_err
    if not (math.isfinite(value.real) and math.isfinite(value.imag)) or not math.isfinite(error):
        raise DivergenceError("Quadrature produced a non-finite value", (a, b))
    if error > QUADRATURE_ACCEPTANCE * max(1.0, abs(value)):
        detail = f": {caught[-1].message}" if caught else ""
        raise DivergenceError(f"Quadrature error estimate {error:.3e} too large{detail}", (a, b))
    return value, error


def mellin_numeric(g: Callable[[float], Any], s: complex, strip_bound: float = math.inf) -> MellinSample:
    """Mellin transform of g at s; [0, 1] directly, [1, inf) through t -> 1/t."""
    s = complex(s)
    if not 0 < s.real < strip_bound:
        raise ValidationError(f"Re s = {s.real:g} lies outside (0, {strip_bound:g})", "s")
    sigma, omega = s.real, s.imag

    # t^(sigma-1) is handled by the algebraic weight
    def near_zero(t: float) -> complex:
        if t <= 0.0:
            # the weighted rule samples the endpoint
            return complex(g(0.0)) if omega == 0 else 0j
        return complex(g(t)) * cmath.exp(1j * omega * math.log(t))

    def near_infinity(u: float) -> complex:
        if u <= 0.0:
            return 0j
        return complex(g(1.0 / u)) * u ** (-s - 1)

    head, head_err = _quad_complex(near_zero, 0.0, 1.0, weight="alg", wvar=(sigma - 1.0, 0.0))
    tail, tail_err = _quad_complex(near_infinity, 0.0, 1.0)
    return MellinSample(s=s, value=head + tail, error=head_err + tail_err)


def mellin_bridge_value(g: Callable[[float], Any], gamma: float) -> complex:
    """Fourier value yhat(gamma) = 2 pi g(exp(-gamma))."""
    return 2 * math.pi * complex(g(math.exp(-gamma)))


def fourier_from_mellin(M: Callable[[complex], complex], gamma: float, c: float) -> complex:
    """Inverse Mellin along Re s = c, scaled to yhat(gamma) = 2 pi g(exp(-gamma))."""
    def integrand(t: float) -> complex:
        s = complex(c, t)
        return complex(M(s)) * cmath.exp(gamma * s)

    value, _ = _quad_complex(integrand, -np.inf, np.inf)
    return value
