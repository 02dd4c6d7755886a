"""
Fourier-side solver suite for specdisp.

Solves B(d/dx) y = V(x) y with a periodic trigonometric-polynomial potential
through its shift equation: coefficient recurrences, nested-sum and theta
iterations, Gamma-product closed forms, infinite products, the A_n
coefficient representation and 2-adic Fourier modes.
"""
import cmath
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.base import (
    TWO_PI, CoeffSeq, IndicialError, NumericalError, PoleError, Polynomial, ResonanceError,
    TrigPoly, TwoAdicSeq, ValidationError,
)
from ..models.enums import CoefficientMethod
from ..models.results import (
    ConvergenceReport, NestedSumReport, ProductReport, ReciprocalSeries, ThetaReport,
    TwoAdicModeReport,
)
from ..models.solver import (
    FunctionalEquation, GammaProductForm, LatticeSolution, MeromorphicFactor, Multiplier,
    MultiplierSpec, SeparationMode, normalized,
)
from ..utils.logger import get_logger
from .arith import reciprocal_trigpoly, two_adic_convolve, two_adic_inverse
from .specfun import complex_gamma, faulhaber_R1, pochhammer

logger = get_logger("hill")

DEFAULT_ORDER = 64
QUADRATURE_POINTS = 2048
RESONANCE_TOLERANCE = 1e-12
WINDOW_TOLERANCE = 1e-14
ITERATION_TOLERANCE = 1e-13
# |H(z + n tau) - 1| must decay faster than |z + n tau|^-SUMMABLE_EXPONENT
SUMMABLE_EXPONENT = 1.5


def multiplier_from_derivative_poly(B: Polynomial) -> Polynomial:
    """g(gamma) = B(i gamma), so y'' = V y gives g(gamma) = -gamma^2."""
    return Polynomial(tuple(complex(b) * 1j ** j for j, b in enumerate(B.coefficients)))


def _require_one_sided(V: TrigPoly) -> None:
    if V.is_zero:
        raise ValidationError("The potential must not vanish identically", "V")
    if min(V.coeffs) < 0:
        raise ValidationError("The potential must be supported on frequencies n >= 0", "V")


def build_functional_equation(gpoly: Multiplier, V: TrigPoly,
                              separation: Sequence[SeparationMode] = ()) -> FunctionalEquation:
    """Shift equation sum c_n yhat(gamma + 2 pi n / T) = g(gamma) yhat(gamma)."""
    if V.is_zero:
        raise ValidationError("The potential must not vanish identically", "V")
    return FunctionalEquation(coeffs=V, tau=V.omega, multiplier=gpoly, separation=tuple(separation))


def indicial_roots(V: TrigPoly, B: Polynomial) -> np.ndarray:
    """Roots nu of B(i nu) = c_0, sorted by real then imaginary part."""
    P = multiplier_from_derivative_poly(B) - Polynomial((V.coefficient(0),))
    if P.degree < 1:
        raise IndicialError("Indicial equation B(i nu) = c_0 has no isolated root",
                            {"degree": P.degree})
    roots = P.roots()
    order = np.lexsort((np.round(roots.imag, 12), np.round(roots.real, 12)))
    return roots[order]


def recurrence_solve(V: TrigPoly, B: Polynomial, branch: Union[int, complex] = 0,
                     K: int = 30) -> LatticeSolution:
    """Lattice solution exp(i nu x) sum a_k exp(-i k w x) by coefficient matching."""
    _require_one_sided(V)
    if K < 0:
        raise ValidationError("K must be >= 0", "K")
    g = multiplier_from_derivative_poly(B)
    c0 = V.coefficient(0)
    if isinstance(branch, (int, np.integer)) and not isinstance(branch, bool):
        roots = indicial_roots(V, B)
        if not 0 <= branch < roots.size:
            raise IndicialError(f"Branch {branch} not among {roots.size} indicial roots",
                                {"roots": roots.tolist()})
        nu = complex(roots[branch])
    else:
        nu = complex(branch)
        gap = abs(g(nu) - c0)
        if gap > 1e-9 * max(1.0, abs(c0)):
            raise IndicialError(f"nu={nu} does not satisfy B(i nu) = c_0 (gap {gap:.3e})",
                                {"nu": nu})

    omega = V.omega
    a = np.zeros(K + 1, dtype=complex)
    a[0] = 1.0
    for k in range(1, K + 1):
        denominator = g(nu - k * omega) - c0
        if abs(denominator) <= RESONANCE_TOLERANCE * max(1.0, abs(c0)):
            raise ResonanceError(f"Resonance at k={k}: B(i(nu - k)) = c_0", k)
        a[k] = sum(c * a[k - n] for n, c in V.coeffs.items() if 1 <= n <= k) / denominator
    logger.debug(f"Recurrence solved to K={K} on branch nu={nu}")
    return LatticeSolution(nu, a, omega)


def nested_sum_eval(V: TrigPoly, B: Polynomial, gamma: complex, depth: int) -> NestedSumReport:
    """
    Depth-truncated nested sum
    yhat_D(gamma) = (1/B(i gamma)) sum_{n>=1} c_n yhat_{D-1}(gamma + n tau).

    c_0 and negative frequencies stay out of the nesting and enter only the
    equation residual sum_n c_n yhat_D(gamma + n tau) - B(i gamma) yhat_D(gamma).
    """
    if depth < 0:
        raise ValidationError("depth must be >= 0", "depth")
    if V.is_zero:
        raise ValidationError("The potential must not vanish identically", "V")
    g = multiplier_from_derivative_poly(B)
    tau = V.omega
    gamma = complex(gamma)
    forward = {n: c for n, c in V.coeffs.items() if n >= 1}
    memo: Dict[Tuple[int, int], complex] = {}

    def symbol(offset: int) -> complex:
        value = complex(g(gamma + offset * tau))
        if value == 0:
            raise PoleError(f"B(i gamma) vanishes at gamma={gamma + offset * tau}",
                            {"offset": offset})
        return value

    def level(d: int, offset: int) -> complex:
        key = (d, offset)
        if key not in memo:
            if d == 0:
                memo[key] = 1.0 / symbol(offset)
            else:
                total = sum(c * level(d - 1, offset + n) for n, c in forward.items())
                memo[key] = total / symbol(offset)
        return memo[key]

    value = level(depth, 0)
    lhs = symbol(0) * value
    if depth == 0:
        step = abs(lhs - 1.0)
    else:
        step = normalized(lhs - sum(c * level(depth - 1, n) for n, c in forward.items()), lhs)
    shifted = sum(c * level(depth, n) for n, c in V.coeffs.items())
    return NestedSumReport(value, depth, step, normalized(shifted - lhs, lhs))


def cocycle_coefficient(H: Callable[[complex], complex], z: complex, n: int, tau: float = 1.0) -> complex:
    """A_n(z; tau) = prod_{j<n} H(z + j tau)."""
    result = 1.0 + 0j
    for j in range(n):
        result *= H(z + j * tau)
    return result


def _series_coefficients(c: Union[TrigPoly, Sequence[complex], np.ndarray]) -> np.ndarray:
    if isinstance(c, TrigPoly):
        if c.is_zero:
            return np.zeros(1, dtype=complex)
        if min(c.coeffs) < 0:
            raise ValidationError("Series coefficients need indices k >= 0", "c")
        values = np.zeros(max(c.coeffs) + 1, dtype=complex)
        for k, value in c.coeffs.items():
            values[k] = value
        return values
    return np.asarray(c, dtype=complex).reshape(-1)


def g_from_H(c: Union[TrigPoly, Sequence[complex], np.ndarray], H: Callable[[complex], complex],
             z: complex, kmax: Optional[int] = None, tau: float = 1.0) -> complex:
    """g(z) = sum_k c_k prod_{j<k} H(z + j tau)."""
    coefficients = _series_coefficients(c)
    if kmax is None:
        kmax = coefficients.size - 1
    coefficients = np.concatenate([coefficients, np.zeros(max(0, kmax + 1 - coefficients.size))])
    z = complex(z)

    total = 0j
    product = 1.0 + 0j
    direct_ok = True
    for k in range(kmax + 1):
        if coefficients[k] != 0:
            total += coefficients[k] * product
        if k < kmax:
            product *= H(z + k * tau)
        if not (cmath.isfinite(product) and cmath.isfinite(total)):
            direct_ok = False
            break
    if direct_ok:
        return total

    # Scaled-log evaluation
    logger.debug(f"g_from_H overflowed at z={z}; switching to scaled logarithms")
    logs = []
    log_product = 0j
    for k in range(kmax + 1):
        if coefficients[k] != 0:
            logs.append(cmath.log(coefficients[k]) + log_product)
        if k == kmax:
            break
        value = H(z + k * tau)
        if value == 0:
            break
        log_product += cmath.log(value)
    if not logs:
        return 0j
    peak = max(entry.real for entry in logs)
    scaled = sum(cmath.exp(entry - peak) for entry in logs)
    try:
        return cmath.exp(peak) * scaled
    except OverflowError:
        raise NumericalError(f"g_from_H overflows at z={z} even in scaled form",
                             {"log_magnitude": peak})


def factor_from_potential(V: TrigPoly, B: Polynomial) -> MeromorphicFactor:
    """H for c_0 + c_1 exp(-ix): yhat(z+1) = ((B(iz) - c_0) / c_1) yhat(z)."""
    if abs(V.period - TWO_PI) > 1e-12:
        raise ValidationError("Closed forms need a 2 pi periodic potential", "V")
    if not set(V.coeffs) <= {0, 1} or V.coefficient(1) == 0:
        raise ValidationError("Closed forms need a potential c_0 + c_1 exp(-ix) with c_1 != 0", "V")
    P = multiplier_from_derivative_poly(B) - Polynomial((V.coefficient(0),))
    if P.degree < 0:
        raise ValidationError("B(iz) - c_0 vanishes identically", "B")
    leading = complex(P.coefficients[-1])
    roots = tuple(complex(r) for r in P.roots())
    return MeromorphicFactor(C=leading / V.coefficient(1), roots=roots)


def gamma_closed_form(H: MeromorphicFactor) -> GammaProductForm:
    """Gamma-product solution of yhat(z+1) = H(z) yhat(z)."""
    return GammaProductForm(
        base=H.base,
        m=int(H.m),
        R1=faulhaber_R1(H.R),
        roots=H.roots,
        poles=H.poles,
        factor=H,
    )


def evaluate_gamma_form(form: GammaProductForm, z: complex) -> complex:
    """base^z Gamma(z)^m exp(-R1(z)) prod Gamma(z - rho) / prod Gamma(z - sigma)."""
    z = complex(z)
    value = cmath.exp(z * cmath.log(form.base)) * complex_gamma(z) ** form.m
    value *= cmath.exp(-complex(form.R1(z)))
    for rho in form.roots:
        value *= complex_gamma(z - rho)
    for sigma in form.poles:
        value /= complex_gamma(z - sigma)
    return value


def gamma_form_residual(form: GammaProductForm, z: complex) -> float:
    """Normalized residual of yhat(z+1) = H(z) yhat(z)."""
    if form.factor is None:
        raise ValidationError("The closed form carries no H to check against", "factor")
    rhs = form.factor(z) * evaluate_gamma_form(form, z)
    return normalized(evaluate_gamma_form(form, z + 1) - rhs, rhs)


def pochhammer_g(c: Union[TrigPoly, Sequence[complex], np.ndarray], A_list: Sequence[complex],
                 B_list: Sequence[complex], a: float, ab_ratio: complex, z: complex,
                 kmax: Optional[int] = None, printed_variant: bool = False) -> complex:
    """Pochhammer-ratio form of g for H(z) = ratio * prod(z+A_i)/prod(z+B_i) * exp(-a z)."""
    coefficients = _series_coefficients(c)
    if kmax is None:
        kmax = coefficients.size - 1
    z = complex(z)
    total = 0j
    for k in range(min(kmax, coefficients.size - 1) + 1):
        if coefficients[k] == 0:
            continue
        term = coefficients[k] * complex(ab_ratio) ** k
        for A in A_list:
            term *= pochhammer(z + A, k)
        for B in B_list:
            term /= pochhammer(z + B, k)
        if printed_variant:
            term *= cmath.exp(-a * k * z - a * k * (k + 1) / 2) / math.factorial(k)
        else:
            term *= cmath.exp(-a * k * z - a * k * (k - 1) / 2)
        total += term
    return total


def _decay_exponent(values: List[complex], tau: float, z: complex) -> float:
    """
    Fitted p in |H(z + n tau) - 1| ~ C |z + n tau|^-p over the second half of the samples.

    Returns inf when H is identically 1 there and 0 when no decay can be measured.
    """
    start = len(values) // 2
    d = np.abs(np.array(values[start:]) - 1.0)
    if not np.any(d):
        return math.inf
    w = np.abs(z + np.arange(start, len(values)) * tau)
    mask = (d > 0) & (w > 0)
    if np.count_nonzero(mask) < 2:
        return 0.0
    log_w, log_d = np.log(w[mask]), np.log(d[mask])
    if np.ptp(log_w) == 0:
        return 0.0
    slope, _ = np.polyfit(log_w, log_d, 1)
    return float(-slope)


def product_solution(H: Callable[[complex], complex], tau: float, z: complex, N: int) -> ProductReport:
    """
    Truncated product yhat_N(z) = prod_{n<N} 1/H(z + n tau) with tail diagnostics.

    The product is flagged converged only when |H - 1| decays like a power of
    |z + n tau| steeper than SUMMABLE_EXPONENT; tail_bound then estimates
    sum_{n>=N} |H(z + n tau) - 1|, otherwise it is inf.
    """
    if N < 2:
        raise ValidationError("N must be >= 2", "N")
    if tau == 0:
        raise ValidationError("tau must be nonzero", "tau")
    z = complex(z)
    values = []
    for n in range(N + 1):
        h = complex(H(z + n * tau))
        if h == 0 or not cmath.isfinite(h):
            raise PoleError(f"H vanishes or blows up at z={z + n * tau}", {"n": n})
        values.append(h)

    value = 1.0 + 0j
    for h in values[:N]:
        value /= h
    shifted = 1.0 + 0j
    for h in values[1:N + 1]:
        shifted /= h
    ratio = shifted / value
    expected = values[0] / values[N]
    telescoping = normalized(ratio - expected, expected)

    p = _decay_exponent(values, tau, z)
    converged = p > SUMMABLE_EXPONENT
    if not converged:
        tail = math.inf
        logger.warning(f"Product at z={z} does not converge (|H-1| decays like |z|^-{p:.3g})")
    elif math.isinf(p):
        tail = 0.0
    else:
        # d_N plus the integral of d_N (w_N / w_n)^p over n > N
        d_N, w_N = abs(values[N] - 1.0), abs(z + N * tau)
        tail = float(d_N + d_N * w_N / ((p - 1.0) * abs(tau)))
    equation = normalized(ratio - values[0], values[0])
    return ProductReport(value, N, telescoping, converged, tail, equation)


def _coefficient_closed(rec: ReciprocalSeries, g: Multiplier, n: int, x: complex) -> complex:
    return complex(g(x + n)) * rec.coefficient(n)


def A_n_coefficients(V: TrigPoly, g: Multiplier, n: int, x: complex,
                     method: Union[CoefficientMethod, str] = CoefficientMethod.CLOSED,
                     order: int = DEFAULT_ORDER, points: int = QUADRATURE_POINTS) -> complex:
    """A_n(x) = g(n + x) c*_n, either from the reciprocal series or by quadrature."""
    method = CoefficientMethod(method)
    x = complex(x)
    if method is CoefficientMethod.CLOSED:
        return _coefficient_closed(reciprocal_trigpoly(V, order), g, n, x)

    if abs(V.period - TWO_PI) > 1e-12:
        raise ValidationError("Quadrature coefficients need a 2 pi periodic potential", "V")
    t = TWO_PI * np.arange(points) / points
    vbar = V.reflected(t)
    scale = np.max(np.abs(vbar))
    if scale == 0 or np.min(np.abs(vbar)) <= 1e-12 * scale:
        raise ValidationError("The reflected potential vanishes on [0, 2 pi]", "V")
    kernel = np.exp(-1j * n * t)

    if not isinstance(g, Polynomial):
        return complex(g(x + n)) * complex(np.mean(kernel / vbar))

    # Taylor expansion of g(x + n) with n^j c*_n from (-i d/dt)^j (1 / Vbar)
    degree = max(g.degree, 0)
    vbar_derivatives = [V.reflected(t, j) for j in range(degree + 1)]
    F = [1.0 / vbar]
    for j in range(1, degree + 1):
        acc = sum(math.comb(j, i) * vbar_derivatives[i] * F[j - i] for i in range(1, j + 1))
        F.append(-acc / vbar)
    total = 0j
    derivative = g
    for j in range(degree + 1):
        weight = complex(derivative(x)) / math.factorial(j)
        if weight != 0:
            total += weight * (-1j) ** j * complex(np.mean(F[j] * kernel))
        derivative = derivative.derivative()
    return total


def theta_iteration(V: TrigPoly, g: Multiplier, w: complex, depth: int,
                    window: Optional[Sequence[int]] = None,
                    order: int = DEFAULT_ORDER) -> ThetaReport:
    """Depth-truncated theta_D(w) = sum_n A_n(w) theta_{D-1}(w + n) with theta_0 = 1."""
    if depth < 0:
        raise ValidationError("depth must be >= 0", "depth")
    rec = reciprocal_trigpoly(V, order)
    if window is None:
        magnitudes = np.abs(rec.factored)
        cutoff = WINDOW_TOLERANCE * magnitudes.max()
        window = [k - rec.shift for k in range(rec.factored.size) if magnitudes[k] > cutoff]
    window = tuple(int(n) for n in window)
    if not window:
        raise ValidationError("The index window is empty", "window")
    w = complex(w)
    coefficient_memo: Dict[Tuple[int, int], complex] = {}
    theta_memo: Dict[Tuple[int, int], complex] = {}

    def A(n: int, offset: int) -> complex:
        key = (n, offset)
        if key not in coefficient_memo:
            coefficient_memo[key] = _coefficient_closed(rec, g, n, w + offset)
        return coefficient_memo[key]

    def theta(d: int, offset: int) -> complex:
        key = (d, offset)
        if key not in theta_memo:
            if d == 0:
                theta_memo[key] = 1.0 + 0j
            else:
                theta_memo[key] = sum(A(n, offset) * theta(d - 1, offset + n) for n in window)
        return theta_memo[key]

    value = theta(depth, 0)
    if depth == 0:
        step = 0.0
    else:
        rebuilt = sum(A(n, 0) * theta(depth - 1, n) for n in window)
        step = normalized(value - rebuilt, rebuilt)
    rhs = sum(A(n, 0) * theta(depth, n) for n in window)
    return ThetaReport(value, depth, window, step, normalized(value - rhs, rhs))


def iterated_operator_solve(V: TrigPoly, nu: complex, iters: int,
                            seed: LatticeSolution,
                            tolerance: float = ITERATION_TOLERANCE) -> Tuple[LatticeSolution, ConvergenceReport]:
    """Jacobi sweeps on the lattice rows of (1/V) y'' = y.

    Each sweep divides the row residual by the diagonal c*_0 B(i(nu - k)) - [shift == 0]
    and keeps a_0 = 1. The rows are lower triangular, so K sweeps reach the recurrence.
    """
    _require_one_sided(V)
    if iters < 0:
        raise ValidationError("iters must be >= 0", "iters")
    nu = complex(nu)
    omega = V.omega
    K = seed.order
    rec = reciprocal_trigpoly(V, K)
    shift = rec.shift
    c_star = rec.factored
    symbols = -(nu - omega * np.arange(K + 1)) ** 2

    def rows(a: np.ndarray) -> np.ndarray:
        out = np.convolve(c_star, symbols * a)[:K + 1]
        out[shift:] -= a[:K + 1 - shift]
        return out

    a = np.array(seed.coeffs, dtype=complex)
    indicial = rows(a)[0]
    if abs(indicial) > 1e-10 * max(1.0, abs(c_star[0] * symbols[0])):
        raise IndicialError(f"nu={nu} does not satisfy the indicial condition", {"gap": abs(indicial)})
    diagonal = c_star[0] * symbols - (1.0 if shift == 0 else 0.0)
    for k in range(1, K + 1):
        if abs(diagonal[k]) <= RESONANCE_TOLERANCE:
            raise ResonanceError(f"Resonance at k={k} in the iteration", k)

    def residual(a: np.ndarray) -> float:
        r = rows(a)[1:]
        return float(np.max(np.abs(r)) / max(np.max(np.abs(a)), 1e-300)) if r.size else 0.0

    history = [residual(a)]
    count = 0
    while history[-1] > tolerance and count < iters:
        update = rows(a)
        a[1:] -= update[1:] / diagonal[1:]
        a[0] = 1.0
        count += 1
        history.append(residual(a))
    converged = history[-1] <= tolerance
    if not converged:
        logger.warning(f"Iteration stopped after {count} sweeps at residual {history[-1]:.3e}")
    report = ConvergenceReport(tuple(history), converged, count)
    return LatticeSolution(nu, a, omega), report


def ft_factorization_check(Y: TrigPoly, N: int, sampled: bool = False) -> float:
    """Max deviation between the coefficients of f_N and the product of Y's coefficients."""
    if N not in (2, 3):
        raise ValidationError("N must be 2 or 3", "N")
    if Y.is_zero:
        return 0.0
    reach = N * max(abs(n) for n in Y.coeffs)

    def product_formula(k: Tuple[int, ...]) -> complex:
        value = Y.coefficient(k[-1])
        for j in range(N - 1):
            value *= Y.coefficient(k[j] - k[j + 1])
        return value

    if sampled:
        size = 8
        while size <= 2 * reach + 1:
            size *= 2
        grid = Y.period * np.arange(size) / size
        mesh = np.meshgrid(*([grid] * N), indexing="ij")
        field = np.ones(mesh[0].shape, dtype=complex)
        partial = np.zeros(mesh[0].shape)
        for axis in mesh:
            partial = partial + axis
            field *= Y(partial)
        spectrum = np.fft.ifftn(field)
        coefficients = {}
        for k in np.ndindex(*([2 * reach + 1] * N)):
            lattice = tuple(int(i) - reach for i in k)
            coefficients[lattice] = complex(spectrum[tuple(i % size for i in lattice)])
    else:
        # f_N = Y(x1) Y(x1 + x2) ...: the j-th factor adds n to k_1..k_j
        coefficients = {tuple([0] * N): 1.0 + 0j}
        for j in range(1, N + 1):
            expanded: Dict[Tuple[int, ...], complex] = {}
            for k, value in coefficients.items():
                for n, c in Y.coeffs.items():
                    key = tuple(k[i] + n if i < j else k[i] for i in range(N))
                    expanded[key] = expanded.get(key, 0j) + value * c
            coefficients = expanded

    deviation = 0.0
    for k, value in coefficients.items():
        deviation = max(deviation, abs(value - product_formula(k)))
    return deviation


def two_adic_fourier_solution(c: TrigPoly, g: Callable[[float], complex], gamma: float,
                              nmax: int) -> Tuple[CoeffSeq, complex, float]:
    """Coefficients b_n(gamma) inverting c_k - g(log2 gamma) delta_{k,0}, and A(gamma)."""
    if gamma <= 0:
        raise ValidationError("gamma must be positive", "gamma")
    if not c.is_zero and min(c.coeffs) < 0:
        raise ValidationError("2-adic series need c_k with k >= 0", "c")
    entries = {k: v for k, v in c.coeffs.items()}
    entries[0] = entries.get(0, 0j) - complex(g(math.log2(gamma)))
    sequence = TwoAdicSeq.from_dict(entries)
    b = two_adic_inverse(sequence, nmax)
    identity = two_adic_convolve(sequence, b).values.copy()
    identity[0] -= 1.0
    n = np.arange(1, nmax + 1)
    amplitude = complex(np.sum(b.values * np.exp(1j * n * 2.0 ** gamma)))
    return b, amplitude, float(np.max(np.abs(identity)))


def two_adic_mode_solution(c: TrigPoly, modes: Sequence[SeparationMode], gamma: float,
                           nmax: int, t: float = 0.0) -> List[TwoAdicModeReport]:
    """Per-mode 2-adic amplitudes A_m(gamma) with time factors Lambda_m exp(-i C_m t / hbar)."""
    reports = []
    for mode in modes:
        multiplier: MultiplierSpec = mode.multiplier
        b, amplitude, identity = two_adic_fourier_solution(c, multiplier, gamma, nmax)
        factor = mode.Lambda * cmath.exp(-1j * multiplier.C_m * t / multiplier.params.hbar)
        reports.append(TwoAdicModeReport(gamma, b, amplitude, factor, identity))
    return reports
