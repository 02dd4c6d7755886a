"""
Acceptance suite for specdisp.

Each check runs a deterministic property or oracle comparison and returns a
VerificationRecord. Checks are grouped by area so a single suite can be run
on its own.
"""
import cmath
import math
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy import special

from ..models.base import CoeffSeq, Polynomial, TrigPoly, TwoAdicSeq
from ..models.enums import CoefficientMethod, DispersionVariant, LambertDirection, VerificationSuite
from ..models.physics import DispersionLaw, ModeSum, ParticleParams
from ..models.schema import VerificationRecord
from ..models.scenario import DEFAULT_SETTINGS
from ..models.solver import LatticeSolution, MeromorphicFactor, MultiplierSpec, OdeProblem, SeparationMode
from ..utils.logger import get_logger
from . import arith, dispersion, hill, oracle, specfun

logger = get_logger("verification")

SEED = 20240601

CheckFunction = Callable[[Dict[str, Any]], VerificationRecord]
_REGISTRY: Dict[VerificationSuite, List[CheckFunction]] = {}


def check(suite: VerificationSuite) -> Callable[[CheckFunction], CheckFunction]:
    """Register a check under a suite."""
    def decorator(func: CheckFunction) -> CheckFunction:
        _REGISTRY.setdefault(suite, []).append(func)
        return func
    return decorator


def _record(name: str, suite: VerificationSuite, value: float, tolerance: float,
            detail: str = "", at_least: bool = False) -> VerificationRecord:
    value = float(value)
    passed = value >= tolerance if at_least else value <= tolerance
    return VerificationRecord(name, suite.value, bool(passed and math.isfinite(value)),
                              value, tolerance, detail)


def _rng(offset: int = 0) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def _strip_points(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(0.5, 5.0, count) + 1j * rng.uniform(-3.0, 3.0, count)


def _random_complex(rng: np.random.Generator, size: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size))


# arith

@check(VerificationSuite.ARITH)
def mobius_values(settings: Dict[str, Any]) -> VerificationRecord:
    expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    got = [arith.mobius(n, settings["sieve_bound"]) for n in range(1, 11)]
    mismatches = sum(a != b for a, b in zip(expected, got))
    return _record("mobius_values", VerificationSuite.ARITH, mismatches, 0, f"mu(1..10) = {got}")


@check(VerificationSuite.ARITH)
def lambert_round_trip(settings: Dict[str, Any]) -> VerificationRecord:
    rng = _rng(1)
    worst = 0.0
    for _ in range(200):
        support = int(rng.integers(1, 65))
        seq = CoeffSeq(_random_complex(rng, support))
        there = arith.lambert_convert(seq, LambertDirection.TAYLOR_TO_LAMBERT)
        back = arith.lambert_convert(there, LambertDirection.LAMBERT_TO_TAYLOR)
        worst = max(worst, float(np.max(np.abs(back.values - seq.values))))
    return _record("lambert_round_trip", VerificationSuite.ARITH, worst, 1e-13)


@check(VerificationSuite.ARITH)
def two_adic_inverse_identity(settings: Dict[str, Any]) -> VerificationRecord:
    rng = _rng(2)
    worst = 0.0
    for _ in range(100):
        length = int(rng.integers(1, 8))
        values = _random_complex(rng, length, 0.5)
        values[0] = 1.0 + 0.5 * rng.uniform(0, 1) + 0.25j * rng.uniform(-1, 1)
        b = TwoAdicSeq(values)
        a = arith.two_adic_inverse(b, 128)
        identity = arith.two_adic_convolve(b, a).values.copy()
        identity[0] -= 1.0
        worst = max(worst, float(np.max(np.abs(identity))))
    return _record("two_adic_inverse_identity", VerificationSuite.ARITH, worst, 1e-14)


@check(VerificationSuite.ARITH)
def reciprocal_residual(settings: Dict[str, Any]) -> VerificationRecord:
    V = TrigPoly({0: 2.0, 1: 1.0})
    series = arith.reciprocal_trigpoly(V, settings["reciprocal_order"])
    return _record("reciprocal_residual", VerificationSuite.ARITH, series.residual, 1e-12,
                   "V = 2 + exp(-ix)")


@check(VerificationSuite.ARITH)
def lambert_rational_geometric(settings: Dict[str, Any]) -> VerificationRecord:
    result = arith.lambert_rational(lambda n: 1.0, lambda n: n, 64)
    if not result.is_rational:
        return _record("lambert_rational_geometric", VerificationSuite.ARITH, math.inf, 1e-12,
                       "no rational form detected")
    q = 0.3
    error = abs(result.evaluate(q) - q / (1 - q))
    return _record("lambert_rational_geometric", VerificationSuite.ARITH, error, 1e-12,
                   f"period {result.period}")


# specfun

@check(VerificationSuite.SPECFUN)
def gamma_recurrence(settings: Dict[str, Any]) -> VerificationRecord:
    worst = 0.0
    for z in _strip_points(_rng(3), 200):
        lhs = specfun.complex_gamma(z + 1)
        rhs = z * specfun.complex_gamma(z)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return _record("gamma_recurrence", VerificationSuite.SPECFUN, worst, 1e-12)


@check(VerificationSuite.SPECFUN)
def gamma_factorials(settings: Dict[str, Any]) -> VerificationRecord:
    worst = max(abs(specfun.complex_gamma(n + 1) - math.factorial(n)) / math.factorial(n)
                for n in range(16))
    return _record("gamma_factorials", VerificationSuite.SPECFUN, worst, 1e-13)


@check(VerificationSuite.SPECFUN)
def gamma_against_scipy(settings: Dict[str, Any]) -> VerificationRecord:
    points = np.concatenate([_strip_points(_rng(4), 50), -_strip_points(_rng(5), 50) + 0.25])
    worst = 0.0
    for z in points:
        reference = complex(special.gamma(z))
        worst = max(worst, abs(specfun.complex_gamma(z) - reference) / abs(reference))
    return _record("gamma_against_scipy", VerificationSuite.SPECFUN, worst, 1e-12)


@check(VerificationSuite.SPECFUN)
def faulhaber_printed_cases(settings: Dict[str, Any]) -> VerificationRecord:
    cases = [
        (Polynomial((0, 1)), Polynomial((0, Fraction(-1, 2), Fraction(1, 2)))),
        (Polynomial((0, 0, 1)), Polynomial((0, Fraction(1, 6), Fraction(-1, 2), Fraction(1, 3)))),
        (Polynomial((0, 0, 0, 1)), Polynomial((0, 0, Fraction(1, 4), Fraction(-1, 2), Fraction(1, 4)))),
        (Polynomial((0, -2, 1)), Polynomial((0, Fraction(7, 6), Fraction(-3, 2), Fraction(1, 3)))),
    ]
    mismatches = sum(specfun.faulhaber_R1(R) != expected for R, expected in cases)
    return _record("faulhaber_printed_cases", VerificationSuite.SPECFUN, mismatches, 0)


@check(VerificationSuite.SPECFUN)
def faulhaber_difference_identity(settings: Dict[str, Any]) -> VerificationRecord:
    rng = _rng(6)
    failures = 0
    for _ in range(20):
        degree = int(rng.integers(0, 7))
        R = Polynomial(tuple(Fraction(int(c), int(d)) for c, d in
                             zip(rng.integers(-9, 10, degree + 1), rng.integers(1, 7, degree + 1))))
        R1 = specfun.faulhaber_R1(R)
        if R1.shift(1) - R1 != R or R1(0) != 0:
            failures += 1
    return _record("faulhaber_difference_identity", VerificationSuite.SPECFUN, failures, 0)


def _mellin_of_lorentzian(s: complex) -> complex:
    if abs(s.imag) > 600:
        return 0j
    return (math.pi / 2) / cmath.sin(math.pi * s / 2)


@check(VerificationSuite.SPECFUN)
def mellin_lorentzian(settings: Dict[str, Any]) -> VerificationRecord:
    g = lambda t: 1.0 / (1.0 + t * t)
    worst = 0.0
    for s in (0.5, 1.0, 1.5):
        sample = specfun.mellin_numeric(g, s, strip_bound=2.0)
        worst = max(worst, abs(sample.value - _mellin_of_lorentzian(complex(s))))
    return _record("mellin_lorentzian", VerificationSuite.SPECFUN, worst, 1e-6)


@check(VerificationSuite.SPECFUN)
def mellin_bridge(settings: Dict[str, Any]) -> VerificationRecord:
    g = lambda t: 1.0 / (1.0 + t * t)
    worst = 0.0
    for gamma in np.linspace(-1.0, 1.0, 10):
        direct = specfun.mellin_bridge_value(g, gamma)
        contour = specfun.fourier_from_mellin(_mellin_of_lorentzian, gamma, 1.0)
        worst = max(worst, abs(direct - contour))
    return _record("mellin_bridge", VerificationSuite.SPECFUN, worst, 1e-6)


# dispersion

def _natural(l0: float = 0.1) -> ParticleParams:
    return ParticleParams.natural(l0)


@check(VerificationSuite.DISPERSION)
def relativistic_truncation(settings: Dict[str, Any]) -> VerificationRecord:
    params = _natural(0.1)
    law = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
    grid = dispersion.gaussian_spectrum([np.linspace(-5.0, 5.0, 101)], [0.0], 2.0)
    residuals = [dispersion.truncated_pde_residual(grid, K, law=law).max_residual for K in (5, 10, 15, 40)]
    monotone = all(a > b for a, b in zip(residuals, residuals[1:]))
    value = residuals[-1] if monotone else math.inf
    return _record("relativistic_truncation", VerificationSuite.DISPERSION, value, 1e-10,
                   f"K=5,10,15,40 residuals {residuals}")


@check(VerificationSuite.DISPERSION)
def schrodinger_first_term(settings: Dict[str, Any]) -> VerificationRecord:
    params = _natural(0.1)
    law = DispersionLaw(DispersionVariant.SCHRODINGER, params)
    grid = dispersion.gaussian_spectrum([np.linspace(-8.0, 8.0, 81)], [0.0], 2.0)
    residual = dispersion.truncated_pde_residual(grid, 0, law=law).max_residual
    return _record("schrodinger_first_term", VerificationSuite.DISPERSION, residual, 1e-12)


@check(VerificationSuite.DISPERSION)
def phase_sign_separation(settings: Dict[str, Any]) -> VerificationRecord:
    modes = ModeSum(((5, 1.0),), _natural(0.1))
    _, resolution = dispersion.resolve_phase_sign(modes, settings["phase_sign_order"])
    best = min(resolution.residual_plus, resolution.residual_minus)
    worst = max(resolution.residual_plus, resolution.residual_minus)
    value = best if worst >= 1e-2 else math.inf
    return _record("phase_sign_separation", VerificationSuite.DISPERSION, value, 1e-10,
                   f"sign {resolution.sign:+d}, other residual {worst:.3e}")


@check(VerificationSuite.DISPERSION)
def schrodinger_limit(settings: Dict[str, Any]) -> VerificationRecord:
    params = _natural(0.1)
    relativistic = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
    schrodinger = DispersionLaw(DispersionVariant.SCHRODINGER, params)
    worst_ratio = 0.0
    for scaled in (0.05, 0.1, 0.3):
        gamma = scaled / params.l0
        deviation = abs(relativistic.kinetic(gamma) - schrodinger.kinetic(gamma)) / schrodinger.kinetic(gamma)
        worst_ratio = max(worst_ratio, deviation / (0.5 * scaled ** 2))
    return _record("schrodinger_limit", VerificationSuite.DISPERSION, worst_ratio, 1.0,
                   "deviation / (0.5 (l0 gamma)^2)")


@check(VerificationSuite.DISPERSION)
def evolution_unitarity(settings: Dict[str, Any]) -> VerificationRecord:
    law = DispersionLaw(DispersionVariant.RELATIVISTIC, _natural(0.1))
    grid = dispersion.gaussian_spectrum([np.linspace(-9.0, 9.0, 181)], [1.0], 1.5)
    evolved = dispersion.evolve_spectrum(grid, 1.7, law)
    drift = float(np.max(np.abs(np.abs(evolved.amplitudes) - np.abs(grid.amplitudes))))
    return _record("evolution_unitarity", VerificationSuite.DISPERSION, drift, 1e-15)


@check(VerificationSuite.DISPERSION)
def evolution_semigroup(settings: Dict[str, Any]) -> VerificationRecord:
    law = DispersionLaw(DispersionVariant.RELATIVISTIC, _natural(0.1))
    grid = dispersion.gaussian_spectrum([np.linspace(-9.0, 9.0, 181)], [1.0], 1.5)
    composed = dispersion.evolve_spectrum(dispersion.evolve_spectrum(grid, 0.3, law), 0.7, law)
    direct = dispersion.evolve_spectrum(grid, 1.0, law)
    error = float(np.max(np.abs(composed.amplitudes - direct.amplitudes)))
    return _record("evolution_semigroup", VerificationSuite.DISPERSION, error, 1e-12)


@check(VerificationSuite.DISPERSION)
def velocity_consistency(settings: Dict[str, Any]) -> VerificationRecord:
    params = _natural(0.1)
    p = _rng(7).uniform(-50.0, 50.0, 100) * params.m0 * params.c
    xi = dispersion.velocity_ratio(p, params)
    x = p / (params.m0 * params.c)
    error = float(np.max(np.abs(xi - x * np.sqrt(1.0 - xi ** 2))))
    return _record("velocity_consistency", VerificationSuite.DISPERSION, error, 1e-12)


# hill

Y_SECOND = Polynomial((0, 0, 1))


@check(VerificationSuite.HILL)
def recurrence_exponential(settings: Dict[str, Any]) -> VerificationRecord:
    solution = hill.recurrence_solve(TrigPoly({0: 1.0}), Y_SECOND, branch=0, K=10)
    trajectory = oracle.integrate_ode(OdeProblem(lambda x: 1.0, 0.0, 1.0, 1.0, 1.0, settings["rk4_step"]))
    deviation = float(np.max(np.abs(trajectory.y - solution.evaluate(trajectory.x))))
    return _record("recurrence_exponential", VerificationSuite.HILL, deviation, 1e-8,
                   f"nu = {solution.nu}")


@check(VerificationSuite.HILL)
def recurrence_bessel_coefficients(settings: Dict[str, Any]) -> VerificationRecord:
    solution = hill.recurrence_solve(TrigPoly({1: 1.0}), Y_SECOND, branch=0, K=12)
    expected = np.array([(-1) ** k / math.factorial(k) ** 2 for k in range(13)])
    error = float(np.max(np.abs(solution.coeffs - expected)))
    return _record("recurrence_bessel_coefficients", VerificationSuite.HILL, error, 1e-12)


@check(VerificationSuite.HILL)
def gamma_squared_candidate(settings: Dict[str, Any]) -> VerificationRecord:
    V = TrigPoly({1: 1.0})
    equation = hill.build_functional_equation(hill.multiplier_from_derivative_poly(Y_SECOND), V)
    candidate = lambda z: cmath.exp(-1j * math.pi * z) * specfun.complex_gamma(z) ** 2
    worst = max(equation.normalized_residual(candidate, z) for z in _strip_points(_rng(8), 100))
    return _record("gamma_squared_candidate", VerificationSuite.HILL, worst, 1e-10)


CLOSED_FORM_FACTORS = {
    "z": MeromorphicFactor(m=1),
    "z^2": MeromorphicFactor(m=2),
    "z^2/(z-1)": MeromorphicFactor(m=2, poles=(1.0,)),
    "2z+1": MeromorphicFactor(A=2.0, roots=(-0.5,)),
    "2z^2+z": MeromorphicFactor(A=2.0, m=1, roots=(-0.5,)),
    "2z^2+z+1": MeromorphicFactor(A=2.0, roots=(complex(-1, -math.sqrt(7)) / 4,
                                                 complex(-1, math.sqrt(7)) / 4)),
    "exp(-z)": MeromorphicFactor(R=Polynomial((0, 1))),
}


@check(VerificationSuite.HILL)
def gamma_closed_forms(settings: Dict[str, Any]) -> VerificationRecord:
    points = _strip_points(_rng(9), 100)
    worst, label = 0.0, ""
    for name, factor in CLOSED_FORM_FACTORS.items():
        form = hill.gamma_closed_form(factor)
        residual = max(hill.gamma_form_residual(form, z) for z in points)
        if residual >= worst:
            worst, label = residual, name
    return _record("gamma_closed_forms", VerificationSuite.HILL, worst, 1e-9, f"worst family {label}")


@check(VerificationSuite.HILL)
def coefficient_methods_agree(settings: Dict[str, Any]) -> VerificationRecord:
    V = TrigPoly({0: 2.0, 1: 1.0})
    g = hill.multiplier_from_derivative_poly(Y_SECOND)
    x = complex(0.3, 0.2)
    worst = 0.0
    for n in range(-2, 3):
        closed = hill.A_n_coefficients(V, g, n, x, CoefficientMethod.CLOSED, settings["reciprocal_order"])
        quadrature = hill.A_n_coefficients(V, g, n, x, CoefficientMethod.QUADRATURE,
                                           points=settings["quadrature_points"])
        worst = max(worst, abs(closed - quadrature))
    return _record("coefficient_methods_agree", VerificationSuite.HILL, worst, 1e-8)


@check(VerificationSuite.HILL)
def coefficient_examples(settings: Dict[str, Any]) -> VerificationRecord:
    g = hill.multiplier_from_derivative_poly(Y_SECOND)
    x = complex(0.4, -0.3)
    worst = 0.0
    for n in range(-2, 3):
        flat = hill.A_n_coefficients(TrigPoly({0: 1.0}), g, n, x)
        shifted = hill.A_n_coefficients(TrigPoly({1: 1.0}), g, n, x)
        worst = max(worst, abs(flat - (-x * x if n == 0 else 0)))
        worst = max(worst, abs(shifted - (-(x - 1) ** 2 if n == -1 else 0)))
    return _record("coefficient_examples", VerificationSuite.HILL, worst, 1e-12)


@check(VerificationSuite.HILL)
def factorization_identity(settings: Dict[str, Any]) -> VerificationRecord:
    rng = _rng(10)
    worst = 0.0
    for N in (2, 3):
        for _ in range(5):
            indices = rng.choice(np.arange(-2, 3), size=int(rng.integers(1, 5)), replace=False)
            Y = TrigPoly({int(n): complex(c) for n, c in zip(indices, _random_complex(rng, indices.size, 0.5))})
            worst = max(worst, hill.ft_factorization_check(Y, N),
                        hill.ft_factorization_check(Y, N, sampled=True))
    return _record("factorization_identity", VerificationSuite.HILL, worst, 1e-13)


@check(VerificationSuite.HILL)
def pochhammer_agreement(settings: Dict[str, Any]) -> VerificationRecord:
    rng = _rng(11)
    A_list = (0.7 + 0.2j, 1.3)
    B_list = (2.1 - 0.4j,)
    a, ratio = 0.3, 0.8
    c = _random_complex(rng, 10)
    H = lambda z: ratio * (z + A_list[0]) * (z + A_list[1]) / (z + B_list[0]) * cmath.exp(-a * z)
    worst = 0.0
    for z in _strip_points(rng, 50):
        direct = hill.g_from_H(c, H, z)
        series = hill.pochhammer_g(c, A_list, B_list, a, ratio, z)
        worst = max(worst, abs(series - direct) / max(abs(direct), 1e-300))
    return _record("pochhammer_agreement", VerificationSuite.HILL, worst, 1e-9)


@check(VerificationSuite.HILL)
def product_convergence(settings: Dict[str, Any]) -> VerificationRecord:
    H = lambda z: 1.0 + 2.0 ** (-z)
    telescoping = 0.0
    for z in _strip_points(_rng(12), 10):
        for N in (2, 16, 64):
            telescoping = max(telescoping, hill.product_solution(H, 1.0, z, N).telescoping_error)
    report = hill.product_solution(H, 1.0, complex(1.2, 0.5), 40)
    value = max(telescoping / 1e-12, report.equation_residual / 1e-8)
    return _record("product_convergence", VerificationSuite.HILL, value, 1.0,
                   f"telescoping {telescoping:.3e}, residual at N=40 {report.equation_residual:.3e}")


@check(VerificationSuite.HILL)
def nested_sum_product(settings: Dict[str, Any]) -> VerificationRecord:
    gamma, depth = complex(0.3, 0.1), 6
    report = hill.nested_sum_eval(TrigPoly({1: 1.0}), Y_SECOND, gamma, depth)
    expected = 1.0
    for j in range(depth + 1):
        expected /= -(gamma + j) ** 2
    error = abs(report.value - expected) / abs(expected)
    return _record("nested_sum_product", VerificationSuite.HILL, max(error, report.step_residual), 1e-12)


@check(VerificationSuite.HILL)
def theta_shift_identity(settings: Dict[str, Any]) -> VerificationRecord:
    g = hill.multiplier_from_derivative_poly(Y_SECOND)
    V = TrigPoly({1: 1.0})
    z = complex(0.6, 0.4)
    shifted = hill.theta_iteration(V, g, z + 1, 5).value
    base = hill.theta_iteration(V, g, z, 4).value
    error = abs(shifted - (-z * z) * base) / abs(shifted)
    return _record("theta_shift_identity", VerificationSuite.HILL, error, 1e-12)


@check(VerificationSuite.HILL)
def iterated_matches_recurrence(settings: Dict[str, Any]) -> VerificationRecord:
    V = TrigPoly({1: 1.0})
    seed = LatticeSolution(0j, np.eye(1, 21)[0])
    solution, report = hill.iterated_operator_solve(V, 0j, 30, seed)
    expected = np.array([(-1) ** k / math.factorial(k) ** 2 for k in range(21)])
    error = float(np.max(np.abs(solution.coeffs - expected)))
    return _record("iterated_matches_recurrence", VerificationSuite.HILL, error, 1e-10,
                   f"{report.iterations} sweeps, converged={report.converged}")


@check(VerificationSuite.HILL)
def two_adic_mode_identity(settings: Dict[str, Any]) -> VerificationRecord:
    params = _natural(0.1)
    modes = [SeparationMode(1.0, MultiplierSpec(C, params)) for C in (0.5, 2.0 + 0.5j)]
    reports = hill.two_adic_mode_solution(TrigPoly({0: 0.3, 1: 1.0, 2: 0.25}), modes, 1.7, 64, t=0.8)
    worst = max(report.identity_error for report in reports)
    return _record("two_adic_mode_identity", VerificationSuite.HILL, worst, 1e-14)


# oracle

@check(VerificationSuite.ORACLE)
def binomial_limit(settings: Dict[str, Any]) -> VerificationRecord:
    report = oracle.binomial_series_partial(0.5, 40)
    bounds_hold = all(oracle.binomial_series_partial(0.5, K).error
                      <= oracle.binomial_series_partial(0.5, K).tail_bound for K in (5, 10, 20))
    value = report.error if bounds_hold else math.inf
    return _record("binomial_limit", VerificationSuite.ORACLE, value, 1e-12,
                   f"closed form {report.closed_form!r}")


@check(VerificationSuite.ORACLE)
def rk4_exponential(settings: Dict[str, Any]) -> VerificationRecord:
    trajectory = oracle.integrate_ode(OdeProblem(lambda x: 1.0, 0.0, 1.0, 1.0, 1.0, settings["rk4_step"]))
    return _record("rk4_exponential", VerificationSuite.ORACLE, abs(trajectory.y[-1] - math.e), 1e-10)


@check(VerificationSuite.ORACLE)
def rk4_order(settings: Dict[str, Any]) -> VerificationRecord:
    errors = []
    for step in (0.1, 0.05):
        trajectory = oracle.integrate_ode(OdeProblem(lambda x: 1.0, 0.0, 1.0, 1.0, 1.0, step))
        errors.append(abs(trajectory.y[-1] - math.e))
    ratio = errors[0] / errors[1]
    passed = 14.0 <= ratio <= 18.0
    return _record("rk4_order", VerificationSuite.ORACLE, 0.0 if passed else math.inf, 0.0,
                   f"error ratio {ratio:.3f}")


@check(VerificationSuite.ORACLE)
def finite_difference_order(settings: Dict[str, Any]) -> VerificationRecord:
    params = _natural(1.0)
    gamma = 1.0
    rate = params.E0 + params.hbar ** 2 * gamma ** 2 / (2 * params.m0)
    wave = lambda x, t: np.exp(1j * (gamma * x - rate * t / params.hbar))
    errors = []
    for h in (0.05, 0.025):
        grid = oracle.sample_field(wave, np.arange(41) * h, np.arange(5) * h)
        errors.append(oracle.finite_diff_residual(grid, params, 0).max_residual)
    ratio = errors[0] / errors[1]
    passed = 3.5 <= ratio <= 4.5
    return _record("finite_difference_order", VerificationSuite.ORACLE, 0.0 if passed else math.inf, 0.0,
                   f"error ratio {ratio:.3f}")


def suites_for(suite: VerificationSuite) -> List[VerificationSuite]:
    if suite is VerificationSuite.ALL:
        return [s for s in VerificationSuite if s is not VerificationSuite.ALL]
    return [suite]


def run_suite(suite: VerificationSuite = VerificationSuite.ALL,
              settings: Optional[Dict[str, Any]] = None) -> List[VerificationRecord]:
    """Run every check of a suite; a check that raises counts as failed."""
    merged = dict(DEFAULT_SETTINGS)
    merged.update(settings or {})
    records = []
    for group in suites_for(suite):
        for func in _REGISTRY.get(group, []):
            started = time.perf_counter()
            try:
                record = func(merged)
            except Exception as e:
                logger.warning(f"Check {func.__name__} raised {type(e).__name__}: {e}")
                record = VerificationRecord(func.__name__, group.value, False, None, None,
                                            f"{type(e).__name__}: {e}")
            status = "passed" if record.passed else "FAILED"
            logger.info(f"[{group.value}] {record.check} {status} "
                        f"({time.perf_counter() - started:.2f}s) {record.detail}".rstrip())
            records.append(record)
    return records
