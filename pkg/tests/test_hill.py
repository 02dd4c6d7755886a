"""
Tests for the Fourier-side solver suite.
"""
import cmath
import math

import numpy as np
import pytest
from scipy import special

from src.models.base import (
    IndicialError, NumericalError, PoleError, Polynomial, ResonanceError, TrigPoly, ValidationError,
)
from src.models.enums import CoefficientMethod
from src.models.physics import ParticleParams
from src.models.solver import LatticeSolution, MultiplierSpec, OdeProblem, SeparationMode
from src.services import hill, oracle, specfun
from src.services.verification import CLOSED_FORM_FACTORS

SECOND = Polynomial((0, 0, 1))


@pytest.fixture
def g():
    return hill.multiplier_from_derivative_poly(SECOND)


def bessel_coefficients(K):
    return np.array([(-1) ** k / math.factorial(k) ** 2 for k in range(K + 1)])


class TestFunctionalEquation:
    """Test multipliers, shift equations and indicial roots."""

    def test_multiplier(self, g):
        """y'' gives g(gamma) = -gamma^2."""
        assert g == Polynomial((0, 0, -1))
        assert g(2.0) == pytest.approx(-4.0)

    @pytest.mark.parametrize("z", [0.6 + 0.4j, 2.3 - 1.1j, 4.0 + 2.5j])
    def test_gamma_squared_candidate(self, g, z):
        """exp(-i pi z) Gamma(z)^2 solves the shift equation of exp(-ix)."""
        equation = hill.build_functional_equation(g, TrigPoly({1: 1.0}))
        candidate = lambda w: cmath.exp(-1j * math.pi * w) * specfun.complex_gamma(w) ** 2
        assert equation.normalized_residual(candidate, z) < 1e-10

    def test_zero_potential(self, g):
        """Test build_functional_equation with V = 0."""
        with pytest.raises(ValidationError):
            hill.build_functional_equation(g, TrigPoly({}))

    def test_indicial_roots(self):
        """B(i nu) = 1 has roots -i and i, in that order."""
        roots = hill.indicial_roots(TrigPoly({0: 1.0}), SECOND)
        assert roots == pytest.approx([-1j, 1j])

    def test_constant_operator(self):
        """A constant B has no indicial root."""
        with pytest.raises(IndicialError):
            hill.indicial_roots(TrigPoly({0: 1.0}), Polynomial((5,)))


class TestRecurrence:
    """Test the coefficient recurrence."""

    def test_bessel_coefficients(self):
        """V = exp(-ix) gives a_k = (-1)^k / (k!)^2."""
        solution = hill.recurrence_solve(TrigPoly({1: 1.0}), SECOND, K=12)
        assert solution.nu == 0
        assert np.allclose(solution.coeffs, bessel_coefficients(12), rtol=1e-13, atol=0)

    def test_bessel_evaluation(self):
        """The lattice solution is J_0(2 exp(-ix/2))."""
        solution = hill.recurrence_solve(TrigPoly({1: 1.0}), SECOND, K=30)
        x = np.array([0.0, 1.0, 2.5])
        expected = special.jv(0, 2 * np.exp(-0.5j * x))
        assert solution.evaluate(x) == pytest.approx(expected, rel=1e-12)

    def test_residuals(self, g):
        """Both the ODE and the lattice equation are satisfied."""
        V = TrigPoly({1: 1.0})
        solution = hill.recurrence_solve(V, SECOND, K=30)
        x = np.linspace(0, 2 * math.pi, 64)
        assert solution.ode_residual(V, SECOND, x) < 1e-10
        equation = hill.build_functional_equation(g, V)
        assert equation.lattice_residual(solution) < 1e-12

    def test_perturbed_exponential(self):
        """V = 1 + e^{-ix} / 2 on nu = -i solves the ODE and matches RK4."""
        V = TrigPoly({0: 1.0, 1: 0.5})
        solution = hill.recurrence_solve(V, SECOND, branch=-1j, K=30)
        assert solution.nu == -1j
        assert solution.ode_residual(V, SECOND, np.linspace(0, 2 * math.pi, 64)) <= 1e-8
        problem = OdeProblem(V, 0.0, 2.0, complex(solution.evaluate(0.0)), complex(solution.derivative(0.0)), 1e-3)
        trajectory = oracle.integrate_ode(problem)
        x = np.array([0.5, 1.0, 2.0])
        assert [trajectory.at(point) for point in x] == pytest.approx(solution.evaluate(x), rel=1e-8)

    def test_exponential_branches(self):
        """V = 1 gives e^x on branch 0 and e^-x on branch 1."""
        V = TrigPoly({0: 1.0})
        x = np.array([0.0, 0.5, 1.0])
        grow = hill.recurrence_solve(V, SECOND, branch=0, K=5)
        decay = hill.recurrence_solve(V, SECOND, branch=1, K=5)
        assert grow.evaluate(x) == pytest.approx(np.exp(x), rel=1e-13)
        assert decay.evaluate(x) == pytest.approx(np.exp(-x), rel=1e-13)

    def test_explicit_root(self):
        """A complex branch is accepted when it solves the indicial equation."""
        solution = hill.recurrence_solve(TrigPoly({0: 1.0}), SECOND, branch=1j, K=3)
        assert solution.evaluate(1.0) == pytest.approx(math.exp(-1.0))

    def test_resonance(self):
        """nu - 1 is the other indicial root."""
        with pytest.raises(ResonanceError) as excinfo:
            hill.recurrence_solve(TrigPoly({0: -0.25, 1: 1.0}), SECOND, branch=1, K=4)
        assert excinfo.value.k == 1

    def test_bad_branch(self):
        """Test branch validation."""
        V = TrigPoly({1: 1.0})
        with pytest.raises(IndicialError):
            hill.recurrence_solve(V, SECOND, branch=5)
        with pytest.raises(IndicialError):
            hill.recurrence_solve(V, SECOND, branch=0.3 + 0j)

    def test_two_sided_potential(self):
        """Potentials with negative frequencies are rejected."""
        with pytest.raises(ValidationError):
            hill.recurrence_solve(TrigPoly({-1: 1.0, 1: 1.0}), SECOND)
        with pytest.raises(ValidationError):
            hill.recurrence_solve(TrigPoly({1: 1.0}), SECOND, K=-1)


class TestNestedSum:
    """Test the depth-truncated nested sum."""

    def test_product_case(self):
        """A single shift collapses the nested sum to a product."""
        gamma, depth = 0.3 + 0.1j, 6
        report = hill.nested_sum_eval(TrigPoly({1: 1.0}), SECOND, gamma, depth)
        expected = 1.0
        for j in range(depth + 1):
            expected /= -(gamma + j) ** 2
        assert report.value == pytest.approx(expected, rel=1e-12)
        assert report.step_residual < 1e-12
        assert report.depth == depth

    def test_two_term_tree(self):
        """Two forward shifts match a plain recursion over the full tree."""
        coeffs = {1: 1.0, 2: 0.5 - 0.25j}
        gamma, depth = 0.3, 6

        def tree(d, w):
            if d == 0:
                return 1.0 / -(w ** 2)
            return sum(c * tree(d - 1, w + n) for n, c in coeffs.items()) / -(w ** 2)

        report = hill.nested_sum_eval(TrigPoly(coeffs), SECOND, gamma, depth)
        assert report.value == pytest.approx(tree(depth, gamma), rel=1e-12)
        assert report.step_residual < 1e-12

    def test_constant_term_stays_out_of_nesting(self):
        """c_0 changes the equation residual but not the nested value."""
        forward = hill.nested_sum_eval(TrigPoly({1: 0.5}), SECOND, 0.3, 3)
        shifted = hill.nested_sum_eval(TrigPoly({0: 1.0, 1: 0.5}), SECOND, 0.3, 3)
        assert shifted.value == pytest.approx(forward.value, rel=1e-14)
        assert shifted.step_residual < 1e-12
        lhs = -(0.3 ** 2) * shifted.value
        next_value = hill.nested_sum_eval(TrigPoly({1: 0.5}), SECOND, 1.3, 3).value
        expected = abs(1.0 * shifted.value + 0.5 * next_value - lhs) / abs(lhs)
        assert shifted.equation_residual == pytest.approx(expected, rel=1e-10)

    def test_constant_potential(self):
        """V = 1 has no forward shifts, so only depth 0 survives."""
        assert hill.nested_sum_eval(TrigPoly({0: 1.0}), SECOND, 2.0, 0).value == pytest.approx(-0.25)
        report = hill.nested_sum_eval(TrigPoly({0: 1.0}), SECOND, 2.0, 3)
        assert report.value == 0
        assert report.step_residual == 0

    def test_validation(self):
        """Test depth and pole handling."""
        V = TrigPoly({1: 1.0})
        with pytest.raises(ValidationError):
            hill.nested_sum_eval(V, SECOND, 0.5, -1)
        with pytest.raises(PoleError):
            hill.nested_sum_eval(V, SECOND, 0.0, 2)


class TestCocycle:
    """Test cocycle products and g_from_H."""

    def test_cocycle_coefficient(self):
        """prod_{j<n} H(z + j tau) for H(z) = z."""
        assert hill.cocycle_coefficient(lambda z: z, 1, 4) == pytest.approx(24)
        assert hill.cocycle_coefficient(lambda z: z, 1, 3, tau=2.0) == pytest.approx(15)
        assert hill.cocycle_coefficient(lambda z: z, 1, 0) == 1

    def test_g_from_H(self):
        """1 + H(1) + H(1) H(2) for H(z) = z."""
        assert hill.g_from_H([1, 1, 1], lambda z: z, 1) == pytest.approx(4)
        assert hill.g_from_H(TrigPoly({0: 1.0, 2: 1.0}), lambda z: z, 1) == pytest.approx(3)

    def test_scaled_log_fallback(self):
        """Intermediate overflow is absorbed by the scaled-log path."""
        table = [1e300, 1e300, 1e-300]
        H = lambda z: table[int(round(z.real))]
        assert hill.g_from_H([0, 0, 0, 1], H, 0) == pytest.approx(1e300, rel=1e-9)

    def test_true_overflow(self):
        """A result beyond float range raises."""
        with pytest.raises(NumericalError):
            hill.g_from_H([0, 0, 1], lambda z: 1e200, 0)


class TestGammaClosedForm:
    """Test meromorphic factors and their Gamma-product solutions."""

    def test_factor_from_potential(self):
        """exp(-ix) with y'' gives H(z) = -z^2."""
        H = hill.factor_from_potential(TrigPoly({1: 1.0}), SECOND)
        assert H(2.0) == pytest.approx(-4.0)
        assert H(0.5 + 1j) == pytest.approx(-(0.5 + 1j) ** 2)

    def test_factor_with_constant_term(self):
        """2 + exp(-ix) gives H(z) = -z^2 - 2."""
        H = hill.factor_from_potential(TrigPoly({0: 2.0, 1: 1.0}), SECOND)
        assert H(1.0) == pytest.approx(-3.0)

    @pytest.mark.parametrize("z", [0.6 + 0.4j, 3.2 - 1.5j])
    def test_potential_closed_form(self, z):
        """The closed form built from the potential solves its shift equation."""
        H = hill.factor_from_potential(TrigPoly({0: 2.0, 1: 1.0}), SECOND)
        assert hill.gamma_form_residual(hill.gamma_closed_form(H), z) < 1e-10

    def test_unsupported_potentials(self):
        """Only 2 pi periodic c_0 + c_1 exp(-ix) has a closed form."""
        with pytest.raises(ValidationError):
            hill.factor_from_potential(TrigPoly({0: 1.0, 2: 1.0}), SECOND)
        with pytest.raises(ValidationError):
            hill.factor_from_potential(TrigPoly({1: 1.0}, period=math.pi), SECOND)
        with pytest.raises(ValidationError):
            hill.factor_from_potential(TrigPoly({0: 1.0}), SECOND)

    @pytest.mark.parametrize("name", list(CLOSED_FORM_FACTORS))
    @pytest.mark.parametrize("z", [1.5 + 0.5j, 0.7 - 2.0j, 4.1 + 1.2j])
    def test_families(self, name, z):
        """Each worked family satisfies yhat(z + 1) = H(z) yhat(z)."""
        form = hill.gamma_closed_form(CLOSED_FORM_FACTORS[name])
        assert hill.gamma_form_residual(form, z) < 1e-9

    def test_residual_needs_factor(self):
        """A form without H cannot be checked."""
        form = hill.gamma_closed_form(CLOSED_FORM_FACTORS["z"])
        bare = type(form)(form.base, form.m, form.R1, form.roots, form.poles)
        with pytest.raises(ValidationError):
            hill.gamma_form_residual(bare, 1.0)


class TestPochhammer:
    """Test the Pochhammer-ratio series."""

    A_LIST = (0.7 + 0.2j, 1.3)
    B_LIST = (2.1 - 0.4j,)

    def H(self, z):
        return 0.8 * (z + self.A_LIST[0]) * (z + self.A_LIST[1]) / (z + self.B_LIST[0]) * cmath.exp(-0.3 * z)

    def test_agrees_with_direct_sum(self):
        """The Pochhammer form equals g_from_H."""
        c = [0.5, 1.0, -0.25j, 0.1]
        z = 1.3 + 0.4j
        direct = hill.g_from_H(c, self.H, z)
        series = hill.pochhammer_g(c, self.A_LIST, self.B_LIST, 0.3, 0.8, z)
        assert series == pytest.approx(direct, rel=1e-10)

    def test_printed_variant_differs(self):
        """The alternative exponent and 1/k! weight give another value."""
        c = [0.5, 1.0, -0.25j]
        z = 1.3 + 0.4j
        series = hill.pochhammer_g(c, self.A_LIST, self.B_LIST, 0.3, 0.8, z)
        printed = hill.pochhammer_g(c, self.A_LIST, self.B_LIST, 0.3, 0.8, z, printed_variant=True)
        assert abs(printed - series) > 1e-3 * abs(series)


class TestProduct:
    """Test truncated infinite products."""

    def test_convergent_product(self):
        """H = 1 + 2^-z converges geometrically."""
        report = hill.product_solution(lambda z: 1.0 + 2.0 ** (-z), 1.0, 1.2 + 0.5j, 40)
        assert report.converged
        assert math.isfinite(report.tail_bound)
        assert report.telescoping_error < 1e-12
        assert report.equation_residual < 1e-8
        assert report.terms == 40

    def test_divergent_product(self):
        """A constant H != 1 never converges."""
        report = hill.product_solution(lambda z: 2.0, 1.0, 0.5, 10)
        assert not report.converged
        assert report.tail_bound == math.inf
        assert report.value == pytest.approx(2.0 ** -10)

    @pytest.mark.parametrize("N", [40, 4000])
    def test_harmonic_decay_not_summable(self, N):
        """H = 1 + 1/z drives the product to zero like 1/(N + 1)."""
        report = hill.product_solution(lambda z: 1.0 + 1.0 / z, 1.0, 1.0, N)
        assert report.value == pytest.approx(1.0 / (N + 1), rel=1e-10)
        assert not report.converged
        assert report.tail_bound == math.inf

    def test_square_decay_tail_bounds_limit(self):
        """H = 1 + 1/z^2 converges to pi/sinh(pi) within the reported tail."""
        report = hill.product_solution(lambda z: 1.0 + 1.0 / z ** 2, 1.0, 1.0, 40)
        limit = math.pi / math.sinh(math.pi)
        assert report.converged
        assert 0 < report.tail_bound < 0.03
        assert abs(report.value / limit - 1) <= math.expm1(report.tail_bound)

    def test_identity_factor(self):
        """H = 1 has nothing left in the tail."""
        report = hill.product_solution(lambda z: 1.0, 1.0, 0.5, 8)
        assert report.converged
        assert report.tail_bound == 0.0
        assert report.value == 1

    def test_pole(self):
        """H(z) = 0 at a sample point raises."""
        with pytest.raises(PoleError):
            hill.product_solution(lambda z: z - 1, 1.0, 1.0, 5)

    def test_too_few_terms(self):
        """Test N and tau validation."""
        with pytest.raises(ValidationError):
            hill.product_solution(lambda z: 2.0, 1.0, 0.5, 1)
        with pytest.raises(ValidationError):
            hill.product_solution(lambda z: 2.0, 0.0, 0.5, 10)


class TestCoefficients:
    """Test the A_n coefficient representation and theta iteration."""

    @pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
    def test_methods_agree(self, g, n):
        """Reciprocal-series and quadrature coefficients agree."""
        V = TrigPoly({0: 2.0, 1: 1.0})
        x = 0.3 + 0.2j
        closed = hill.A_n_coefficients(V, g, n, x, CoefficientMethod.CLOSED)
        quadrature = hill.A_n_coefficients(V, g, n, x, "quadrature")
        assert quadrature == pytest.approx(closed, abs=1e-8)

    @pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
    def test_examples(self, g, n):
        """V = 1 keeps only A_0 = g(x); V = exp(-ix) keeps only A_-1 = g(x - 1)."""
        x = 0.4 - 0.3j
        flat = hill.A_n_coefficients(TrigPoly({0: 1.0}), g, n, x)
        shifted = hill.A_n_coefficients(TrigPoly({1: 1.0}), g, n, x)
        assert flat == pytest.approx(-x * x if n == 0 else 0, abs=1e-12)
        assert shifted == pytest.approx(-(x - 1) ** 2 if n == -1 else 0, abs=1e-12)

    def test_quadrature_preconditions(self, g):
        """Quadrature needs a 2 pi period and a non-vanishing reflected potential."""
        with pytest.raises(ValidationError):
            hill.A_n_coefficients(TrigPoly({0: 2.0, 1: 1.0}, period=math.pi), g, 0, 0.1, "quadrature")
        with pytest.raises(ValidationError):
            hill.A_n_coefficients(TrigPoly({0: 1.0, 1: 1.0}), g, 0, 0.1, "quadrature")

    def test_theta_shift(self, g):
        """theta_5(z + 1) = -z^2 theta_4(z) for V = exp(-ix)."""
        V = TrigPoly({1: 1.0})
        z = 0.6 + 0.4j
        shifted = hill.theta_iteration(V, g, z + 1, 5)
        base = hill.theta_iteration(V, g, z, 4)
        assert shifted.window == (-1,)
        assert shifted.value == pytest.approx(-z * z * base.value, rel=1e-12)
        assert shifted.step_residual < 1e-12

    def test_theta_validation(self, g):
        """Test depth and window validation."""
        V = TrigPoly({1: 1.0})
        with pytest.raises(ValidationError):
            hill.theta_iteration(V, g, 0.5, -1)
        with pytest.raises(ValidationError):
            hill.theta_iteration(V, g, 0.5, 2, window=[])
        assert hill.theta_iteration(V, g, 0.5, 0).value == 1


class TestIteratedOperator:
    """Test the fixed-point iteration in lattice space."""

    def test_matches_recurrence(self):
        """The iteration reaches the Bessel coefficients."""
        seed = LatticeSolution(0j, np.eye(1, 21)[0])
        solution, report = hill.iterated_operator_solve(TrigPoly({1: 1.0}), 0j, 30, seed)
        assert np.allclose(solution.coeffs, bessel_coefficients(20), rtol=0, atol=1e-10)
        assert report.converged
        assert report.iterations <= 30
        assert report.final_residual <= hill.ITERATION_TOLERANCE

    def test_stops_at_iteration_budget(self):
        """Too few sweeps leave the iteration unconverged."""
        seed = LatticeSolution(0j, np.eye(1, 21)[0])
        _, report = hill.iterated_operator_solve(TrigPoly({1: 1.0}), 0j, 2, seed)
        assert not report.converged
        assert report.iterations == 2
        assert len(report.residuals) == 3

    def test_validation(self):
        """Test nu and iteration-count validation."""
        V = TrigPoly({1: 1.0})
        seed = LatticeSolution(0j, np.eye(1, 6)[0])
        with pytest.raises(IndicialError):
            hill.iterated_operator_solve(V, 0.5, 10, seed)
        with pytest.raises(ValidationError):
            hill.iterated_operator_solve(V, 0j, -1, seed)

    def test_perturbed_exponential_residuals_decrease(self):
        """For V = 1 + e^{-ix} / 2 on nu = -i the sweeps settle monotonically on the recurrence."""
        V = TrigPoly({0: 1.0, 1: 0.5})
        seed = LatticeSolution(-1j, np.eye(1, 21)[0])
        solution, report = hill.iterated_operator_solve(V, -1j, 40, seed)
        assert report.converged
        residuals = np.array(report.residuals)
        assert np.all(np.diff(residuals[2:]) <= 0)
        expected = hill.recurrence_solve(V, SECOND, branch=-1j, K=20)
        assert np.allclose(solution.coeffs, expected.coeffs, rtol=0, atol=1e-12)


class TestFactorization:
    """Test the multi-dimensional Fourier factorization identity."""

    @pytest.mark.parametrize("N", [2, 3])
    @pytest.mark.parametrize("sampled", [False, True])
    def test_identity(self, N, sampled):
        """Coefficients of Y(x1) Y(x1 + x2) ... factor into products."""
        Y = TrigPoly({-1: 0.3, 0: 1.0, 2: 0.5j})
        assert hill.ft_factorization_check(Y, N, sampled=sampled) < 1e-12

    def test_validation(self):
        """Only N = 2 and 3 are supported; Y = 0 is trivial."""
        with pytest.raises(ValidationError):
            hill.ft_factorization_check(TrigPoly({0: 1.0}), 4)
        assert hill.ft_factorization_check(TrigPoly({}), 2) == 0.0


class TestTwoAdic:
    """Test 2-adic Fourier solutions."""

    C = TrigPoly({0: 0.3, 1: 1.0})

    def test_fourier_solution(self):
        """The coefficients invert c_k - g(log2 gamma) delta_k0."""
        gamma = 1.7
        b, amplitude, identity = hill.two_adic_fourier_solution(self.C, lambda s: -s * s, gamma, 64)
        assert identity < 1e-12
        assert b[1] == pytest.approx(1.0 / (0.3 + math.log2(gamma) ** 2))
        n = np.arange(1, 65)
        assert amplitude == pytest.approx(np.sum(b.values * np.exp(1j * n * 2.0 ** gamma)))

    def test_gamma_positive(self):
        """Test gamma validation."""
        with pytest.raises(ValidationError):
            hill.two_adic_fourier_solution(self.C, lambda s: 0.0, 0.0, 8)

    def test_mode_solution(self):
        """Each mode carries Lambda exp(-i C t / hbar)."""
        params = ParticleParams.natural(0.1)
        modes = [SeparationMode(2.0, MultiplierSpec(0.5, params)),
                 SeparationMode(1.0, MultiplierSpec(2.0 + 0.5j, params))]
        reports = hill.two_adic_mode_solution(self.C, modes, 1.7, 32, t=0.8)
        assert len(reports) == 2
        assert reports[0].time_factor == pytest.approx(2.0 * cmath.exp(-0.4j))
        for report in reports:
            assert report.value == pytest.approx(report.amplitude * report.time_factor)
            assert report.identity_error < 1e-12
