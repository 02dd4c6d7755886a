"""
Tests for the dispersion service.
"""
import math

import numpy as np
import pytest
from scipy.integrate import simpson, trapezoid

from src.models.base import BandLimitError, ValidationError
from src.models.enums import DispersionVariant
from src.models.physics import DispersionLaw, ModeSum, ParticleParams, SpectrumGrid
from src.services import dispersion


@pytest.fixture
def params():
    return ParticleParams.natural(0.1)


class TestKinematics:
    """Test momentum, velocity and energy relations."""

    def test_velocity_ratio(self, params):
        """xi = 1/sqrt(2) at p = m0 c."""
        assert dispersion.velocity_ratio(params.m0 * params.c, params) == pytest.approx(1 / math.sqrt(2))

    def test_velocity_below_one(self, params):
        """Test xi in (-1, 1)."""
        p = np.linspace(-1e3, 1e3, 11) * params.m0 * params.c
        assert np.all(np.abs(dispersion.velocity_ratio(p, params)) < 1.0)

    def test_energy_of_momentum(self, params):
        """E = E0 at rest and E0 (1 + 1/(2 sqrt 2)) at p = m0 c."""
        assert dispersion.energy_of_momentum(0.0, params) == pytest.approx(params.E0)
        expected = params.E0 * (1 + 0.5 / math.sqrt(2))
        assert dispersion.energy_of_momentum(params.m0 * params.c, params) == pytest.approx(expected)

    def test_dispersion_energy(self, params):
        """Rest energy plus the kinetic part; the relativistic law is band-checked."""
        relativistic = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        assert dispersion.dispersion_energy(0.0, relativistic) == pytest.approx(params.E0)
        assert dispersion.dispersion_energy(5.0, relativistic) == pytest.approx(1.0 + 0.125 / math.sqrt(1.25))
        energies = dispersion.dispersion_energy(np.array([-5.0, 5.0]), relativistic)
        assert energies[0] == pytest.approx(energies[1])
        with pytest.raises(BandLimitError):
            dispersion.dispersion_energy(10.0, relativistic)
        schrodinger = DispersionLaw(DispersionVariant.SCHRODINGER, params)
        assert dispersion.dispersion_energy(10.0, schrodinger) == pytest.approx(1.5)

    def test_binomial_half(self):
        """C(-1/2, k) for k = 0..3."""
        assert dispersion.binomial_half(3) == pytest.approx([1.0, -0.5, 0.375, -0.3125])

    def test_dispersion_curve(self, params):
        """The curve table has one column per law."""
        curve = dispersion.dispersion_curve(np.array([0.0, 1.0, 5.0]), params)
        assert list(curve.columns) == ["gamma", "E_schr", "E_rel", "E_kg"]
        assert curve["E_schr"].iloc[0] == pytest.approx(1.0)
        assert curve["E_schr"].iloc[2] == pytest.approx(1.0 + 0.5 * 0.25)
        assert curve["E_kg"].iloc[2] == pytest.approx(math.sqrt(1.25))
        assert curve["E_rel"].iloc[2] == pytest.approx(1.0 + 0.5 * 0.25 / math.sqrt(1.25))

    def test_laws_agree_at_low_frequency(self, params):
        """All three laws share the Schrodinger limit."""
        gamma = 0.01 / params.l0
        energies = [DispersionLaw(v, params).kinetic(gamma) for v in DispersionVariant]
        assert max(energies) - min(energies) < 1e-3 * max(energies)

    def test_klein_gordon_comparison(self, params):
        """Relativistic and Klein-Gordon kinetic parts differ by at most 0.75 (l0 gamma)^2 relative."""
        gammas = np.linspace(0.0, 0.3, 31)[1:] / params.l0
        relativistic = DispersionLaw(DispersionVariant.RELATIVISTIC, params).kinetic(gammas)
        klein_gordon = DispersionLaw(DispersionVariant.KLEIN_GORDON, params).kinetic(gammas)
        relative = np.abs(relativistic - klein_gordon) / klein_gordon
        assert np.all(relative <= 0.75 * (params.l0 * gammas) ** 2)
        for variant in DispersionVariant:
            assert DispersionLaw(variant, params).energy(0.0) == params.E0

    def test_energy_nd(self, params):
        """Kinetic parts add per axis; Klein-Gordon uses |gamma|."""
        g = (np.array(1.0), np.array(2.0), np.array(2.0))
        relativistic = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        expected = params.E0 + sum(relativistic.kinetic(float(x)) for x in g)
        assert relativistic.energy_nd(*g) == pytest.approx(expected)
        klein_gordon = DispersionLaw(DispersionVariant.KLEIN_GORDON, params)
        assert klein_gordon.energy_nd(*g) == pytest.approx(klein_gordon.energy(3.0))


class TestSpectralPropagation:
    """Test spectrum builders, evolution and synthesis."""

    def test_gaussian_validation(self):
        """Test gaussian_spectrum preconditions."""
        axis = np.linspace(-1, 1, 5)
        with pytest.raises(ValidationError):
            dispersion.gaussian_spectrum([axis], [0.0], 0.0)
        with pytest.raises(ValidationError):
            dispersion.gaussian_spectrum([axis], [0.0, 1.0], 1.0)

    def test_mode_spectrum(self):
        """Mode spectra add one Gaussian bump per mode."""
        axis = np.linspace(-4.0, 4.0, 9)
        grid = dispersion.mode_spectrum([axis], [((0.0,), 1.0), ((2.0,), 0.5j)], 1.0)
        assert grid.amplitudes[6] == pytest.approx(math.exp(-2.0) + 0.5j)
        with pytest.raises(ValidationError):
            dispersion.mode_spectrum([axis], [], 1.0)

    def test_evolution_is_unitary(self, params):
        """Evolution only changes phases."""
        law = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        grid = dispersion.gaussian_spectrum([np.linspace(-9, 9, 91)], [1.0], 1.5)
        evolved = dispersion.evolve_spectrum(grid, 2.5, law)
        assert np.allclose(np.abs(evolved.amplitudes), np.abs(grid.amplitudes), rtol=0, atol=1e-15)
        assert evolved.l2_norm_squared() == pytest.approx(grid.l2_norm_squared(), rel=1e-13)
        assert np.array_equal(dispersion.evolve_spectrum(grid, 0.0, law).amplitudes, grid.amplitudes)

    def test_band_checked_on_evolution(self, params):
        """Relativistic evolution rejects out-of-band frequencies."""
        law = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        grid = dispersion.gaussian_spectrum([np.linspace(-12, 12, 25)], [0.0], 1.0)
        with pytest.raises(BandLimitError):
            dispersion.evolve_spectrum(grid, 1.0, law)

    def test_synthesis_of_gaussian(self):
        """(1/2pi) int exp(-gamma^2/2) exp(i gamma x) = exp(-x^2/2) / sqrt(2 pi)."""
        grid = dispersion.gaussian_spectrum([np.linspace(-10, 10, 401)], [0.0], 1.0)
        x = np.array([0.0, 1.0, 2.5])
        result = dispersion.synthesize(grid, x)
        assert result.values == pytest.approx(np.exp(-x ** 2 / 2) / math.sqrt(2 * math.pi), rel=1e-8)
        assert result.error_estimate < 1e-6

    def test_synthesis_2d(self):
        """Two-dimensional synthesis factorizes for a product spectrum."""
        axis = np.linspace(-8, 8, 161)
        grid = dispersion.gaussian_spectrum([axis, axis], [0.0, 0.0], 1.0)
        points = np.array([[0.0, 0.0], [1.0, -0.5]])
        result = dispersion.synthesize(grid, points)
        expected = np.exp(-np.sum(points ** 2, axis=1) / 2) / (2 * math.pi)
        assert result.values == pytest.approx(expected, rel=1e-8)
        with pytest.raises(ValidationError):
            dispersion.synthesize(grid, np.zeros((3, 3)))

    def test_synthesis_3d_matches_dense_quadrature(self, monkeypatch):
        """Axis-by-axis contraction equals Simpson over the dense 3D integrand."""
        rng = np.random.default_rng(7)
        axes = [np.linspace(-2, 2, 9), np.linspace(-1, 1.5, 7), np.linspace(-3, 3, 6)]
        amplitudes = rng.normal(size=(9, 7, 6)) + 1j * rng.normal(size=(9, 7, 6))
        grid = SpectrumGrid(tuple(axes), amplitudes)
        points = rng.uniform(-2, 2, size=(5, 3))

        expected, spread = [], []
        for p in points:
            g1, g2, g3 = np.meshgrid(*axes, indexing="ij")
            integrand = amplitudes * np.exp(1j * (g1 * p[0] + g2 * p[1] + g3 * p[2]))
            fine, coarse = integrand, integrand
            for axis in reversed(axes):
                fine = simpson(fine, x=axis, axis=-1)
                coarse = trapezoid(coarse, x=axis, axis=-1)
            expected.append(fine / (2 * math.pi) ** 3)
            spread.append(abs(fine - coarse) / (2 * math.pi) ** 3)

        result = dispersion.synthesize(grid, points)
        assert np.allclose(result.values, expected, rtol=1e-12, atol=1e-14)
        assert result.error_estimate == pytest.approx(max(spread), rel=1e-9)

        monkeypatch.setattr(dispersion, "SYNTHESIS_BUDGET", 1)
        one_at_a_time = dispersion.synthesize(grid, points)
        assert np.allclose(one_at_a_time.values, result.values, rtol=1e-14, atol=1e-15)

    def test_schrodinger_packet_spreading(self):
        """A free Gaussian packet spreads as (sigma^2/2)(1 + (hbar t / (m0 sigma^2))^2)."""
        params = ParticleParams.natural(1.0)
        law = DispersionLaw(DispersionVariant.SCHRODINGER, params)
        grid = dispersion.gaussian_spectrum([np.linspace(-10, 10, 801)], [0.0], 1.0)
        x = np.linspace(-20, 20, 2001)
        values = dispersion.synthesize(dispersion.evolve_spectrum(grid, 1.0, law), x).values
        expected = dispersion.schrodinger_variance(1.0, 1.0, params)
        assert expected == pytest.approx(1.0)
        assert dispersion.packet_variance(x, values) == pytest.approx(expected, rel=1e-6)


class TestModeSums:
    """Test decaying-mode solutions."""

    def test_mode_sum_value(self, params):
        """A single mode carries its rest-energy and kinetic phases."""
        modes = ModeSum(((2, 1.0),), params)
        t = 0.8
        kinetic = 0.04 / (2 * math.sqrt(0.96))
        expected = math.exp(-2.0) * np.exp(1j * (-t + kinetic * t))
        assert dispersion.mode_sum_solution(modes, 1.0, t) == pytest.approx(expected)

    def test_position_must_be_positive(self, params):
        """Test the x > 0 precondition."""
        modes = ModeSum(((2, 1.0),), params)
        with pytest.raises(ValidationError):
            dispersion.mode_sum_solution(modes, 0.0, 0.0)

    def test_phase_sign_resolution(self, params):
        """The positive phase sign solves the truncated equation."""
        modes = ModeSum(((5, 1.0),), params)
        resolved, resolution = dispersion.resolve_phase_sign(modes, 40)
        assert resolution.sign == 1
        assert resolved.phase_sign == 1
        assert resolution.residual_plus < 1e-10
        assert resolution.residual_minus > 1e-2
        assert resolution.separation > 1e-2

    def test_mode_residual_band(self):
        """Modes with l0 n > 0.9 are outside the residual band."""
        modes = ModeSum(((8, 1.0),), ParticleParams.natural(0.12))
        with pytest.raises(BandLimitError):
            dispersion.truncated_pde_residual(modes, 10)


class TestTruncatedResidual:
    """Test truncated-series residuals on spectrum grids."""

    @pytest.fixture
    def grid(self):
        return dispersion.gaussian_spectrum([np.linspace(-5, 5, 101)], [0.0], 2.0)

    def test_relativistic_converges(self, params, grid):
        """The residual shrinks with K and vanishes at K = 40."""
        law = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        low = dispersion.truncated_pde_residual(grid, 5, law=law).max_residual
        high = dispersion.truncated_pde_residual(grid, 10, law=law).max_residual
        assert high < low
        report = dispersion.truncated_pde_residual(grid, 40, law=law)
        assert report.max_residual < 1e-10
        assert report.order == 40
        assert report.samples == 101

    def test_schrodinger_first_term(self, params, grid):
        """The K = 0 series is exactly the Schrodinger law."""
        law = DispersionLaw(DispersionVariant.SCHRODINGER, params)
        assert dispersion.truncated_pde_residual(grid, 0, law=law).max_residual < 1e-12

    def test_probes(self, params, grid):
        """Probe residuals are relative to |Y(x, t)|."""
        law = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        report = dispersion.truncated_pde_residual(grid, 40, probes=[(0.5, 0.3), (1.0, 1.0)], law=law)
        assert report.samples == 2
        assert report.max_residual < 1e-10

    def test_preconditions(self, params, grid):
        """Grid residuals need a law, K >= 0 and l0 |gamma| <= 0.9."""
        law = DispersionLaw(DispersionVariant.RELATIVISTIC, params)
        with pytest.raises(ValidationError):
            dispersion.truncated_pde_residual(grid, 3)
        with pytest.raises(ValidationError):
            dispersion.truncated_pde_residual(grid, -1, law=law)
        wide = dispersion.gaussian_spectrum([np.linspace(-9.5, 9.5, 39)], [0.0], 1.0)
        with pytest.raises(BandLimitError):
            dispersion.truncated_pde_residual(wide, 10, law=law)
