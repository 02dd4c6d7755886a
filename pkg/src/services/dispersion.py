"""
Dispersion service for specdisp.

Kinematics of the modified energy law, band-limited spectral propagation in
one to three dimensions, decaying-mode solutions and truncated-series
residuals of the evolution equation.
"""
import math
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import special
from scipy.integrate import simpson, trapezoid

from ..models.base import BandLimitError, ValidationError
from ..models.enums import DispersionVariant
from ..models.physics import DispersionLaw, ModeSum, ParticleParams, SpectrumGrid
from ..models.results import PhaseSignResolution, ResidualReport, SynthesisResult
from ..utils.logger import get_logger

logger = get_logger("dispersion")

RESIDUAL_BAND = 0.9
PHASE_SIGN_ORDER = 40
DEFAULT_PROBES: Tuple[Tuple[float, float], ...] = tuple(
    (x, t) for x in (0.5, 1.0, 2.0) for t in (0.0, 0.5, 1.0)
)
SYNTHESIS_CHUNK = 256
# complex entries held per chunk of the partially contracted integrand
SYNTHESIS_BUDGET = 1 << 22

ArrayLike = Union[float, np.ndarray]


def velocity_ratio(p: ArrayLike, params: ParticleParams) -> ArrayLike:
    """xi = x / sqrt(1 + x^2) with x = p / (m0 c)."""
    x = np.asarray(p, dtype=float) / (params.m0 * params.c)
    if not np.all(np.isfinite(x)):
        raise ValidationError("momentum must be finite", "p")
    xi = x / np.hypot(1.0, x)
    return float(xi) if xi.ndim == 0 else xi


def energy_of_momentum(p: ArrayLike, params: ParticleParams) -> ArrayLike:
    """E = E0 + (E0/2) x^2 / sqrt(1 + x^2) with x = p / (m0 c)."""
    x = np.asarray(p, dtype=float) / (params.m0 * params.c)
    energy = params.E0 + 0.5 * params.E0 * x * x / np.hypot(1.0, x)
    return float(energy) if energy.ndim == 0 else energy


def dispersion_energy(gamma: ArrayLike, law: DispersionLaw) -> ArrayLike:
    """E(gamma) under the given law."""
    return law.energy(gamma)


def dispersion_curve(gammas: np.ndarray, params: ParticleParams) -> pd.DataFrame:
    """Energies of all three laws on a frequency axis."""
    gammas = np.asarray(gammas, dtype=float)
    columns = {"gamma": gammas}
    for label, variant in (("E_schr", DispersionVariant.SCHRODINGER),
                           ("E_rel", DispersionVariant.RELATIVISTIC),
                           ("E_kg", DispersionVariant.KLEIN_GORDON)):
        columns[label] = DispersionLaw(variant, params).energy(gammas)
    return pd.DataFrame(columns)


def binomial_half(K: int) -> np.ndarray:
    """C(-1/2, k) for k = 0..K."""
    return special.binom(-0.5, np.arange(K + 1))


def _series_symbol(v: np.ndarray, K: int) -> np.ndarray:
    """sum_{k<=K} C(-1/2,k) v^(k+1), the symbol of the truncated operator."""
    v = np.asarray(v, dtype=complex)
    total = np.zeros(v.shape, dtype=complex)
    power = v.copy()
    for coefficient in binomial_half(K):
        total += coefficient * power
        power = power * v
    return total


def gaussian_spectrum(axes: Sequence[np.ndarray], center: Sequence[float], width: float,
                      band_limited: bool = False) -> SpectrumGrid:
    """Gaussian amplitudes exp(-|gamma - center|^2 / (2 width^2)) on the given axes."""
    if width <= 0:
        raise ValidationError("width must be positive", "width")
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    if len(center) != len(axes):
        raise ValidationError("center needs one entry per axis", "center")
    mesh = np.meshgrid(*axes, indexing="ij")
    exponent = sum((g - c) ** 2 for g, c in zip(mesh, center))
    amplitudes = np.exp(-exponent / (2.0 * width ** 2)).astype(complex)
    return SpectrumGrid(axes, amplitudes, tuple(band_limited for _ in axes))


def mode_spectrum(axes: Sequence[np.ndarray], modes: Sequence[Tuple[Sequence[float], complex]],
                  width: float, band_limited: bool = False) -> SpectrumGrid:
    """Superposition of Gaussian bumps, one per (center, amplitude) mode."""
    if not modes:
        raise ValidationError("At least one mode is required", "modes")
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    amplitudes = np.zeros(tuple(a.size for a in axes), dtype=complex)
    for center, amplitude in modes:
        center = np.atleast_1d(np.asarray(center, dtype=float))
        bump = gaussian_spectrum(axes, center, width, band_limited)
        amplitudes += complex(amplitude) * bump.amplitudes
    return SpectrumGrid(axes, amplitudes, tuple(band_limited for _ in axes))


def evolve_spectrum(grid: SpectrumGrid, t: float, law: DispersionLaw) -> SpectrumGrid:
    """Multiply each amplitude by exp(-i E(gamma) t / hbar)."""
    energy = law.energy_nd(*grid.mesh())
    phases = np.exp(-1j * energy * (t / law.params.hbar))
    return grid.with_amplitudes(grid.amplitudes * phases)


def _quadrature_weights(axis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Simpson and trapezoid weights on one axis, read off the rules applied to unit vectors."""
    identity = np.eye(axis.size)
    return simpson(identity, x=axis, axis=-1), trapezoid(identity, x=axis, axis=-1)


def _contract(amplitudes: np.ndarray, kernels: Sequence[np.ndarray]) -> np.ndarray:
    """
    sum over the grid of amplitudes * prod_j kernels[j][p, k_j] for every point p.

    The last axis is contracted against all points at once; the remaining axes
    are contracted point by point, so no array of the full grid size times the
    number of points is formed.
    """
    result = np.tensordot(amplitudes, kernels[-1], axes=([-1], [1]))
    for kernel in reversed(kernels[:-1]):
        result = np.einsum("...kp,pk->...p", result, kernel)
    return result


def synthesize(grid: SpectrumGrid, x: np.ndarray) -> SynthesisResult:
    """(1/2pi)^d times the Simpson integral of amplitude * exp(i gamma.x)."""
    if grid.amplitudes.size == 0:
        raise ValidationError("Cannot synthesize an empty grid", "grid")
    points = np.asarray(x, dtype=float)
    if grid.ndim == 1:
        points = points.reshape(-1, 1)
    elif points.ndim != 2 or points.shape[1] != grid.ndim:
        raise ValidationError(f"Points must have shape (P, {grid.ndim})", "x")

    amplitudes = grid.amplitudes.astype(complex, copy=False)
    simpson_weights, trapezoid_weights = zip(*(_quadrature_weights(axis) for axis in grid.axes))
    leading = max(1, amplitudes.size // grid.axes[-1].size)
    chunk = max(1, min(SYNTHESIS_CHUNK, SYNTHESIS_BUDGET // leading))

    values = np.empty(points.shape[0], dtype=complex)
    errors = np.empty(points.shape[0])
    for start in range(0, points.shape[0], chunk):
        block = points[start:start + chunk]
        phases = [np.exp(1j * np.outer(block[:, i], axis)) for i, axis in enumerate(grid.axes)]
        fine = _contract(amplitudes, [p * w for p, w in zip(phases, simpson_weights)])
        coarse = _contract(amplitudes, [p * w for p, w in zip(phases, trapezoid_weights)])
        values[start:start + block.shape[0]] = fine
        errors[start:start + block.shape[0]] = np.abs(fine - coarse)
    scale = (2.0 * math.pi) ** grid.ndim
    return SynthesisResult(values / scale, float(np.max(errors)) / scale)


def packet_variance(x: np.ndarray, values: np.ndarray) -> float:
    """Position variance of |Y|^2 on a window."""
    x = np.asarray(x, dtype=float)
    density = np.abs(np.asarray(values)) ** 2
    norm = simpson(density, x=x)
    mean = simpson(x * density, x=x) / norm
    return float(simpson((x - mean) ** 2 * density, x=x) / norm)


def schrodinger_variance(sigma: float, t: float, params: ParticleParams) -> float:
    """Variance of a free Gaussian packet exp(-x^2 / (2 sigma^2)) at time t."""
    spread = params.hbar * t / (params.m0 * sigma ** 2)
    return 0.5 * sigma ** 2 * (1.0 + spread ** 2)


def _mode_kinetic(n: np.ndarray, params: ParticleParams) -> np.ndarray:
    u = (params.l0 * np.asarray(n, dtype=float)) ** 2
    return params.E0 * u / (2.0 * np.sqrt(np.abs(u - 1.0)))


def _mode_arrays(modes: ModeSum) -> Tuple[np.ndarray, np.ndarray]:
    indices = np.array([index for index, _ in modes.modes], dtype=float)
    amplitudes = np.array([amplitude for _, amplitude in modes.modes], dtype=complex)
    return indices, amplitudes


def _as_position(x: Union[float, Sequence[float]], dimension: int) -> np.ndarray:
    position = np.atleast_1d(np.asarray(x, dtype=float))
    if position.size == 1 and dimension > 1:
        position = np.repeat(position, dimension)
    if position.size != dimension:
        raise ValidationError(f"Position needs {dimension} components", "x")
    if np.any(position <= 0):
        raise ValidationError("Decaying modes are evaluated at x > 0 only", "x")
    return position


def _mode_terms(modes: ModeSum, x: Union[float, Sequence[float]], t: float) -> np.ndarray:
    params = modes.params
    indices, amplitudes = _mode_arrays(modes)
    position = _as_position(x, modes.dimension)
    kinetic = _mode_kinetic(indices, params).sum(axis=1)
    phase = -params.E0 * t / params.hbar + modes.phase_sign * kinetic * t / params.hbar
    return amplitudes * np.exp(1j * phase) * np.exp(-indices @ position)


def mode_sum_solution(modes: ModeSum, x: Union[float, Sequence[float]], t: float) -> complex:
    """Y(x, t) for a sum of decaying modes."""
    return complex(np.sum(_mode_terms(modes, x, t)))


def _mode_residual_symbol(modes: ModeSum, K: int) -> np.ndarray:
    params = modes.params
    indices, _ = _mode_arrays(modes)
    u = (params.l0 * indices) ** 2
    if np.any(np.sqrt(u) > RESIDUAL_BAND):
        raise BandLimitError(f"Residuals need l0*n <= {RESIDUAL_BAND}", "modes")
    kinetic = _mode_kinetic(indices, params).sum(axis=1)
    series = _series_symbol(-u, K).sum(axis=1)
    return -modes.phase_sign * kinetic - 0.5 * params.E0 * series


def truncated_pde_residual(solution: Union[ModeSum, SpectrumGrid], K: int,
                           probes: Optional[Iterable[Tuple[object, float]]] = None,
                           law: Optional[DispersionLaw] = None) -> ResidualReport:
    """Normalized residual of the evolution equation truncated at order K."""
    if K < 0:
        raise ValidationError("K must be >= 0", "K")
    if isinstance(solution, ModeSum):
        symbol = _mode_residual_symbol(solution, K)
        residuals = []
        for x, t in (probes if probes is not None else DEFAULT_PROBES):
            terms = _mode_terms(solution, x, t)
            value = np.sum(terms)
            residuals.append(abs(np.sum(symbol * terms)) / max(abs(value), 1e-300))
        residuals = np.array(residuals)
    else:
        if law is None:
            raise ValidationError("A dispersion law is required for spectrum grids", "law")
        params = law.params
        mesh = solution.mesh()
        for axis in solution.axes:
            if np.max(np.abs(axis)) * params.l0 > RESIDUAL_BAND:
                raise BandLimitError(f"Residuals need l0*|gamma| <= {RESIDUAL_BAND}", "axes")
        series = sum(_series_symbol((params.l0 * g) ** 2, K) for g in mesh)
        symbol = law.energy_nd(*mesh) - params.E0 - 0.5 * params.E0 * series
        if probes is None:
            occupied = np.abs(solution.amplitudes) > 0
            residuals = np.abs(symbol[occupied])
        else:
            residuals = []
            for x, t in probes:
                evolved = evolve_spectrum(solution, t, law)
                point = np.atleast_2d(np.asarray(x, dtype=float))
                value = synthesize(evolved, point).values[0]
                error = synthesize(evolved.with_amplitudes(evolved.amplitudes * symbol), point).values[0]
                residuals.append(abs(error) / max(abs(value), 1e-300))
            residuals = np.array(residuals)
    report = ResidualReport(float(np.max(residuals)), float(np.mean(residuals)), K, int(residuals.size))
    logger.debug(f"Truncated residual K={K}: max {report.max_residual:.3e}")
    return report


def resolve_phase_sign(modes: ModeSum, K: int = PHASE_SIGN_ORDER,
                       probes: Optional[Iterable[Tuple[object, float]]] = None) -> Tuple[ModeSum, PhaseSignResolution]:
    """Pick the phase sign whose truncated residual is smaller."""
    probes = list(probes) if probes is not None else None
    plus = truncated_pde_residual(modes.with_sign(1), K, probes).max_residual
    minus = truncated_pde_residual(modes.with_sign(-1), K, probes).max_residual
    sign = 1 if plus <= minus else -1
    logger.info(f"Phase sign resolved to {sign:+d} (residuals {plus:.3e} / {minus:.3e})")
    return modes.with_sign(sign), PhaseSignResolution(sign, plus, minus)
