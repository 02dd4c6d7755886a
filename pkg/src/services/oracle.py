"""
Independent brute-force verifiers for specdisp.
"""
import math
from fractions import Fraction
from typing import Callable, List

import numpy as np

from ..models.base import DivergenceError, ValidationError
from ..models.physics import ParticleParams
from ..models.results import FiniteDiffReport, PartialSumReport, SpaceTimeGrid, Trajectory
from ..models.solver import OdeProblem
from ..utils.logger import get_logger

logger = get_logger("oracle")

DEFAULT_STEP = 1e-3


def _potential_samples(V: Callable, nodes: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(V(nodes), dtype=complex)
        if values.shape == nodes.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([complex(V(float(x))) for x in nodes], dtype=complex)


def integrate_ode(p: OdeProblem) -> Trajectory:
    """Classical RK4 for y'' = V(x) y with dense samples at every step."""
    n = p.steps
    h = (p.x1 - p.x0) / n
    # V at every half step
    nodes = p.x0 + 0.5 * h * np.arange(2 * n + 1)
    potential = _potential_samples(p.V, nodes)

    xs = p.x0 + h * np.arange(n + 1)
    ys = np.empty(n + 1, dtype=complex)
    dys = np.empty(n + 1, dtype=complex)
    y, dy = p.y0, p.dy0
    ys[0], dys[0] = y, dy
    for i in range(n):
        v0, vm, v1 = potential[2 * i], potential[2 * i + 1], potential[2 * i + 2]
        k1y, k1d = dy, v0 * y
        k2y, k2d = dy + 0.5 * h * k1d, vm * (y + 0.5 * h * k1y)
        k3y, k3d = dy + 0.5 * h * k2d, vm * (y + 0.5 * h * k2y)
        k4y, k4d = dy + h * k3d, v1 * (y + h * k3y)
        y = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        dy = dy + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        if not (np.isfinite(y) and np.isfinite(dy)):
            raise DivergenceError(f"RK4 overflow at x={xs[i + 1]:.17g}", float(xs[i + 1]))
        ys[i + 1], dys[i + 1] = y, dy
    logger.debug(f"RK4 integrated {n} steps of size {h:.3e}")
    return Trajectory(xs, ys, dys)


def binomial_half_exact(K: int) -> List[Fraction]:
    """C(-1/2, n) for n = 0..K in exact arithmetic."""
    coefficients = [Fraction(1)]
    for n in range(1, K + 1):
        coefficients.append(coefficients[-1] * (Fraction(-1, 2) - (n - 1)) / n)
    return coefficients


def binomial_series_partial(x: float, K: int) -> PartialSumReport:
    """sum_{n<=K} C(-1/2, n) x^(2n+2) against x^2 / sqrt(1 + x^2)."""
    if K < 0:
        raise ValidationError("K must be >= 0", "K")
    coefficients = binomial_half_exact(K + 1)
    x2 = x * x
    value = sum(float(c) * x2 ** (n + 1) for n, c in enumerate(coefficients[:K + 1]))
    closed = x2 / math.sqrt(1.0 + x2)
    if x2 < 1.0:
        tail = abs(float(coefficients[K + 1])) * x2 ** (K + 2) / (1.0 - x2)
    else:
        tail = math.inf
    return PartialSumReport(value=value, closed_form=closed, tail_bound=tail, order=K)


def sample_field(func: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 x: np.ndarray, t: np.ndarray) -> SpaceTimeGrid:
    """Tabulate Y(x, t) on the product grid."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    X, T = np.meshgrid(x, t, indexing="ij")
    return SpaceTimeGrid(x, t, np.asarray(func(X, T), dtype=complex))


def _uniform_step(axis: np.ndarray, name: str) -> float:
    steps = np.diff(axis)
    if steps.size == 0 or np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValidationError(f"{name} axis must be uniform and increasing", name)
    return float(steps[0])


def finite_diff_residual(samples: SpaceTimeGrid, params: ParticleParams, K: int) -> FiniteDiffReport:
    """Central-difference residual of the evolution equation truncated at order K."""
    if K < 0:
        raise ValidationError("K must be >= 0", "K")
    Y = samples.values
    nx, nt = Y.shape
    if nx < 2 * K + 3:
        raise ValidationError(f"Need at least {2 * K + 3} spatial points for K={K}", "x")
    if nt < 3:
        raise ValidationError("Need at least 3 time samples", "t")
    h = _uniform_step(samples.x, "x")
    dt = _uniform_step(samples.t, "t")

    margin = K + 1
    rows = slice(margin, nx - margin)
    cols = slice(1, nt - 1)
    dY_dt = (Y[rows, 2:] - Y[rows, :-2]) / (2.0 * dt)

    series = np.zeros_like(dY_dt)
    for k, coefficient in enumerate(binomial_half_exact(K)):
        m = k + 1
        derivative = np.zeros_like(dY_dt)
        for j in range(2 * m + 1):
            weight = (-1) ** j * math.comb(2 * m, j)
            derivative += weight * Y[margin + m - j:nx - margin + m - j, cols]
        derivative /= h ** (2 * m)
        series += (-1) ** (k + 1) * float(coefficient) * params.l0 ** (2 * m) * derivative

    center = Y[rows, cols]
    residual = 1j * params.hbar * dY_dt - params.E0 * center - 0.5 * params.E0 * series
    magnitude = np.abs(residual)
    relative = magnitude / np.maximum(np.abs(center), 1e-300)
    return FiniteDiffReport(
        max_residual=float(np.max(magnitude)),
        mean_residual=float(np.mean(magnitude)),
        normalized_max=float(np.max(relative)),
        h=h,
        dt=dt,
    )
