"""
Result objects returned by specdisp services.
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from .base import CoeffSeq, Polynomial, TrigPoly


@dataclass(frozen=True)
class ReciprocalSeries:
    """Truncated reciprocal 1/V = exp(i n0 x) / W with W's reciprocal stored."""
    factored: np.ndarray
    shift: int
    period: float
    residual: float

    def coefficient(self, n: int) -> complex:
        """Coefficient c*_n of 1/V = sum c*_n exp(-i n x)."""
        k = n + self.shift
        if 0 <= k < self.factored.size:
            return complex(self.factored[k])
        return 0j

    def as_trigpoly(self) -> TrigPoly:
        return TrigPoly({k - self.shift: complex(c) for k, c in enumerate(self.factored)}, self.period)

    @property
    def order(self) -> int:
        return int(self.factored.size - 1)


@dataclass(frozen=True)
class LambertRational:
    """Taylor coefficients of a Lambert series and its rational form, if detected."""
    A: CoeffSeq
    B: CoeffSeq
    period: Optional[int]
    numerator: Optional[Polynomial]
    denominator: Optional[Polynomial]

    @property
    def is_rational(self) -> bool:
        return self.numerator is not None

    def evaluate(self, q: complex) -> complex:
        if self.numerator is None or self.denominator is None:
            raise ValueError("No rational form was detected")
        return complex(self.numerator(q)) / complex(self.denominator(q))


@dataclass(frozen=True)
class SynthesisResult:
    """Position-space values with a quadrature error estimate."""
    values: np.ndarray
    error_estimate: float


@dataclass(frozen=True)
class ResidualReport:
    """Normalized residual statistics."""
    max_residual: float
    mean_residual: float
    order: int
    samples: int

    def to_dict(self) -> Dict[str, Any]:
        return {"max": self.max_residual, "mean": self.mean_residual,
                "order": self.order, "samples": self.samples}


@dataclass(frozen=True)
class PhaseSignResolution:
    """Residuals of both phase signs and the minimizer."""
    sign: int
    residual_plus: float
    residual_minus: float

    @property
    def separation(self) -> float:
        return abs(self.residual_plus - self.residual_minus)


@dataclass(frozen=True)
class NestedSumReport:
    """Depth-truncated nested sum with its identities."""
    value: complex
    depth: int
    step_residual: float
    equation_residual: float


@dataclass(frozen=True)
class ThetaReport:
    """Depth-truncated theta iteration with its identities."""
    value: complex
    depth: int
    window: Tuple[int, ...]
    step_residual: float
    equation_residual: float


@dataclass(frozen=True)
class ProductReport:
    """Truncated infinite product with telescoping check and tail estimate."""
    value: complex
    terms: int
    telescoping_error: float
    converged: bool
    tail_bound: float
    equation_residual: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-iteration residual history of an iterative solve."""
    residuals: Tuple[float, ...]
    converged: bool
    iterations: int

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else float("inf")


@dataclass(frozen=True)
class TwoAdicModeReport:
    """Two-adic Fourier coefficients for one separation mode at fixed gamma."""
    gamma: float
    b: CoeffSeq
    amplitude: complex
    time_factor: complex
    identity_error: float

    @property
    def value(self) -> complex:
        return self.amplitude * self.time_factor


@dataclass(frozen=True)
class Trajectory:
    """Dense RK4 samples of y and y'."""
    x: np.ndarray
    y: np.ndarray
    dy: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "x": self.x,
            "re_y": self.y.real,
            "im_y": self.y.imag,
            "re_dy": self.dy.real,
            "im_dy": self.dy.imag,
        })

    def at(self, x: float) -> complex:
        """Sample nearest to x."""
        return complex(self.y[int(np.argmin(np.abs(self.x - x)))])


@dataclass(frozen=True)
class PartialSumReport:
    """Partial sum of the binomial series against its closed form."""
    value: float
    closed_form: float
    tail_bound: float
    order: int

    @property
    def error(self) -> float:
        return abs(self.value - self.closed_form)


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Field samples Y[i, j] at x[i], t[j] on a uniform grid."""
    x: np.ndarray
    t: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class FiniteDiffReport:
    """Finite-difference residual of the truncated evolution equation."""
    max_residual: float
    mean_residual: float
    normalized_max: float
    h: float
    dt: float
    order: int = 2
