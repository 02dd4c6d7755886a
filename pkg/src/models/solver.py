"""
Solver data models for specdisp.
"""
import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Tuple, Union

import numpy as np

from .base import Polynomial, TrigPoly, ValidationError, _as_complex
from .physics import ParticleParams


Multiplier = Union[Polynomial, Callable[[complex], complex]]

NORMALIZATION_FLOOR = 1e-300


def normalized(residual: complex, reference: complex) -> float:
    """Scale a residual by max(|reference|, 1e-300)."""
    return abs(residual) / max(abs(reference), NORMALIZATION_FLOOR)


@dataclass(frozen=True)
class MultiplierSpec:
    """Separated multiplier g_m(gamma) = C_m - E0 - (E0/2) l0^2 gamma^2 / sqrt(1 + l0^2 gamma^2)."""
    C_m: complex
    params: ParticleParams

    def __post_init__(self):
        object.__setattr__(self, "C_m", _as_complex(self.C_m, "C_m"))

    def __call__(self, gamma: Any) -> Any:
        E0, l0 = self.params.E0, self.params.l0
        u = (l0 * np.asarray(gamma)) ** 2
        value = self.C_m - E0 - 0.5 * E0 * u / np.sqrt(1.0 + u)
        return complex(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class SeparationMode:
    """Separation constant pair: amplitude Lambda and multiplier built from C_m."""
    Lambda: complex
    multiplier: MultiplierSpec

    def __post_init__(self):
        object.__setattr__(self, "Lambda", _as_complex(self.Lambda, "Lambda"))


@dataclass(frozen=True)
class LatticeSolution:
    """y(x) = exp(i nu x) * sum_k a_k exp(-i k omega x), normalized to a_0 = 1."""
    nu: complex
    coeffs: np.ndarray
    omega: float = 1.0

    def __post_init__(self):
        """Normalize storage and validate."""
        object.__setattr__(self, "nu", _as_complex(self.nu, "nu"))
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        self.validate()

    def validate(self) -> None:
        """Check the a_0 = 1 normalization."""
        if self.coeffs.size == 0:
            raise ValidationError("A lattice solution needs a_0", "coeffs")
        if abs(self.coeffs[0] - 1.0) > 1e-12:
            raise ValidationError("Lattice solutions are normalized to a_0 = 1", "coeffs")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValidationError("Lattice coefficients must be finite", "coeffs")

    @property
    def order(self) -> int:
        """Truncation K."""
        return int(self.coeffs.size - 1)

    def frequencies(self) -> np.ndarray:
        return self.nu - self.omega * np.arange(self.coeffs.size)

    def derivative(self, x: Any, order: int = 1) -> Any:
        x = np.asarray(x, dtype=float)
        freqs = self.frequencies()
        phases = np.exp(1j * np.multiply.outer(x, freqs))
        values = phases @ (self.coeffs * (1j * freqs) ** order)
        return complex(values) if values.ndim == 0 else values

    def evaluate(self, x: Any) -> Any:
        return self.derivative(x, 0)

    def ode_residual(self, V: TrigPoly, B: Polynomial, x: Any) -> float:
        """Max |B(d/dx) y - V y| over the points x."""
        x = np.asarray(x, dtype=float)
        lhs = np.zeros(x.shape, dtype=complex)
        for j, b in enumerate(B.coefficients):
            if b != 0:
                lhs = lhs + complex(b) * self.derivative(x, j)
        return float(np.max(np.abs(lhs - V(x) * self.evaluate(x))))


@dataclass(frozen=True)
class FunctionalEquation:
    """The shift equation sum_n c_n yhat(z + n tau) = g(z) yhat(z)."""
    coeffs: TrigPoly
    tau: float
    multiplier: Multiplier
    separation: Tuple[SeparationMode, ...] = ()

    def __post_init__(self):
        """Validate after initialization."""
        if not callable(self.multiplier):
            raise ValidationError("multiplier must be a Polynomial or callable", "multiplier")
        if not math.isfinite(self.tau) or self.tau <= 0:
            raise ValidationError("tau must be positive", "tau")
        object.__setattr__(self, "separation", tuple(self.separation))

    def g(self, z: complex) -> complex:
        return complex(self.multiplier(z))

    def residual(self, yhat: Callable[[complex], complex], z: complex) -> complex:
        shifted = sum(c * yhat(z + n * self.tau) for n, c in self.coeffs.coeffs.items())
        return shifted - self.g(z) * yhat(z)

    def normalized_residual(self, yhat: Callable[[complex], complex], z: complex) -> float:
        return normalized(self.residual(yhat, z), self.g(z) * yhat(z))

    def lattice_residual(self, solution: LatticeSolution) -> float:
        """Residual of the equation on point masses a_k at nu - k tau."""
        a = solution.coeffs
        residuals = []
        references = []
        for k in range(a.size):
            shifted = sum(c * a[k - n] for n, c in self.coeffs.coeffs.items() if 0 <= k - n < a.size)
            rhs = self.g(solution.nu - k * self.tau) * a[k]
            residuals.append(shifted - rhs)
            references.append(abs(rhs))
        return normalized(max(residuals, key=abs), max(references))


@dataclass(frozen=True)
class MeromorphicFactor:
    """H(z) = (A/B) C z^m exp(-R(z)) prod(z - rho) / prod(z - sigma)."""
    C: complex = 1.0
    m: int = 0
    R: Polynomial = field(default_factory=Polynomial)
    roots: Tuple[complex, ...] = ()
    poles: Tuple[complex, ...] = ()
    A: complex = 1.0
    B: complex = 1.0

    def __post_init__(self):
        """Normalize parameters and validate."""
        for name in ("C", "A", "B"):
            object.__setattr__(self, name, _as_complex(getattr(self, name), name))
        object.__setattr__(self, "roots", tuple(_as_complex(r, "roots") for r in self.roots))
        object.__setattr__(self, "poles", tuple(_as_complex(s, "poles") for s in self.poles))
        self.validate()

    def validate(self) -> None:
        """Reject degenerate prefactors and shared roots and poles."""
        if int(self.m) != self.m or self.m < 0:
            raise ValidationError("m must be a nonnegative integer", "m")
        if self.C == 0 or self.A == 0 or self.B == 0:
            raise ValidationError("C, A and B must be nonzero", "C")
        for rho in self.roots:
            for sigma in self.poles:
                if abs(rho - sigma) <= 1e-14 * max(1.0, abs(rho)):
                    raise ValidationError(f"Root {rho} coincides with pole {sigma}", "roots")

    @property
    def base(self) -> complex:
        return (self.A / self.B) * self.C

    def __call__(self, z: complex) -> complex:
        value = self.base * z ** self.m * cmath.exp(-complex(self.R(z)))
        for rho in self.roots:
            value *= z - rho
        for sigma in self.poles:
            value /= z - sigma
        return value


@dataclass(frozen=True)
class GammaProductForm:
    """yhat(z) = base^z Gamma(z)^m exp(-R1(z)) prod Gamma(z - rho) / prod Gamma(z - sigma)."""
    base: complex
    m: int
    R1: Polynomial
    roots: Tuple[complex, ...]
    poles: Tuple[complex, ...]
    factor: Optional[MeromorphicFactor] = None

    def __post_init__(self):
        """Validate root and pole lists."""
        object.__setattr__(self, "base", _as_complex(self.base, "base"))
        if self.base == 0:
            raise ValidationError("base must be nonzero", "base")
        for rho in self.roots:
            if any(abs(rho - sigma) <= 1e-14 * max(1.0, abs(rho)) for sigma in self.poles):
                raise ValidationError("roots and poles must be disjoint", "roots")


@dataclass(frozen=True)
class OdeProblem:
    """Initial value problem y'' = V(x) y on [x0, x1] with a fixed step."""
    V: Callable[[float], complex]
    x0: float
    x1: float
    y0: complex
    dy0: complex
    step: float = 1e-3

    def __post_init__(self):
        """Validate after initialization."""
        object.__setattr__(self, "y0", _as_complex(self.y0, "y0"))
        object.__setattr__(self, "dy0", _as_complex(self.dy0, "dy0"))
        self.validate()

    def validate(self) -> None:
        """Validate the interval and step."""
        if not callable(self.V):
            raise ValidationError("V must be callable", "V")
        if not (math.isfinite(self.x0) and math.isfinite(self.x1)) or self.x0 == self.x1:
            raise ValidationError("interval must be finite and non-empty", "x1")
        if not math.isfinite(self.step) or self.step <= 0:
            raise ValidationError("step must be positive", "step")

    @property
    def steps(self) -> int:
        return max(1, int(round(abs(self.x1 - self.x0) / self.step)))


@dataclass(frozen=True)
class MellinSample:
    """Numerical Mellin transform value at s."""
    s: complex
    value: complex
    error: float

    def __post_init__(self):
        if not self.error >= 0:
            raise ValidationError("error estimate must be nonnegative", "error")
