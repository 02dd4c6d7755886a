"""
Physical data models for specdisp: particles, dispersion laws and spectral states.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .base import BandLimitError, ValidationError, _as_complex
from .enums import DispersionVariant


# Compton lengths in cm, used with natural units (E0 = hbar = 1)
PARTICLE_PRESETS: Dict[str, float] = {
    "electron": 3.86e-13,
    "neutrino": 0.000164,
}

# CODATA 2018, SI units
ELECTRON_MASS_KG = 9.1093837015e-31
SPEED_OF_LIGHT = 299792458.0
HBAR_SI = 1.054571817e-34


@dataclass(frozen=True)
class ParticleParams:
    """Rest mass, light speed and reduced Planck constant of a particle."""
    m0: float
    c: float
    hbar: float
    name: Optional[str] = None

    def __post_init__(self):
        """Validate parameters after initialization."""
        self.validate()

    def validate(self) -> None:
        """Validate that all constants are positive and finite."""
        for name in ("m0", "c", "hbar"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{name} must be a positive finite number", name)

    @property
    def E0(self) -> float:
        """Rest energy m0 c^2."""
        return self.m0 * self.c ** 2

    @property
    def l0(self) -> float:
        """Compton length hbar / (m0 c)."""
        return self.hbar / (self.m0 * self.c)

    @property
    def band_limit(self) -> float:
        return 1.0 / self.l0

    def consistency_gap(self) -> float:
        """Relative gap in E0 l0^2 = hbar^2 / m0."""
        lhs = self.E0 * self.l0 ** 2
        rhs = self.hbar ** 2 / self.m0
        return abs(lhs - rhs) / abs(rhs)

    @classmethod
    def natural(cls, l0: float, name: Optional[str] = None) -> "ParticleParams":
        """Natural units: E0 = hbar = 1 with the given Compton length."""
        if not isinstance(l0, (int, float)) or not math.isfinite(l0) or l0 <= 0:
            raise ValidationError("l0 must be a positive finite number", "l0")
        return cls(m0=1.0 / l0 ** 2, c=float(l0), hbar=1.0, name=name)

    @classmethod
    def from_preset(cls, name: str) -> "ParticleParams":
        if name not in PARTICLE_PRESETS:
            raise ValidationError(
                f"Unknown particle preset '{name}', expected one of {sorted(PARTICLE_PRESETS)}",
                "preset",
            )
        return cls.natural(PARTICLE_PRESETS[name], name=name)

    @classmethod
    def si_electron(cls) -> "ParticleParams":
        return cls(m0=ELECTRON_MASS_KG, c=SPEED_OF_LIGHT, hbar=HBAR_SI, name="electron")


@dataclass(frozen=True)
class DispersionLaw:
    """Energy law E(gamma) for a particle."""
    variant: DispersionVariant
    params: ParticleParams

    def __post_init__(self):
        """Coerce the variant and validate."""
        if isinstance(self.variant, str):
            try:
                object.__setattr__(self, "variant", DispersionVariant(self.variant))
            except ValueError:
                raise ValidationError(f"Unknown dispersion law '{self.variant}'", "variant")
        if not isinstance(self.variant, DispersionVariant):
            raise ValidationError("variant must be a DispersionVariant", "variant")

    def check_band(self, gamma: np.ndarray) -> None:
        """Reject frequencies outside |gamma| < 1/l0 for the relativistic law."""
        if self.variant is not DispersionVariant.RELATIVISTIC:
            return
        scaled = np.abs(np.asarray(gamma, dtype=float)) * self.params.l0
        if scaled.size and np.max(scaled) >= 1.0:
            raise BandLimitError(
                f"Frequency outside the band |gamma| < 1/l0 (max l0*|gamma| = {np.max(scaled):.17g})"
            )

    def kinetic(self, gamma: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Kinetic part E(gamma) - E0 along one axis."""
        gamma = np.asarray(gamma, dtype=float)
        self.check_band(gamma)
        E0, l0 = self.params.E0, self.params.l0
        u = (l0 * gamma) ** 2
        if self.variant is DispersionVariant.SCHRODINGER:
            result = self.params.hbar ** 2 * gamma ** 2 / (2.0 * self.params.m0)
        elif self.variant is DispersionVariant.RELATIVISTIC:
            result = 0.5 * E0 * u / np.sqrt(1.0 + u)
        else:
            # sqrt(1 + u) - 1 without cancellation
            result = E0 * u / (np.sqrt(1.0 + u) + 1.0)
        return float(result) if result.ndim == 0 else result

    def energy(self, gamma: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return self.params.E0 + self.kinetic(gamma)

    def energy_nd(self, *gammas: np.ndarray) -> np.ndarray:
        """Energy on broadcast per-axis frequencies; kinetic parts add per axis."""
        if not gammas:
            raise ValidationError("At least one axis is required", "gammas")
        if self.variant is DispersionVariant.KLEIN_GORDON:
            total = sum(np.asarray(g, dtype=float) ** 2 for g in gammas)
            return self.params.E0 + self.kinetic(np.sqrt(total))
        return self.params.E0 + sum(self.kinetic(g) for g in gammas)


@dataclass(frozen=True)
class SpectrumGrid:
    """Sampled frequencies on 1 to 3 uniform axes with complex amplitudes."""
    axes: Tuple[np.ndarray, ...]
    amplitudes: np.ndarray
    band_limited: Tuple[bool, ...] = ()

    def __post_init__(self):
        """Normalize arrays and validate."""
        axes = tuple(np.array(a, dtype=float).reshape(-1) for a in self.axes)
        amplitudes = np.array(self.amplitudes, dtype=complex)
        for array in axes + (amplitudes,):
            array.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "amplitudes", amplitudes)
        if not self.band_limited:
            object.__setattr__(self, "band_limited", tuple(False for _ in axes))
        self.validate()

    def validate(self) -> None:
        """Validate axis count, spacing and amplitude shape."""
        if not 1 <= len(self.axes) <= 3:
            raise ValidationError("A spectrum grid needs 1 to 3 axes", "axes")
        if len(self.band_limited) != len(self.axes):
            raise ValidationError("One band-limit flag per axis is required", "band_limited")
        for i, axis in enumerate(self.axes):
            if axis.size < 2:
                raise ValidationError(f"Axis {i} needs at least 2 samples", "axes")
            steps = np.diff(axis)
            if np.any(steps <= 0):
                raise ValidationError(f"Axis {i} must be strictly increasing", "axes")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise ValidationError(f"Axis {i} must be uniformly spaced", "axes")
        shape = tuple(a.size for a in self.axes)
        if self.amplitudes.shape != shape:
            raise ValidationError(
                f"Amplitude shape {self.amplitudes.shape} does not match axes {shape}", "amplitudes"
            )

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    def with_amplitudes(self, amplitudes: np.ndarray) -> "SpectrumGrid":
        return SpectrumGrid(self.axes, amplitudes, self.band_limited)

    def l2_norm_squared(self) -> float:
        """Spectral norm (1/2pi)^d times the integral of |amplitude|^2."""
        from scipy.integrate import simpson

        values = np.abs(self.amplitudes) ** 2
        for axis in reversed(self.axes):
            values = simpson(values, x=axis, axis=-1)
        return float(values) / (2.0 * math.pi) ** self.ndim


Mode = Tuple[Tuple[int, ...], complex]


@dataclass(frozen=True)
class ModeSum:
    """Superposition of decaying modes exp(-n.x) with their time phases."""
    modes: Tuple[Mode, ...]
    params: ParticleParams
    phase_sign: int = 1

    def __post_init__(self):
        """Normalize mode indices and validate."""
        normalized: List[Mode] = []
        for entry in self.modes:
            if len(entry) != 2:
                raise ValidationError("Each mode must be an (index, amplitude) pair", "modes")
            index, amplitude = entry
            index = (index,) if isinstance(index, (int, np.integer)) else tuple(index)
            normalized.append((tuple(int(n) for n in index), _as_complex(amplitude, "modes")))
        object.__setattr__(self, "modes", tuple(normalized))
        self.validate()

    def validate(self) -> None:
        """Validate mode indices against the band."""
        if not self.modes:
            raise ValidationError("A mode sum needs at least one mode", "modes")
        if self.phase_sign not in (1, -1):
            raise ValidationError("phase_sign must be +1 or -1", "phase_sign")
        dims = {len(index) for index, _ in self.modes}
        if len(dims) != 1 or not 1 <= dims.pop() <= 3:
            raise ValidationError("All modes need the same dimension (1 to 3)", "modes")
        l0 = self.params.l0
        for index, _ in self.modes:
            for n in index:
                if n < 1:
                    raise ValidationError("Mode indices must be positive integers", "modes")
                if n * l0 >= 1.0:
                    raise BandLimitError(
                        f"Mode n={n} violates n < 1/l0 (l0*n = {n * l0:.17g})", "modes"
                    )

    @property
    def dimension(self) -> int:
        return len(self.modes[0][0])

    def with_sign(self, sign: int) -> "ModeSum":
        return ModeSum(self.modes, self.params, sign)
