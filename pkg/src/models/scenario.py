"""
Scenario configuration for specdisp runs.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .base import TWO_PI, Polynomial, TrigPoly, ValidationError, _as_complex
from .enums import DispersionVariant, ScenarioMode, SolverMethod, VerificationSuite
from .physics import ParticleParams
from .solver import MeromorphicFactor


DEFAULT_SETTINGS: Dict[str, Any] = {
    "sieve_bound": 10 ** 6,
    "rk4_step": 1e-3,
    "quadrature_points": 2048,
    "residual_grid": 256,
    "phase_sign_order": 40,
    "reciprocal_order": 64,
}

DEFAULT_L0 = 0.1


def _enum(enum_cls, value: Any, name: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise ValidationError(f"Unknown {name} '{value}', expected one of: {choices}", name)


def _positive_int(raw: Dict[str, Any], key: str, default: int, minimum: int = 0) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(f"{key} must be an integer >= {minimum}", key)
    return value


@dataclass(frozen=True)
class AxisSpec:
    """Uniform axis from start to stop with count samples."""
    start: float
    stop: float
    count: int

    def __post_init__(self):
        """Validate after initialization."""
        self.validate()

    def validate(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or self.stop <= self.start:
            raise ValidationError("Axis needs finite start < stop", "axes")
        if isinstance(self.count, bool) or not isinstance(self.count, int) or self.count < 2:
            raise ValidationError("Axis count must be an integer >= 2", "axes")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "AxisSpec":
        try:
            return cls(float(raw["start"]), float(raw["stop"]), raw["count"])
        except (KeyError, TypeError):
            raise ValidationError("Axis needs start, stop and count", "axes")


@dataclass(frozen=True)
class SpectrumSpec:
    """Initial spectrum: a Gaussian or a list of Gaussian-bump modes."""
    kind: str = "gaussian"
    center: Tuple[float, ...] = (0.0,)
    width: float = 1.0
    modes: Tuple[Tuple[Tuple[float, ...], complex], ...] = ()

    def __post_init__(self):
        """Validate after initialization."""
        self.validate()

    def validate(self) -> None:
        if self.kind not in ("gaussian", "modes"):
            raise ValidationError(f"Unknown spectrum kind '{self.kind}'", "spectrum")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValidationError("Spectrum width must be positive", "spectrum")
        if self.kind == "modes" and not self.modes:
            raise ValidationError("A 'modes' spectrum needs at least one mode", "spectrum")

    @classmethod
    def from_dict(cls, raw: Dict[str, Any], ndim: int) -> "SpectrumSpec":
        kind = raw.get("kind", "gaussian")
        center = tuple(float(c) for c in np.atleast_1d(raw.get("center", [0.0] * ndim)))
        if len(center) != ndim:
            raise ValidationError(f"Spectrum center needs {ndim} components", "spectrum")
        modes = []
        for entry in raw.get("modes", []):
            position = tuple(float(c) for c in np.atleast_1d(entry["center"]))
            if len(position) != ndim:
                raise ValidationError(f"Mode centers need {ndim} components", "spectrum")
            modes.append((position, _as_complex(entry.get("amplitude", 1.0), "amplitude")))
        return cls(kind, center, float(raw.get("width", 1.0)), tuple(modes))


@dataclass(frozen=True)
class DispersionSpec:
    """Spectral propagation set-up."""
    laws: Tuple[DispersionVariant, ...]
    axes: Tuple[AxisSpec, ...]
    positions: Tuple[AxisSpec, ...]
    spectrum: SpectrumSpec
    times: Tuple[float, ...]
    residual_order: int = 40
    decaying_modes: Tuple[Tuple[Tuple[int, ...], complex], ...] = ()

    def __post_init__(self):
        """Validate after initialization."""
        self.validate()

    def validate(self) -> None:
        if not self.laws:
            raise ValidationError("At least one dispersion law is required", "laws")
        if not 1 <= len(self.axes) <= 3:
            raise ValidationError("Frequency grids need 1 to 3 axes", "grid")
        if len(self.positions) != len(self.axes):
            raise ValidationError("One position axis per frequency axis is required", "positions")
        if not self.times or not all(math.isfinite(t) for t in self.times):
            raise ValidationError("times must be a non-empty list of finite numbers", "times")

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "DispersionSpec":
        laws = tuple(_enum(DispersionVariant, law, "law") for law in raw.get("laws", ["relativistic"]))
        grid = raw.get("grid", {})
        axes = tuple(AxisSpec.from_dict(a) for a in grid.get("axes", []))
        positions = tuple(AxisSpec.from_dict(a) for a in grid.get("positions", []))
        spectrum = SpectrumSpec.from_dict(raw.get("spectrum", {}), max(len(axes), 1))
        times = tuple(float(t) for t in raw.get("times", [0.0]))
        order = _positive_int(raw, "residual_order", 40)
        modes = []
        for entry in raw.get("decaying_modes", []):
            if not isinstance(entry, dict) or "n" not in entry:
                raise ValidationError("Decaying modes need an index n", "decaying_modes")
            index = tuple(int(n) for n in np.atleast_1d(entry["n"]))
            modes.append((index, _as_complex(entry.get("amplitude", 1.0), "amplitude")))
        return cls(laws, axes, positions, spectrum, times, order, tuple(modes))


@dataclass(frozen=True)
class HillSpec:
    """Solver set-up for a periodic potential."""
    method: SolverMethod
    potential: TrigPoly
    derivative_poly: Polynomial = field(default_factory=lambda: Polynomial((0, 0, 1)))
    order: int = 20
    branch: int = 0
    nu: Optional[complex] = None
    z_points: Tuple[complex, ...] = ()
    depth: int = 6
    iterations: int = 50
    factor: Optional[MeromorphicFactor] = None
    tau: float = 1.0
    terms: int = 40

    def __post_init__(self):
        """Validate after initialization."""
        self.validate()

    def validate(self) -> None:
        if self.potential.is_zero:
            raise ValidationError("The potential must not vanish identically", "potential")
        if self.method is SolverMethod.PRODUCT and self.factor is None:
            raise ValidationError("The product method needs a factor H", "factor")
        if self.method in (SolverMethod.NESTED, SolverMethod.GAMMA, SolverMethod.PRODUCT) and not self.z_points:
            raise ValidationError(f"The {self.method.value} method needs z_points", "z_points")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValidationError("tau must be positive", "tau")

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "HillSpec":
        method = _enum(SolverMethod, raw.get("method", "recurrence"), "method")
        if "potential" not in raw:
            raise ValidationError("A hill scenario needs a potential", "potential")
        potential = TrigPoly.from_json(raw["potential"], float(raw.get("period", TWO_PI)))
        poly = raw.get("derivative_poly")
        derivative_poly = Polynomial.from_json(poly) if poly is not None else Polynomial((0, 0, 1))
        nu = raw.get("nu")
        factor = None
        if raw.get("factor") is not None:
            spec = raw["factor"]
            factor = MeromorphicFactor(
                C=spec.get("C", 1.0),
                m=spec.get("m", 0),
                R=Polynomial.from_json(spec.get("R", [])),
                roots=tuple(spec.get("roots", [])),
                poles=tuple(spec.get("poles", [])),
                A=spec.get("A", 1.0),
                B=spec.get("B", 1.0),
            )
        return cls(
            method=method,
            potential=potential,
            derivative_poly=derivative_poly,
            order=_positive_int(raw, "order", 20),
            branch=_positive_int(raw, "branch", 0),
            nu=_as_complex(nu, "nu") if nu is not None else None,
            z_points=tuple(_as_complex(z, "z_points") for z in raw.get("z_points", [])),
            depth=_positive_int(raw, "depth", 6),
            iterations=_positive_int(raw, "iterations", 50),
            factor=factor,
            tau=float(raw.get("tau", 1.0)),
            terms=_positive_int(raw, "terms", 40, minimum=2),
        )


def particle_from_config(raw: Dict[str, Any], natural_units: bool = False) -> ParticleParams:
    """Particle from a preset name, explicit constants or a natural-units Compton length."""
    particle = raw.get("particle")
    natural_units = natural_units or bool(raw.get("natural_units", False))
    if isinstance(particle, str):
        return ParticleParams.from_preset(particle)
    if isinstance(particle, dict):
        try:
            params = ParticleParams(float(particle["m0"]), float(particle["c"]), float(particle["hbar"]),
                                    particle.get("name"))
        except (KeyError, TypeError, ValueError):
            raise ValidationError("particle needs numeric m0, c and hbar", "particle")
        return ParticleParams.natural(params.l0, params.name) if natural_units else params
    if particle is not None:
        raise ValidationError("particle must be a preset name or a mapping", "particle")
    return ParticleParams.natural(float(raw.get("l0", DEFAULT_L0)))


@dataclass(frozen=True)
class ScenarioConfig:
    """One validated run description."""
    name: str
    mode: ScenarioMode
    particle: ParticleParams
    settings: Dict[str, Any]
    dispersion: Optional[DispersionSpec] = None
    hill: Optional[HillSpec] = None
    suite: VerificationSuite = VerificationSuite.ALL
    inputs: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        """Validate after initialization."""
        self.validate()

    def validate(self) -> None:
        """Exactly the block matching the mode must be present."""
        if self.mode is ScenarioMode.DISPERSION and self.dispersion is None:
            raise ValidationError("A dispersion scenario needs a 'dispersion' block", "dispersion")
        if self.mode is ScenarioMode.HILL and self.hill is None:
            raise ValidationError("A hill scenario needs a 'hill' block", "hill")
        unknown = sorted(set(self.settings) - set(DEFAULT_SETTINGS))
        if unknown:
            raise ValidationError(f"Unknown settings: {', '.join(unknown)}", "settings")

    @classmethod
    def from_dict(cls, raw: Dict[str, Any], natural_units: bool = False) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ValidationError("The configuration must be a JSON object", "config")
        mode = _enum(ScenarioMode, raw.get("mode"), "mode")
        present = [key for key in ("dispersion", "hill") if raw.get(key) is not None]
        if len(present) > 1:
            raise ValidationError("A scenario has exactly one mode block", "mode")
        settings = dict(DEFAULT_SETTINGS)
        settings.update(raw.get("settings", {}))
        return cls(
            name=str(raw.get("name", "scenario")),
            mode=mode,
            particle=particle_from_config(raw, natural_units),
            settings=settings,
            dispersion=DispersionSpec.from_dict(raw["dispersion"]) if "dispersion" in present else None,
            hill=HillSpec.from_dict(raw["hill"]) if "hill" in present else None,
            suite=_enum(VerificationSuite, raw.get("suite", "all"), "suite"),
            inputs=raw,
        )

    def particle_summary(self) -> Dict[str, float]:
        p = self.particle
        return {"m0": p.m0, "c": p.c, "hbar": p.hbar, "E0": p.E0, "l0": p.l0}
