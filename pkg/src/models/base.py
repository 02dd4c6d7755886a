"""
Base data models for specdisp.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np


TWO_PI = 2.0 * math.pi


class ValidationError(Exception):
    """Raised when model validation fails."""
    def __init__(self, message: str, field: str = None):
        super().__init__(message)
        self.field = field


class NumericalError(Exception):
    """Raised when a numerical procedure cannot produce a result."""
    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context = context or {}


class SingularInversionError(NumericalError):
    """Raised when an arithmetical inverse does not exist."""


class PoleError(NumericalError):
    """Raised when an evaluation point hits a pole."""


class ResonanceError(NumericalError):
    """Raised when a recurrence denominator vanishes."""
    def __init__(self, message: str, k: int):
        super().__init__(message, {"k": k})
        self.k = k


class IndicialError(NumericalError):
    """Raised when the indicial equation has no usable root."""


class DivergenceError(NumericalError):
    """Raised when an integration blows up or fails to converge."""
    def __init__(self, message: str, location: Any = None):
        super().__init__(message, {"location": location})
        self.location = location


class BandLimitError(ValidationError, NumericalError):
    """Raised when a frequency lies outside the admissible band."""
    def __init__(self, message: str, field: str = "gamma"):
        ValidationError.__init__(self, message, field)
        self.context = {"field": field}


def _as_complex(value: Any, name: str) -> complex:
    """Coerce a scalar or [re, im] pair to complex."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValidationError(f"{name} must be a number or [re, im] pair", name)
        value = complex(float(value[0]), float(value[1]))
    try:
        result = complex(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be numeric", name)
    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise ValidationError(f"{name} must be finite", name)
    return result


@dataclass(frozen=True)
class CoeffSeq:
    """Coefficient sequence indexed from 1; values[n - 1] holds entry n."""
    values: np.ndarray

    def __post_init__(self):
        """Normalize storage and validate."""
        values = np.array(self.values, dtype=complex).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        self.validate()

    def validate(self) -> None:
        """Validate the sequence."""
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("Coefficient sequence must be finite", "values")

    @property
    def bound(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.bound

    def __getitem__(self, n: int) -> complex:
        if n < 1:
            raise ValidationError(f"Index {n} is below 1", "index")
        if n > self.bound:
            return 0j
        return complex(self.values[n - 1])

    @classmethod
    def from_dict(cls, entries: Dict[int, Any], bound: Optional[int] = None) -> "CoeffSeq":
        """Build from an index → value map."""
        if any(int(n) < 1 for n in entries):
            raise ValidationError("Coefficient indices must be >= 1", "entries")
        size = bound if bound is not None else max((int(n) for n in entries), default=0)
        values = np.zeros(size, dtype=complex)
        for n, value in entries.items():
            if int(n) > size:
                raise ValidationError(f"Index {n} exceeds bound {size}", "entries")
            values[int(n) - 1] = _as_complex(value, "entries")
        return cls(values)

    @classmethod
    def from_function(cls, func: Callable[[int], Any], bound: int) -> "CoeffSeq":
        return cls(np.array([complex(func(n)) for n in range(1, bound + 1)], dtype=complex))

    def to_json(self) -> List[List[float]]:
        """Serialize nonzero entries as [index, re, im] triples."""
        return [[n, float(v.real), float(v.imag)]
                for n, v in enumerate(self.values, start=1) if v != 0]

    @classmethod
    def from_json(cls, triples: Iterable[Sequence[float]], bound: Optional[int] = None) -> "CoeffSeq":
        entries = {int(t[0]): complex(t[1], t[2] if len(t) > 2 else 0.0) for t in triples}
        return cls.from_dict(entries, bound)


@dataclass(frozen=True)
class TwoAdicSeq:
    """Sequence b_k indexed from 0 for 2-adic convolutions."""
    values: np.ndarray

    def __post_init__(self):
        """Normalize storage and validate."""
        values = np.array(self.values, dtype=complex).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        self.validate()

    def validate(self) -> None:
        """Validate the sequence."""
        if self.values.size == 0:
            raise ValidationError("2-adic sequence needs at least the k=0 entry", "values")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("2-adic sequence must be finite", "values")

    def __getitem__(self, k: int) -> complex:
        if k < 0:
            raise ValidationError(f"Index {k} is negative", "index")
        if k >= self.values.size:
            return 0j
        return complex(self.values[k])

    @classmethod
    def from_dict(cls, entries: Dict[int, Any]) -> "TwoAdicSeq":
        size = max((int(k) for k in entries), default=0) + 1
        values = np.zeros(size, dtype=complex)
        for k, value in entries.items():
            if int(k) < 0:
                raise ValidationError("2-adic indices must be >= 0", "entries")
            values[int(k)] = _as_complex(value, "entries")
        return cls(values)


@dataclass(frozen=True)
class TrigPoly:
    """Finite trigonometric polynomial V(x) = sum c_n exp(-2 pi i n x / T)."""
    coeffs: Dict[int, complex]
    period: float = TWO_PI

    def __post_init__(self):
        """Drop zero entries and validate."""
        if not isinstance(self.coeffs, dict):
            raise ValidationError("coeffs must be a mapping", "coeffs")
        cleaned = {}
        for n, value in self.coeffs.items():
            if isinstance(n, bool) or int(n) != n:
                raise ValidationError(f"Frequency {n!r} is not an integer", "coeffs")
            value = _as_complex(value, "coeffs")
            if value != 0:
                cleaned[int(n)] = value
        object.__setattr__(self, "coeffs", dict(sorted(cleaned.items())))
        self.validate()

    def validate(self) -> None:
        """Validate the period."""
        if not (isinstance(self.period, Number) and math.isfinite(self.period) and self.period > 0):
            raise ValidationError("period must be a positive finite number", "period")

    @property
    def support(self) -> List[int]:
        return list(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def omega(self) -> float:
        """Base angular frequency 2 pi / T."""
        return TWO_PI / self.period

    def coefficient(self, n: int) -> complex:
        return self.coeffs.get(n, 0j)

    def __call__(self, x: Union[float, complex, np.ndarray]) -> Union[complex, np.ndarray]:
        x = np.asarray(x, dtype=complex)
        total = np.zeros_like(x, dtype=complex)
        for n, c in self.coeffs.items():
            total = total + c * np.exp(-1j * n * self.omega * x)
        return complex(total) if total.ndim == 0 else total

    def reflected(self, t: np.ndarray, order: int = 0) -> np.ndarray:
        """Evaluate d^order/dt^order of sum c_n exp(i n t)."""
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape, dtype=complex)
        for n, c in self.coeffs.items():
            total += c * (1j * n) ** order * np.exp(1j * n * t)
        return total

    def to_json(self) -> List[List[float]]:
        return [[n, c.real, c.imag] for n, c in self.coeffs.items()]

    @classmethod
    def from_json(cls, triples: Iterable[Sequence[float]], period: float = TWO_PI) -> "TrigPoly":
        return cls({int(t[0]): complex(t[1], t[2] if len(t) > 2 else 0.0) for t in triples}, period)


Scalar = Union[int, Fraction, float, complex]


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with ascending coefficients; exact when coefficients are rational."""
    coefficients: Tuple[Scalar, ...] = field(default_factory=tuple)

    def __post_init__(self):
        """Strip trailing zeros and validate."""
        coefficients = list(self.coefficients)
        for value in coefficients:
            if not isinstance(value, (int, Fraction, float, complex, np.number)):
                raise ValidationError("Polynomial coefficients must be numbers", "coefficients")
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, z: Any) -> Any:
        result: Any = 0
        for c in reversed(self.coefficients):
            result = result * z + c
        return result

    def __add__(self, other: "Polynomial") -> "Polynomial":
        size = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [0] * (size - len(self.coefficients))
        b = list(other.coefficients) + [0] * (size - len(other.coefficients))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial(())
        out: List[Any] = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def scale(self, factor: Scalar) -> "Polynomial":
        return Polynomial(tuple(factor * c for c in self.coefficients))

    def derivative(self, order: int = 1) -> "Polynomial":
        coefficients = list(self.coefficients)
        for _ in range(order):
            coefficients = [j * c for j, c in enumerate(coefficients)][1:]
        return Polynomial(tuple(coefficients))

    def shift(self, a: Scalar) -> "Polynomial":
        """Return the polynomial z -> p(z + a)."""
        out: List[Any] = [0] * len(self.coefficients)
        for j, c in enumerate(self.coefficients):
            for k in range(j + 1):
                out[k] += c * math.comb(j, k) * a ** (j - k)
        return Polynomial(tuple(out))

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.array([], dtype=complex)
        return np.roots([complex(c) for c in reversed(self.coefficients)]).astype(complex)

    def to_json(self) -> List[List[float]]:
        return [[complex(c).real, complex(c).imag] for c in self.coefficients]

    @classmethod
    def from_json(cls, pairs: Iterable[Any]) -> "Polynomial":
        return cls(tuple(_as_complex(p, "coefficients") for p in pairs))

    @classmethod
    def monomial(cls, degree: int, coefficient: Scalar = 1) -> "Polynomial":
        return cls(tuple([0] * degree + [coefficient]))
