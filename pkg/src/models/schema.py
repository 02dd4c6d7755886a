"""
Output records for specdisp runs.
"""
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .base import CoeffSeq
from .solver import normalized


@dataclass
class ResidualRecord:
    """Functional-equation residual at one evaluation point."""
    z: List[float]  # [re, im]
    residual: float
    normalized: float
    label: Optional[str] = None


@dataclass
class CoeffRecord:
    """One complex coefficient."""
    index: int
    re: float
    im: float
    abs: float


@dataclass
class VerificationRecord:
    """Outcome of one acceptance check."""
    check: str
    suite: str
    passed: bool
    value: Optional[float]
    tolerance: Optional[float]
    detail: str = ""


@dataclass
class PlotBlock:
    """One whitespace-separated block of plot data."""
    label: str
    columns: List[str]
    rows: np.ndarray


@dataclass
class RunManifest:
    """Inputs, versions and tolerances of one run."""
    scenario: str
    mode: str
    inputs: Dict[str, Any]
    settings: Dict[str, Any]
    versions: Dict[str, str]
    artifacts: List[str]
    status: str
    generated_at: str  # ISO format, excluded from determinism checks
    errors: List[str] = field(default_factory=list)

    _source: str = "specdisp"


def package_versions() -> Dict[str, str]:
    """Versions of the numerical stack."""
    import pandas
    import scipy

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pandas.__version__,
    }


class OutputAdapter:
    """Adapter to convert solver results to output records."""

    @staticmethod
    def convert_residual(z: complex, residual: complex, reference: complex,
                         label: Optional[str] = None) -> ResidualRecord:
        """Residual with its scale-free counterpart."""
        z = complex(z)
        return ResidualRecord(
            z=[z.real, z.imag],
            residual=float(abs(residual)),
            normalized=normalized(residual, reference),
            label=label,
        )

    @staticmethod
    def convert_coefficients(values: Any, start: int = 0) -> List[CoeffRecord]:
        """Coefficient table from an array or a CoeffSeq."""
        if isinstance(values, CoeffSeq):
            values, start = values.values, 1
        values = np.asarray(values, dtype=complex)
        return [
            CoeffRecord(index=start + i, re=float(v.real), im=float(v.imag), abs=float(abs(v)))
            for i, v in enumerate(values)
        ]

    @staticmethod
    def build_manifest(scenario: str, mode: str, inputs: Dict[str, Any], settings: Dict[str, Any],
                       artifacts: Sequence[str], errors: Optional[List[str]] = None) -> RunManifest:
        """Manifest of a finished run."""
        errors = list(errors or [])
        return RunManifest(
            scenario=scenario,
            mode=mode,
            inputs=inputs,
            settings=dict(settings),
            versions=package_versions(),
            artifacts=sorted(artifacts),
            status="failed" if errors else "completed",
            generated_at=datetime.now(timezone.utc).isoformat(),
            errors=errors,
        )

    @staticmethod
    def to_dict(obj) -> Dict[str, Any]:
        """Convert dataclass to dictionary for JSON serialization."""
        return asdict(obj)

    @staticmethod
    def to_frame_rows(records: Sequence[Any]) -> List[Dict[str, Any]]:
        return [asdict(record) for record in records]
