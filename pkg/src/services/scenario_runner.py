"""
Scenario runner for specdisp.

Turns a validated ScenarioConfig into artifact files: snapshot and coefficient
CSVs, residual JSON, plot data and a run manifest.
"""
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..models.base import BandLimitError, NumericalError, Polynomial, ValidationError
from ..models.enums import DispersionVariant, ScenarioMode, SolverMethod
from ..models.physics import DispersionLaw, ModeSum, SpectrumGrid
from ..models.scenario import DispersionSpec, HillSpec, ScenarioConfig
from ..models.schema import OutputAdapter, PlotBlock
from ..models.solver import LatticeSolution, OdeProblem
from ..utils.logger import get_logger, log_error_with_context, log_execution_metrics
from . import dispersion, hill, oracle
from .emitter import OutputWriter
from .verification import run_suite

logger = get_logger("runner")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_VALIDATION = 2

MANIFEST = "manifest.json"


@dataclass
class RunResult:
    """Outcome of one scenario run."""
    exit_code: int
    artifacts: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


def _complex_pair(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


class ScenarioRunner:
    """Runs one scenario into an output directory."""

    def __init__(self, config: ScenarioConfig, out_dir: str):
        self.config = config
        self.writer = OutputWriter(out_dir)
        self.settings = config.settings

    def run(self) -> RunResult:
        started = time.perf_counter()
        logger.info(f"Running scenario '{self.config.name}' ({self.config.mode.value})")
        errors: List[str] = []
        exit_code = EXIT_OK
        try:
            if self.config.mode is ScenarioMode.DISPERSION:
                self._run_dispersion(self.config.dispersion)
            elif self.config.mode is ScenarioMode.HILL:
                self._run_hill(self.config.hill)
            else:
                exit_code = self._run_verify()
        except BandLimitError as e:
            # a band violation discovered mid-run is a numerical failure
            exit_code = EXIT_NUMERICAL
            errors.append(f"{type(e).__name__}: {e}")
            log_error_with_context(logger, e, {"scenario": self.config.name})
        except ValidationError as e:
            exit_code = EXIT_VALIDATION
            errors.append(f"{type(e).__name__}: {e}")
            log_error_with_context(logger, e, {"scenario": self.config.name, "field": e.field})
        except NumericalError as e:
            exit_code = EXIT_NUMERICAL
            errors.append(f"{type(e).__name__}: {e}")
            log_error_with_context(logger, e, {"scenario": self.config.name, **e.context})
        except Exception as e:
            exit_code = EXIT_NUMERICAL
            errors.append(f"{type(e).__name__}: {e}")
            log_error_with_context(logger, e, {"scenario": self.config.name, "unexpected": True})

        if exit_code == EXIT_NUMERICAL and not errors:
            errors.append("verification checks failed")
        manifest = OutputAdapter.build_manifest(
            self.config.name,
            self.config.mode.value,
            self.config.inputs,
            self.settings,
            list(self.writer.artifacts),
            errors,
        )
        self.writer.write_json(OutputAdapter.to_dict(manifest), MANIFEST)

        log_execution_metrics(logger, {
            "scenario": self.config.name,
            "exit_code": exit_code,
            "artifacts": len(self.writer.artifacts),
            "seconds": round(time.perf_counter() - started, 3),
        })
        return RunResult(exit_code, list(self.writer.artifacts), errors)

    # dispersion

    def _initial_spectrum(self, spec: DispersionSpec) -> SpectrumGrid:
        axes = [axis.values() for axis in spec.axes]
        if spec.spectrum.kind == "modes":
            return dispersion.mode_spectrum(axes, spec.spectrum.modes, spec.spectrum.width)
        return dispersion.gaussian_spectrum(axes, spec.spectrum.center, spec.spectrum.width)

    def _positions(self, spec: DispersionSpec) -> np.ndarray:
        mesh = np.meshgrid(*[axis.values() for axis in spec.positions], indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def _run_dispersion(self, spec: DispersionSpec) -> None:
        params = self.config.particle
        grid = self._initial_spectrum(spec)
        points = self._positions(spec)
        labels = ["x"] if grid.ndim == 1 else [f"x{i + 1}" for i in range(grid.ndim)]
        blocks: List[PlotBlock] = []
        summary: Dict[str, Any] = {"particle": self.config.particle_summary(), "snapshots": []}

        for variant in spec.laws:
            law = DispersionLaw(variant, params)
            for i, t in enumerate(spec.times):
                evolved = dispersion.evolve_spectrum(grid, t, law)
                synthesis = dispersion.synthesize(evolved, points)
                frame = pd.DataFrame(points, columns=labels)
                frame["re"] = synthesis.values.real
                frame["im"] = synthesis.values.imag
                frame["abs"] = np.abs(synthesis.values)
                name = f"snapshot_{variant.value}_t{i}.csv"
                self.writer.write_csv(frame, name)
                blocks.append(PlotBlock(f"{variant.value} t={t!r}", list(frame.columns), frame.to_numpy()))
                summary["snapshots"].append({
                    "file": name,
                    "law": variant.value,
                    "t": t,
                    "spectral_norm": evolved.l2_norm_squared(),
                    "quadrature_error": synthesis.error_estimate,
                })
            logger.info(f"Propagated {variant.value} snapshots at {len(spec.times)} times")

        self.writer.write_plotdata(blocks, "snapshots.dat", "snapshots")
        self._write_dispersion_curve(grid.axes[0])
        summary["residuals"] = self._grid_residuals(grid, spec)
        if spec.decaying_modes:
            summary["mode_sum"] = self._run_mode_sum(spec, points)
        self.writer.write_json(summary, "residuals.json")

    def _write_dispersion_curve(self, axis: np.ndarray) -> None:
        params = self.config.particle
        inside = axis[np.abs(axis) * params.l0 < 1.0]
        curve = dispersion.dispersion_curve(inside, params)
        self.writer.write_csv(curve, "dispersion_curve.csv")
        self.writer.write_plotdata(
            [PlotBlock("dispersion curves", list(curve.columns), curve.to_numpy())],
            "dispersion_curve.dat",
            "dispersion curves",
        )

    def _grid_residuals(self, grid: SpectrumGrid, spec: DispersionSpec) -> Dict[str, Any]:
        """Truncated-series residuals: relativistic at the configured order, Schrodinger at K=0."""
        orders = {DispersionVariant.RELATIVISTIC: spec.residual_order, DispersionVariant.SCHRODINGER: 0}
        results: Dict[str, Any] = {}
        for variant in spec.laws:
            if variant not in orders:
                continue
            law = DispersionLaw(variant, self.config.particle)
            try:
                report = dispersion.truncated_pde_residual(grid, orders[variant], law=law)
                results[variant.value] = report.to_dict()
            except BandLimitError as e:
                logger.warning(f"Skipping {variant.value} residual: {e}")
                results[variant.value] = {"skipped": str(e)}
        return results

    def _run_mode_sum(self, spec: DispersionSpec, points: np.ndarray) -> Dict[str, Any]:
        modes = ModeSum(spec.decaying_modes, self.config.particle)
        resolved, resolution = dispersion.resolve_phase_sign(modes, self.settings["phase_sign_order"])
        usable = points[np.all(points > 0, axis=1)]
        if usable.shape[1] != resolved.dimension:
            raise ValidationError("Decaying modes need one index per position axis", "decaying_modes")
        rows = []
        for t in spec.times:
            for point in usable:
                value = dispersion.mode_sum_solution(resolved, point, t)
                rows.append(list(point) + [t, value.real, value.imag, abs(value)])
        labels = ["x"] if resolved.dimension == 1 else [f"x{i + 1}" for i in range(resolved.dimension)]
        frame = pd.DataFrame(rows, columns=labels + ["t", "re", "im", "abs"])
        self.writer.write_csv(frame, "mode_sum.csv")
        return {
            "phase_sign": resolution.sign,
            "residual_plus": resolution.residual_plus,
            "residual_minus": resolution.residual_minus,
            "order": self.settings["phase_sign_order"],
        }

    # hill

    def _run_hill(self, spec: HillSpec) -> None:
        handlers = {
            SolverMethod.RECURRENCE: self._run_recurrence,
            SolverMethod.ITERATED: self._run_iterated,
            SolverMethod.NESTED: self._run_nested,
            SolverMethod.GAMMA: self._run_gamma,
            SolverMethod.PRODUCT: self._run_product,
        }
        handlers[spec.method](spec)
        logger.info(f"Hill method {spec.method.value} finished")

    def _write_coefficients(self, solution: LatticeSolution) -> None:
        records = OutputAdapter.convert_coefficients(solution.coeffs)
        frame = pd.DataFrame(OutputAdapter.to_frame_rows(records))
        self.writer.write_csv(frame, "coefficients.csv")
        self.writer.write_plotdata(
            [PlotBlock("lattice coefficients", ["k", "re", "im", "abs"], frame.to_numpy(dtype=float))],
            "coefficients.dat",
            f"nu = {solution.nu!r}",
        )

    def _ode_checks(self, spec: HillSpec, solution: LatticeSolution) -> Dict[str, Any]:
        V, period = spec.potential, spec.potential.period
        x = np.linspace(0.0, period, self.settings["residual_grid"])
        equation = hill.build_functional_equation(hill.multiplier_from_derivative_poly(spec.derivative_poly), V)
        report: Dict[str, Any] = {
            "nu": _complex_pair(solution.nu),
            "order": solution.order,
            "ode_residual": solution.ode_residual(V, spec.derivative_poly, x),
            "lattice_residual": equation.lattice_residual(solution),
        }
        if spec.derivative_poly == Polynomial((0, 0, 1)):
            problem = OdeProblem(V, 0.0, period, solution.evaluate(0.0), solution.derivative(0.0, 1),
                                 self.settings["rk4_step"])
            trajectory = oracle.integrate_ode(problem)
            self.writer.write_csv(trajectory.to_frame(), "trajectory.csv")
            report["oracle_deviation"] = float(np.max(np.abs(trajectory.y - solution.evaluate(trajectory.x))))
        return report

    def _run_recurrence(self, spec: HillSpec) -> None:
        branch = spec.nu if spec.nu is not None else spec.branch
        solution = hill.recurrence_solve(spec.potential, spec.derivative_poly, branch, spec.order)
        self._write_coefficients(solution)
        self.writer.write_json(self._ode_checks(spec, solution), "ode_residual.json")

    def _run_iterated(self, spec: HillSpec) -> None:
        if spec.derivative_poly != Polynomial((0, 0, 1)):
            raise ValidationError("The iterated method solves y'' = V y", "derivative_poly")
        nu = spec.nu
        if nu is None:
            roots = hill.indicial_roots(spec.potential, spec.derivative_poly)
            if spec.branch >= roots.size:
                raise ValidationError(f"Branch {spec.branch} not among {roots.size} roots", "branch")
            nu = complex(roots[spec.branch])
        seed = LatticeSolution(nu, np.eye(1, spec.order + 1)[0], spec.potential.omega)
        solution, report = hill.iterated_operator_solve(spec.potential, nu, spec.iterations, seed)
        self._write_coefficients(solution)
        checks = self._ode_checks(spec, solution)
        checks.update({
            "converged": report.converged,
            "iterations": report.iterations,
            "residuals": list(report.residuals),
        })
        self.writer.write_json(checks, "convergence.json")

    def _write_residuals(self, records: List[Any], extra: Optional[Dict[str, Any]] = None) -> None:
        payload: Dict[str, Any] = {"records": OutputAdapter.to_frame_rows(records)}
        if extra:
            payload.update(extra)
        self.writer.write_json(payload, "residuals.json")
        rows = np.array([[r.z[0], r.z[1], r.residual, r.normalized] for r in records], dtype=float)
        self.writer.write_plotdata(
            [PlotBlock("residuals", ["re_z", "im_z", "residual", "normalized"], rows.reshape(-1, 4))],
            "residuals.dat",
            "functional-equation residuals",
        )

    def _run_nested(self, spec: HillSpec) -> None:
        g = hill.multiplier_from_derivative_poly(spec.derivative_poly)
        equation = hill.build_functional_equation(g, spec.potential)

        def yhat(w: complex) -> complex:
            return hill.nested_sum_eval(spec.potential, spec.derivative_poly, w, spec.depth).value

        records, reports = [], []
        for z in spec.z_points:
            report = hill.nested_sum_eval(spec.potential, spec.derivative_poly, z, spec.depth)
            records.append(OutputAdapter.convert_residual(z, equation.residual(yhat, z), g(z) * report.value))
            reports.append({
                "z": _complex_pair(z),
                "value": _complex_pair(report.value),
                "step_residual": report.step_residual,
                "equation_residual": report.equation_residual,
            })
        self._write_residuals(records, {"depth": spec.depth, "nested": reports})

    def _run_gamma(self, spec: HillSpec) -> None:
        factor = spec.factor or hill.factor_from_potential(spec.potential, spec.derivative_poly)
        form = hill.gamma_closed_form(factor)
        records = []
        for z in spec.z_points:
            value = hill.evaluate_gamma_form(form, z)
            reference = factor(z) * value
            records.append(OutputAdapter.convert_residual(z, hill.evaluate_gamma_form(form, z + 1) - reference,
                                                          reference))
        self._write_residuals(records, {
            "form": {
                "base": _complex_pair(form.base),
                "m": form.m,
                "R1": form.R1.to_json(),
                "roots": [_complex_pair(r) for r in form.roots],
                "poles": [_complex_pair(s) for s in form.poles],
            }
        })

    def _run_product(self, spec: HillSpec) -> None:
        records, reports = [], []
        for z in spec.z_points:
            report = hill.product_solution(spec.factor, spec.tau, z, spec.terms)
            h = spec.factor(z)
            records.append(OutputAdapter.convert_residual(z, report.equation_residual * abs(h), h))
            reports.append({
                "z": _complex_pair(z),
                "value": _complex_pair(report.value),
                "telescoping_error": report.telescoping_error,
                "converged": report.converged,
                "tail_bound": _finite_or_none(report.tail_bound),
            })
        self._write_residuals(records, {"terms": spec.terms, "tau": spec.tau, "product": reports})

    # verify

    def _run_verify(self) -> int:
        records = run_suite(self.config.suite, self.settings)
        passed = sum(r.passed for r in records)
        self.writer.write_json(
            {"suite": self.config.suite.value, "passed": passed, "total": len(records),
             "checks": OutputAdapter.to_frame_rows(records)},
            "verification.json",
        )
        logger.info(f"Verification: {passed}/{len(records)} checks passed")
        return EXIT_OK if passed == len(records) else EXIT_NUMERICAL


def run_scenario(config: ScenarioConfig, out_dir: str) -> RunResult:
    """Run a scenario and write its artifacts into out_dir."""
    return ScenarioRunner(config, out_dir).run()
