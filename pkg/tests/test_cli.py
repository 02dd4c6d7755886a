"""
End-to-end tests for the specdisp command line.
"""
import filecmp
import json
import os
import shutil
import tempfile

import pytest
from click.testing import CliRunner

from src.main import cli

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEMO_CONFIG = os.path.join(ROOT, "config.json")


@pytest.fixture
def workdir():
    """Create a temporary working directory."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture
def runner():
    return CliRunner()


def write_config(directory, raw, name="scenario.json"):
    path = os.path.join(directory, name)
    with open(path, "w") as f:
        json.dump(raw, f)
    return path


def read_json(directory, name):
    with open(os.path.join(directory, name)) as f:
        return json.load(f)


def hill_config(name, **block):
    return {"name": name, "mode": "hill", "hill": block}


class TestRunDispersion:
    """Test dispersion scenarios through the CLI."""

    def test_demo_scenario(self, runner, workdir):
        """The shipped demo writes snapshots, curves, residuals and a manifest."""
        out = os.path.join(workdir, "demo")
        result = runner.invoke(cli, ["run", "--config", DEMO_CONFIG, "--out", out])
        assert result.exit_code == 0, result.output
        expected = {
            "snapshot_schrodinger_t0.csv", "snapshot_schrodinger_t1.csv",
            "snapshot_relativistic_t0.csv", "snapshot_relativistic_t1.csv",
            "snapshots.dat", "dispersion_curve.csv", "dispersion_curve.dat",
            "residuals.json", "manifest.json",
        }
        assert expected <= set(os.listdir(out))

        manifest = read_json(out, "manifest.json")
        assert manifest["status"] == "completed"
        assert manifest["inputs"]["name"] == "gaussian-packet-demo"
        assert "numpy" in manifest["versions"]

        residuals = read_json(out, "residuals.json")
        assert residuals["residuals"]["relativistic"]["max"] < 1e-10
        assert residuals["residuals"]["relativistic"]["order"] == 40
        assert residuals["residuals"]["schrodinger"]["max"] < 1e-12
        norms = [s["spectral_norm"] for s in residuals["snapshots"]]
        assert max(norms) - min(norms) < 1e-12 * max(norms)

    def test_snapshot_columns(self, runner, workdir):
        """Snapshot CSVs carry position, real, imaginary and modulus columns."""
        out = os.path.join(workdir, "demo")
        runner.invoke(cli, ["run", "--config", DEMO_CONFIG, "--out", out])
        with open(os.path.join(out, "snapshot_relativistic_t1.csv")) as f:
            lines = f.read().splitlines()
        assert lines[0] == "x,re,im,abs"
        assert len(lines) == 102

    def test_deterministic(self, runner, workdir):
        """Two runs of one scenario give byte-identical data files."""
        first, second = os.path.join(workdir, "a"), os.path.join(workdir, "b")
        for out in (first, second):
            assert runner.invoke(cli, ["run", "--config", DEMO_CONFIG, "--out", out]).exit_code == 0
        names = sorted(set(os.listdir(first)) - {"manifest.json"})
        match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
        assert mismatch == [] and errors == []
        assert len(match) == len(names)

    def test_mode_sum(self, runner, workdir):
        """Decaying modes add a phase-sign resolution and a mode-sum table."""
        raw = read_json(ROOT, "config.json")
        raw["dispersion"]["decaying_modes"] = [{"n": 5, "amplitude": 1.0}]
        out = os.path.join(workdir, "modes")
        result = runner.invoke(cli, ["run", "--config", write_config(workdir, raw), "--out", out])
        assert result.exit_code == 0, result.output
        mode_sum = read_json(out, "residuals.json")["mode_sum"]
        assert mode_sum["phase_sign"] == 1
        assert mode_sum["residual_plus"] < 1e-10
        assert os.path.exists(os.path.join(out, "mode_sum.csv"))

    def test_band_violation_mid_run(self, runner, workdir):
        """A relativistic grid outside the band fails with exit code 1."""
        raw = read_json(ROOT, "config.json")
        raw["dispersion"]["grid"]["axes"] = [{"start": -12.0, "stop": 12.0, "count": 97}]
        out = os.path.join(workdir, "band")
        result = runner.invoke(cli, ["run", "--config", write_config(workdir, raw), "--out", out])
        assert result.exit_code == 1
        manifest = read_json(out, "manifest.json")
        assert manifest["status"] == "failed"
        assert manifest["errors"][0].startswith("BandLimitError")


class TestRunHill:
    """Test hill scenarios through the CLI."""

    BESSEL = [[1, 1.0, 0.0]]

    def test_recurrence(self, runner, workdir):
        """The recurrence agrees with the ODE and the RK4 oracle."""
        config = write_config(workdir, hill_config("bessel", method="recurrence", potential=self.BESSEL, order=20))
        out = os.path.join(workdir, "out")
        result = runner.invoke(cli, ["run", "--config", config, "--out", out])
        assert result.exit_code == 0, result.output
        checks = read_json(out, "ode_residual.json")
        assert checks["nu"] == [0.0, 0.0]
        assert checks["ode_residual"] < 1e-8
        assert checks["oracle_deviation"] < 1e-6
        for name in ("coefficients.csv", "coefficients.dat", "trajectory.csv"):
            assert os.path.exists(os.path.join(out, name))

    def test_iterated(self, runner, workdir):
        """The iterated solver converges to the same coefficients."""
        config = write_config(workdir, hill_config("iterated", method="iterated", potential=self.BESSEL,
                                                   order=20, iterations=40))
        out = os.path.join(workdir, "out")
        result = runner.invoke(cli, ["run", "--config", config, "--out", out])
        assert result.exit_code == 0, result.output
        report = read_json(out, "convergence.json")
        assert report["converged"] is True
        assert report["residuals"][-1] <= 1e-13

    def test_iterated_needs_second_derivative(self, runner, workdir):
        """Other operators are a validation error."""
        config = write_config(workdir, hill_config("first-order", method="iterated", potential=self.BESSEL,
                                                   derivative_poly=[[0, 0], [1, 0]]))
        result = runner.invoke(cli, ["run", "--config", config, "--out", os.path.join(workdir, "out")])
        assert result.exit_code == 2

    def test_nested(self, runner, workdir):
        """Nested sums report their equation residuals."""
        config = write_config(workdir, hill_config("nested", method="nested", potential=self.BESSEL,
                                                   z_points=[[0.3, 0.1], [1.5, 0.5]], depth=6))
        out = os.path.join(workdir, "out")
        result = runner.invoke(cli, ["run", "--config", config, "--out", out])
        assert result.exit_code == 0, result.output
        payload = read_json(out, "residuals.json")
        assert payload["depth"] == 6
        assert len(payload["records"]) == 2
        assert all(entry["step_residual"] < 1e-12 for entry in payload["nested"])
        assert os.path.exists(os.path.join(out, "residuals.dat"))

    def test_gamma(self, runner, workdir):
        """The closed form built from the potential solves the shift equation."""
        config = write_config(workdir, hill_config("gamma", method="gamma", potential=[[0, 2.0, 0.0], [1, 1.0, 0.0]],
                                                   z_points=[[0.6, 0.4], [2.5, -1.0]]))
        out = os.path.join(workdir, "out")
        result = runner.invoke(cli, ["run", "--config", config, "--out", out])
        assert result.exit_code == 0, result.output
        payload = read_json(out, "residuals.json")
        assert all(record["normalized"] < 1e-10 for record in payload["records"])
        assert payload["form"]["base"] == pytest.approx([-1.0, 0.0])

    def test_product(self, runner, workdir):
        """Products of a rational factor report tail diagnostics."""
        config = write_config(workdir, hill_config("product", method="product", potential=self.BESSEL,
                                                   factor={"roots": [[-0.5, 0.0]], "poles": [[-1.5, 0.0]]},
                                                   z_points=[[1.0, 0.5]], terms=20))
        out = os.path.join(workdir, "out")
        result = runner.invoke(cli, ["run", "--config", config, "--out", out])
        assert result.exit_code == 0, result.output
        payload = read_json(out, "residuals.json")
        assert payload["terms"] == 20
        assert payload["product"][0]["telescoping_error"] < 1e-12

    def test_resonance_is_numerical_failure(self, runner, workdir):
        """A resonant branch exits with code 1."""
        config = write_config(workdir, hill_config("resonant", method="recurrence",
                                                   potential=[[0, -0.25, 0.0], [1, 1.0, 0.0]], branch=1))
        result = runner.invoke(cli, ["run", "--config", config, "--out", os.path.join(workdir, "out")])
        assert result.exit_code == 1
        assert "ResonanceError" in result.output


class TestInvalidInput:
    """Test configuration failures."""

    @pytest.mark.parametrize("raw", [
        {"name": "bad", "mode": "bogus"},
        {"name": "bad", "mode": "hill"},
        {"name": "bad", "mode": "dispersion", "dispersion": {"grid": {"axes": [], "positions": []}}},
        {"name": "bad", "mode": "verify", "settings": {"unknown_knob": 1}},
    ])
    def test_invalid_config(self, runner, workdir, raw):
        """Invalid scenarios exit with code 2."""
        result = runner.invoke(cli, ["run", "--config", write_config(workdir, raw), "--out", workdir])
        assert result.exit_code == 2

    def test_unreadable_config(self, runner, workdir):
        """Missing or malformed files exit with code 2."""
        missing = os.path.join(workdir, "missing.json")
        assert runner.invoke(cli, ["run", "--config", missing, "--out", workdir]).exit_code == 2
        broken = os.path.join(workdir, "broken.json")
        with open(broken, "w") as f:
            f.write("{not json")
        assert runner.invoke(cli, ["run", "--config", broken, "--out", workdir]).exit_code == 2


class TestVerifyCommand:
    """Test the verify command."""

    def test_arith_suite(self, runner, workdir):
        """All arithmetic checks pass."""
        out = os.path.join(workdir, "verification")
        result = runner.invoke(cli, ["verify", "--suite", "arith", "--out", out])
        assert result.exit_code == 0, result.output
        assert "[PASS] arith.mobius_values" in result.output
        report = read_json(out, "verification.json")
        assert report["suite"] == "arith"
        assert report["passed"] == report["total"]

    def test_unknown_suite(self, runner, workdir):
        """click rejects unknown suites."""
        result = runner.invoke(cli, ["verify", "--suite", "bogus", "--out", workdir])
        assert result.exit_code == 2
