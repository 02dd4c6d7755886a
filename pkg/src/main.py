"""
Main entry point for specdisp.
"""
import json
import os
import sys
from typing import Any, Dict

import click

from .models.base import ValidationError
from .models.enums import VerificationSuite
from .models.scenario import ScenarioConfig
from .services.scenario_runner import EXIT_OK, EXIT_VALIDATION, run_scenario
from .utils.logger import setup_logger

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def load_config(path: str) -> Dict[str, Any]:
    """Load a JSON scenario file."""
    try:
        with open(path, "r") as f:
            return json.load(f)
    except OSError as e:
        raise ValidationError(f"Cannot read config {path}: {e}", "config")
    except json.JSONDecodeError as e:
        raise ValidationError(f"Config {path} is not valid JSON: {e}", "config")


def transform_config(raw: Dict[str, Any], natural_units: bool = False) -> ScenarioConfig:
    """Turn a raw JSON document into a validated scenario."""
    return ScenarioConfig.from_dict(raw, natural_units)


@click.group()
def cli() -> None:
    """Spectral dispersion and periodic-potential solver workbench."""


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
              help="Scenario JSON file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for the run artifacts.")
@click.option("--natural-units", is_flag=True, help="Read particle constants in units with E0 = hbar = 1.")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
def run(config_path: str, out_dir: str, natural_units: bool, log_level: str) -> None:
    """Run one scenario and write its artifacts."""
    logger = setup_logger(level=log_level)
    logger.info(f"Loading scenario from {config_path}")
    try:
        config = transform_config(load_config(config_path), natural_units)
    except ValidationError as e:
        logger.error(f"Invalid configuration ({e.field}): {e}")
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_VALIDATION)

    result = run_scenario(config, out_dir)
    for error in result.errors:
        click.echo(f"error: {error}", err=True)
    if result.exit_code == EXIT_OK:
        click.echo(f"{len(result.artifacts)} artifacts written to {out_dir}")
    sys.exit(result.exit_code)


@cli.command()
@click.option("--suite", type=click.Choice([s.value for s in VerificationSuite]), default="all",
              help="Restrict the checks to one area.")
@click.option("--out", "out_dir", default="verification", type=click.Path(file_okay=False),
              help="Directory for verification.json and the manifest.")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
def verify(suite: str, out_dir: str, log_level: str) -> None:
    """Run the acceptance checks; exit 0 only if all of them pass."""
    setup_logger(level=log_level)
    config = transform_config({"name": f"verify-{suite}", "mode": "verify", "suite": suite})
    result = run_scenario(config, out_dir)
    report_path = os.path.join(out_dir, "verification.json")
    if not os.path.exists(report_path):
        sys.exit(result.exit_code)
    with open(report_path, "r") as f:
        report = json.load(f)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"[{status}] {check['suite']}.{check['check']}: {check['detail']}")
    click.echo(f"{report['passed']}/{report['total']} checks passed")
    sys.exit(result.exit_code)


if __name__ == "__main__":
    cli()
