"""Python front end for the SATD tripod-gate core."""

import json

from . import _satd
from ._satd import (
    CircuitSpec,
    ConvergenceError,
    SatdError,
    ValidationError,
    diagonalize,
    flux_dispersions,
    omega_rms,
    optimize_omega0,
    report_schema,
    target_unitary,
)

__all__ = [
    "CircuitSpec",
    "ConvergenceError",
    "SatdError",
    "ValidationError",
    "diagonalize",
    "flux_dispersions",
    "normalize_scenario",
    "omega_rms",
    "optimize_omega0",
    "report_schema",
    "run",
    "simulate",
    "target_unitary",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def normalize_scenario(scenario):
    """Validated scenario dict with defaults filled in."""
    return json.loads(_satd.normalize_scenario(_text(scenario)))


def simulate(scenario, workers=1):
    """Run one gate and return the report dict (fidelity, power, invariants)."""
    return json.loads(_satd.simulate(_text(scenario), workers))


def run(subcommand, scenario, workers=1, **extra):
    """Same as the CLI subcommands; artifacts go to scenario["outputs"]["dir"]."""
    return _satd.run(subcommand, _text(scenario), workers, json.dumps(extra) if extra else "")
