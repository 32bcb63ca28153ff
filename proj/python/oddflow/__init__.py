"""Pseudo-spectral simulator for 2D variable-density odd-viscosity flow."""

import json

from ._oddflow import (
    ConfigError,
    ConvergenceError,
    OddflowError,
    VacuumError,
    bony_decompose,
    csv_schema,
    curl,
    divergence,
    dyadic_blocks,
    effective_velocity,
    gradient_identity_residual,
    leray_project,
    perp_gradient,
    picard,
    read_snapshot,
    simulate,
    sobolev_norm,
    solve_variable_poisson,
    viscosity_g,
)


def run(config=None):
    """Run a simulation from a dict (or JSON string) config."""
    if config is None:
        config = {}
    if not isinstance(config, str):
        config = json.dumps(config)
    return simulate(config)


__all__ = [
    "ConfigError",
    "ConvergenceError",
    "OddflowError",
    "VacuumError",
    "bony_decompose",
    "csv_schema",
    "curl",
    "divergence",
    "dyadic_blocks",
    "effective_velocity",
    "gradient_identity_residual",
    "leray_project",
    "perp_gradient",
    "picard",
    "read_snapshot",
    "run",
    "simulate",
    "sobolev_norm",
    "solve_variable_poisson",
    "viscosity_g",
]
