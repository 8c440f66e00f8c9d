"""Slow-fast reduction of perturbed ODE systems."""

from ._core import (
    Example,
    UnknownSystem,
    default_params,
    hurwitz_computed,
    list_systems,
    run_cli,
)

__all__ = [
    "Example",
    "UnknownSystem",
    "default_params",
    "hurwitz_computed",
    "list_systems",
    "run_cli",
]
