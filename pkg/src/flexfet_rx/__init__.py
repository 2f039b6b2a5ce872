"""Analytical model of a nanowire-array Flexure-FET molecular-communication receiver."""

__version__ = "0.1.0"

from .config import ConfigError, SystemConfig, load_config, load_config_file
from .electromech import (
    EquilibriumError,
    EquilibriumState,
    PullInExceeded,
    PullInPoint,
    find_pullin,
    select_bias,
    solve_equilibrium,
)
from .pipeline import LinkReport, evaluate, summary

__all__ = [
    "__version__",
    "ConfigError",
    "SystemConfig",
    "load_config",
    "load_config_file",
    "EquilibriumError",
    "EquilibriumState",
    "PullInExceeded",
    "PullInPoint",
    "find_pullin",
    "select_bias",
    "solve_equilibrium",
    "LinkReport",
    "evaluate",
    "summary",
]
