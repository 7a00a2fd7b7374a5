"""Agent-based demographic simulation engine."""

from ._core import (
    Config,
    ConfigError,
    Simulation,
    age_factor,
    children_factor,
    geo_factor,
    instantaneous_probability,
    steps_per_year,
)

__all__ = [
    "Config",
    "ConfigError",
    "Simulation",
    "age_factor",
    "children_factor",
    "geo_factor",
    "instantaneous_probability",
    "steps_per_year",
]
