"""Scattering on symmetric barriers split into transmission and reflection subensembles."""

import json

from ._core import (
    ConfigError,
    DomainError,
    NumericalError,
    Potential,
    __version__,
    config_schema,
    decompose,
    dwell_time,
    group_delay,
    larmor_times,
    norm,
    packet_field,
    scattering,
    trajectory,
)
from ._core import parse_config as _parse_config


def parse_config(text):
    """Validated run configuration as a dict."""
    return json.loads(_parse_config(text))


__all__ = [
    "ConfigError",
    "DomainError",
    "NumericalError",
    "Potential",
    "__version__",
    "config_schema",
    "decompose",
    "dwell_time",
    "group_delay",
    "larmor_times",
    "norm",
    "packet_field",
    "parse_config",
    "scattering",
    "trajectory",
]
