"""Structural checks and simulation of mass-action reaction-diffusion systems."""

import json

from ._rdnet import (
    ConfigError,
    Error,
    ParseError,
    __version__,
    equilibrium,
    ladder,
    ladder_threshold,
    maxreg_constant,
    parse,
    pretty_print,
    quasi_uniform,
)
from . import _rdnet


def analyze(text, n=2, samples=10000):
    """Structural report for network text, as a dict (schema rdnet-report/1)."""
    return json.loads(_rdnet.analyze_json(text, n, samples))


def simulate(config, output=None, horizon=None, seed=None):
    """Runs a config file; returns the summary dict and writes outputs when asked."""
    return json.loads(_rdnet.simulate_json(str(config), None if output is None else str(output), horizon, seed))


__all__ = [
    "ConfigError",
    "Error",
    "ParseError",
    "analyze",
    "equilibrium",
    "ladder",
    "ladder_threshold",
    "maxreg_constant",
    "parse",
    "pretty_print",
    "quasi_uniform",
    "simulate",
]
