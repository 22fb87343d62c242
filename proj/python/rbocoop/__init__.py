"""Cooperative piecewise-stationary bandits with restarted Bayesian change
detection. Thin wrapper over the compiled ``_rbocoop`` module."""

import json

from . import _rbocoop
from ._rbocoop import (
    ConfigError,
    ForecasterBank,
    IoError,
    ParseError,
    TRACE_SCHEMA_VERSION,
    coop_false_alarm,
    confidence_radius,
    detection_delay,
    policy_names,
    run_offline,
)
from .io import read_events, read_regret, read_summary, read_trace

__all__ = [
    "ConfigError",
    "ForecasterBank",
    "IoError",
    "ParseError",
    "TRACE_SCHEMA_VERSION",
    "coop_false_alarm",
    "confidence_radius",
    "detection_delay",
    "list_presets",
    "load_preset",
    "policy_names",
    "read_events",
    "read_regret",
    "read_summary",
    "read_trace",
    "run",
    "run_offline",
    "validate",
]


def list_presets():
    """Names and descriptions of the bundled experiment presets."""
    return dict(_rbocoop.list_presets())


def load_preset(name):
    """A bundled preset as a plain dict (same layout as a config file)."""
    return json.loads(_rbocoop.preset_text(name))


def _config_text(config):
    if isinstance(config, str):
        return _rbocoop.preset_text(config)
    return json.dumps(config)


def validate(config):
    """Warnings for a config dict or preset name; raises ConfigError."""
    return list(_rbocoop.validate(_config_text(config)))


def run(config, policy, replications=None, seed=None, jobs=1):
    """Runs one policy. Returns the summary dict and the three CSV texts
    under ``trace_csv``, ``events_csv`` and ``regret_csv``."""
    out = _rbocoop.run_policy(_config_text(config), policy, replications, seed, jobs)
    out = dict(out)
    out["summary"] = json.loads(out["summary"])
    return out
