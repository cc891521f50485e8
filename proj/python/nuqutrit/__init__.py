"""Neutrino oscillations on a simulated transmon qutrit."""

import json

from ._core import (
    GivensGate,
    NumericError,
    OscillationParams,
    __version__,
    compile_circuit,
    exact_matter_matrix,
    mitigate,
    oscillation_matrix,
    pmns_matrix,
    r2_score,
    reference_confusion,
    run_circuit,
    sample_counts,
    verify_decomposition,
)
from . import _core


def default_config(scenario):
    """Default configuration of a scenario ("vacuum", "matter" or "cp") as a dict."""
    return json.loads(_core.default_config(scenario))


def run_scenario(config):
    """Run a scenario from a config dict; missing keys take the scenario defaults."""
    return _core.run_scenario(json.dumps(config))


def score(config):
    """Run a scenario and return its score report against the analytic curves."""
    return json.loads(_core.score(json.dumps(config)))


def calibrate(device=None, shots=8192, seed=2023):
    """Calibrate the mock transmon described by `device` (dict of overrides)."""
    return json.loads(_core.calibrate(json.dumps(device or {}), shots, seed))


__all__ = [
    "GivensGate",
    "NumericError",
    "OscillationParams",
    "__version__",
    "calibrate",
    "compile_circuit",
    "default_config",
    "exact_matter_matrix",
    "mitigate",
    "oscillation_matrix",
    "pmns_matrix",
    "r2_score",
    "reference_confusion",
    "run_circuit",
    "run_scenario",
    "sample_counts",
    "score",
    "verify_decomposition",
]
