"""Seedable Monte Carlo simulation of the full relay chain and baselines."""

from .engine import (
    DETECTORS,
    HAVE_EXTENSION,
    SYSTEMS,
    CompiledScenario,
    DetectorComparison,
    McEstimate,
    TrialOutcome,
    available_backends,
    compare_detectors,
    compile_scenario,
    default_backend,
    estimate_pe,
    relay_decision_count,
    run_trial,
)
from .rng import derive_seed, mix64, normal_stream, uniform_stream

__all__ = [
    "DETECTORS",
    "HAVE_EXTENSION",
    "SYSTEMS",
    "CompiledScenario",
    "DetectorComparison",
    "McEstimate",
    "TrialOutcome",
    "available_backends",
    "compare_detectors",
    "compile_scenario",
    "default_backend",
    "derive_seed",
    "estimate_pe",
    "mix64",
    "normal_stream",
    "relay_decision_count",
    "run_trial",
    "uniform_stream",
]
