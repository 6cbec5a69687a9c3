"""Experiment harness: configs, CSV traces, figures, and the CLI."""

from .config import ExperimentConfig, load_config
from .traces import TRACE_HEADER, TraceRow, read_trace, write_trace
from .experiments import certify, compare, run_experiment, sweep

__all__ = [
    "ExperimentConfig",
    "load_config",
    "TRACE_HEADER",
    "TraceRow",
    "read_trace",
    "write_trace",
    "run_experiment",
    "sweep",
    "compare",
    "certify",
]
